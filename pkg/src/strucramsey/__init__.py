"""Finite structural Ramsey theory toolkit."""

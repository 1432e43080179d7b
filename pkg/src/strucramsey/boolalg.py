"""Finite Boolean algebras as subsets of a named atom set.

An element is an ``int`` bitmask over the atoms (bit ``i`` <-> atom ``i``).
Nothing is materialized until :func:`export_structure` is called.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Sequence

import numpy as np

from .budget import resolve
from .errors import BudgetExceeded, MalformedInput
from .structures import FiniteStructure, Signature

BA_SIGNATURE = Signature(
    relations=(),
    functions=(("join", 2), ("meet", 2), ("compl", 1), ("zero", 0), ("one", 0)),
)


@dataclass(frozen=True)
class AtomSetAlgebra:
    atom_names: tuple

    def __post_init__(self):
        names = tuple(str(a) for a in self.atom_names)
        if not names:
            raise MalformedInput("a Boolean algebra needs at least one atom")
        if len(set(names)) != len(names):
            raise MalformedInput(f"duplicate atom names: {names}")
        object.__setattr__(self, "atom_names", names)

    @classmethod
    def of_size(cls, k: int) -> "AtomSetAlgebra":
        return cls(tuple(f"a{i}" for i in range(k)))

    @property
    def k(self) -> int:
        return len(self.atom_names)

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return (1 << self.k) - 1

    def __len__(self):
        return 1 << self.k

    def atom(self, name_or_index) -> int:
        if isinstance(name_or_index, str):
            return 1 << self.atom_names.index(name_or_index)
        return 1 << int(name_or_index)

    def atoms(self) -> list[int]:
        return [1 << i for i in range(self.k)]

    def join(self, x, y):
        return x | y

    def meet(self, x, y):
        return x & y

    def compl(self, x):
        return self.one & ~x

    def leq(self, x, y) -> bool:
        return x & y == x

    def check(self, x) -> int:
        if not 0 <= x <= self.one:
            raise MalformedInput(f"{x} is not an element of a {self.k}-atom algebra")
        return x

    def element_from_names(self, names: Sequence[str]) -> int:
        m = 0
        for n in names:
            if n not in self.atom_names:
                raise MalformedInput(f"unknown atom {n!r}")
            m |= self.atom(n)
        return m

    def names_of(self, x: int) -> list[str]:
        return [n for i, n in enumerate(self.atom_names) if x >> i & 1]


def export_structure(B: AtomSetAlgebra, budget=None) -> FiniteStructure:
    """Universe element ``x`` is the bitmask ``x`` itself."""
    cap = resolve(budget).max_atoms_export
    if B.k > cap:
        raise BudgetExceeded(f"export of a {B.k}-atom algebra exceeds cap of {cap} atoms",
                             code="atoms", limit=cap, needed=B.k)
    one = B.one
    return FiniteStructure(
        BA_SIGNATURE, one + 1, {},
        {"join": lambda x, y: x | y, "meet": lambda x, y: x & y,
         "compl": lambda x: one & ~x, "zero": lambda: 0, "one": lambda: one},
        name=f"BA{B.k}",
    )


def _cells(B: AtomSetAlgebra, t: Sequence[int]) -> list[int]:
    # cell w = meet over i of t_i (if bit i of w) or its complement
    one = B.one
    cells = [one]
    for i, x in enumerate(t):
        B.check(x)
        nx = one & ~x
        # bit i of the index decides the literal for t_i
        cells = [c & nx for c in cells] + [c & x for c in cells]
    return cells


def qftp_cells(B: AtomSetAlgebra, t: Sequence[int], budget=None) -> tuple:
    """Emptiness pattern of the full disjunctive normal form cells of ``t``.

    Entry ``w`` is ``True`` when the cell with positive literals at the set bits
    of ``w`` is nonempty.
    """
    limit = resolve(budget).max_tuple
    if len(t) > limit:
        raise BudgetExceeded(f"tuple length {len(t)} exceeds bound {limit}",
                             code="tuple-length", limit=limit, needed=len(t))
    return tuple(c != 0 for c in _cells(B, t))


def subalgebra_atoms(B: AtomSetAlgebra, gens: Sequence[int]) -> list[int]:
    return sorted(c for c in _cells(B, gens) if c)


def subalgebra_elements(B: AtomSetAlgebra, gens: Sequence[int]) -> list[int]:
    atoms = subalgebra_atoms(B, gens)
    out = set()
    for pick in product((0, 1), repeat=len(atoms)):
        m = 0
        for a, p in zip(atoms, pick):
            if p:
                m |= a
        out.add(m)
    return sorted(out)


def _surjections(k2: int, k1: int):
    """All maps range(k2) -> range(k1) that hit every value, lexicographic."""
    if k1 == 0:
        return
    grid = np.array(list(product(range(k1), repeat=k2)), dtype=np.int8).reshape(-1, k2)
    hits = np.ones(len(grid), dtype=bool)
    for v in range(k1):
        hits &= (grid == v).any(axis=1)
    for row in grid[hits]:
        yield tuple(int(x) for x in row)


def enumerate_ba_embeddings(B1: AtomSetAlgebra, B2: AtomSetAlgebra) -> list[tuple]:
    """Embeddings B1 -> B2 as full element maps, one per surjection atoms(B2) -> atoms(B1).

    Atom ``i`` of B1 goes to the join of the B2-atoms sent to ``i``. Each result
    lists the image of every mask ``0 .. 2**k1 - 1``; results are sorted.
    """
    k1, k2 = B1.k, B2.k
    if k1 > k2:
        return []
    out = []
    for s in _surjections(k2, k1):
        atom_img = [0] * k1
        for j, i in enumerate(s):
            atom_img[i] |= 1 << j
        mp = []
        for x in range(1 << k1):
            y = 0
            for i in range(k1):
                if x >> i & 1:
                    y |= atom_img[i]
            mp.append(y)
        out.append(tuple(mp))
    out.sort()
    return out


def automorphism_count(B: AtomSetAlgebra) -> int:
    return sum(1 for _ in permutations(range(B.k)))

"""Indexed families at the quantifier-free level.

A family assigns an ``l``-tuple of host elements to each index element. Index
tuples are compared by their fingerprint in the index structure, host data by
the fingerprint of the concatenated tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

from .budget import resolve
from .errors import BudgetExceeded, MalformedInput
from .structures import FiniteStructure, qftp_fingerprint


@dataclass(frozen=True)
class IndexedFamily:
    index: FiniteStructure
    host: FiniteStructure
    tuples: tuple
    width: int

    def __post_init__(self):
        tuples = tuple(tuple(int(x) for x in t) for t in self.tuples)
        object.__setattr__(self, "tuples", tuples)
        if len(tuples) != self.index.size:
            raise MalformedInput("need exactly one tuple per index element")
        for t in tuples:
            if len(t) != self.width:
                raise MalformedInput(f"tuple {t} does not have width {self.width}")
            if not all(0 <= x < self.host.size for x in t):
                raise MalformedInput(f"tuple {t} leaves the host universe")

    @classmethod
    def from_map(cls, index, host, mapping: Mapping, width=None):
        tuples = [tuple(mapping[i]) if isinstance(mapping[i], (tuple, list)) else (mapping[i],)
                  for i in range(index.size)]
        return cls(index, host, tuple(tuples), width if width is not None else len(tuples[0]))

    def at(self, itup):
        out = []
        for i in itup:
            out.extend(self.tuples[i])
        return tuple(out)

    def restrict(self, elements):
        """Family on the induced index substructure ``elements`` (must be closed)."""
        sub = self.index.induced(list(elements))
        return IndexedFamily(sub, self.host, tuple(self.tuples[i] for i in elements), self.width)


def _check_budget(fam: IndexedFamily, n_max, budget):
    b = resolve(budget)
    if n_max > b.max_tuple:
        raise BudgetExceeded(f"index tuple length {n_max} exceeds bound {b.max_tuple}",
                             code="tuple-length", limit=b.max_tuple, needed=n_max)
    host_len = n_max * fam.width
    # host tuples are l times longer; allow them explicitly
    return b.with_(max_tuple=max(b.max_tuple, host_len))


def _index_tuples(index: FiniteStructure, n_max):
    for n in range(1, n_max + 1):
        yield from product(range(index.size), repeat=n)


def qf_indiscernible_check(fam: IndexedFamily, n_max: int, budget=None) -> dict:
    hb = _check_budget(fam, n_max, budget)
    seen = {}
    checked = 0
    for it in _index_tuples(fam.index, n_max):
        checked += 1
        key = qftp_fingerprint(fam.index, it, budget)
        hfp = qftp_fingerprint(fam.host, fam.at(it), hb)
        first = seen.get(key)
        if first is None:
            seen[key] = (it, hfp)
        elif first[1] != hfp:
            return {"passed": False, "counterexample": (first[0], it), "checked": checked}
    return {"passed": True, "counterexample": None, "checked": checked, "classes": len(seen)}


def atomic_locally_based_check(X: IndexedFamily, Y: IndexedFamily, n_max: int, budget=None) -> dict:
    """Every pattern Y shows on an index tuple must be shown by X on a tuple of the same index type."""
    if X.index != Y.index:
        raise MalformedInput("families must share the index structure")
    if X.width != Y.width:
        raise MalformedInput("families must have the same width")
    if X.host.sig != Y.host.sig:
        raise MalformedInput("hosts must share a signature")
    hb = _check_budget(X, n_max, budget)
    realized = {}
    for it in _index_tuples(X.index, n_max):
        key = qftp_fingerprint(X.index, it, budget)
        realized.setdefault(key, set()).add(qftp_fingerprint(X.host, X.at(it), hb))
    checked = 0
    for jt in _index_tuples(Y.index, n_max):
        checked += 1
        key = qftp_fingerprint(Y.index, jt, budget)
        if qftp_fingerprint(Y.host, Y.at(jt), hb) not in realized.get(key, ()):
            return {"passed": False, "counterexample": jt, "checked": checked}
    return {"passed": True, "counterexample": None, "checked": checked}


def atomic_facts(M: FiniteStructure, t):
    """Atomic relational facts and term-free equalities of ``t`` as a frozenset of literals."""
    n = len(t)
    facts = set()
    for i in range(n):
        for j in range(n):
            facts.add(("=", i, j, t[i] == t[j]))
    for rname, arity in M.sig.relations:
        for pos in product(range(n), repeat=arity):
            facts.add((rname, pos, M.holds(rname, tuple(t[p] for p in pos))))
    return frozenset(facts)

"""Finite first-order structures, quantifier-free types, embeddings.

Universes are always ``range(n)``. Relation tables are frozensets of tuples,
function tables are dicts from argument tuples to values. Structures are
treated as immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .budget import resolve
from .errors import BudgetExceeded, MalformedInput, SignatureMismatch


@dataclass(frozen=True)
class Signature:
    relations: tuple = ()
    functions: tuple = ()

    def __post_init__(self):
        rels = tuple((str(n), int(a)) for n, a in self.relations)
        funs = tuple((str(n), int(a)) for n, a in self.functions)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "functions", funs)
        names = [n for n, _ in rels] + [n for n, _ in funs]
        if len(set(names)) != len(names):
            raise MalformedInput(f"duplicate symbol names in signature: {names}")
        for n, a in rels:
            if a < 1:
                raise MalformedInput(f"relation {n!r} must have positive arity, got {a}")
        for n, a in funs:
            if a < 0:
                raise MalformedInput(f"function {n!r} has negative arity {a}")

    @property
    def is_relational(self):
        return not self.functions

    @property
    def max_arity(self):
        arities = [a for _, a in self.relations] + [a for _, a in self.functions]
        return max(arities, default=0)

    def check_arity(self, budget=None):
        limit = resolve(budget).max_arity
        if self.max_arity > limit:
            raise BudgetExceeded(
                f"signature arity {self.max_arity} exceeds bound {limit}",
                code="arity", limit=limit, needed=self.max_arity,
            )

    def reduct(self, relations=(), functions=()):
        keep_r, keep_f = set(relations), set(functions)
        return Signature(
            tuple(p for p in self.relations if p[0] in keep_r),
            tuple(p for p in self.functions if p[0] in keep_f),
        )

    def as_dict(self):
        return {"relations": [list(p) for p in self.relations],
                "functions": [list(p) for p in self.functions]}


class FiniteStructure:
    """A finite structure over ``range(size)``, closed under its functions."""

    __slots__ = ("sig", "size", "rel_tables", "fun_tables", "name", "_hash", "_arrays")

    def __init__(self, sig: Signature, size: int, relations=None, functions=None,
                 name: str | None = None, budget=None):
        relations = dict(relations or {})
        functions = dict(functions or {})
        if size < 1:
            raise MalformedInput(f"universe size must be positive, got {size}")
        sig.check_arity(budget)
        rel_tables = {}
        for rname, arity in sig.relations:
            tuples = frozenset(tuple(int(x) for x in t) for t in relations.pop(rname, ()))
            for t in tuples:
                if len(t) != arity or not all(0 <= x < size for x in t):
                    raise MalformedInput(f"bad tuple {t} for relation {rname!r}/{arity}")
            rel_tables[rname] = tuples
        fun_tables = {}
        for fname, arity in sig.functions:
            if fname not in functions:
                raise MalformedInput(f"missing table for function {fname!r}")
            spec = functions.pop(fname)
            table = {}
            for args in product(range(size), repeat=arity):
                if callable(spec):
                    val = spec(*args)
                else:
                    try:
                        val = spec[args]
                    except KeyError:
                        raise MalformedInput(
                            f"function {fname!r} is not total: no value at {args}"
                        ) from None
                val = int(val)
                if not 0 <= val < size:
                    raise MalformedInput(f"function {fname!r} leaves the universe at {args}: {val}")
                table[args] = val
            fun_tables[fname] = MappingProxyType(table)
        if relations or functions:
            raise MalformedInput(
                f"tables for undeclared symbols: {sorted(relations) + sorted(functions)}"
            )
        self.sig = sig
        self.size = size
        self.rel_tables = MappingProxyType(rel_tables)
        self.fun_tables = MappingProxyType(fun_tables)
        self.name = name
        self._hash = None
        self._arrays = None

    def __repr__(self):
        label = self.name or "FiniteStructure"
        return f"<{label} n={self.size} rel={[r for r, _ in self.sig.relations]} fun={[f for f, _ in self.sig.functions]}>"

    def _key(self):
        return (self.sig, self.size,
                tuple(sorted(self.rel_tables[r]) for r, _ in self.sig.relations),
                tuple(tuple(sorted(self.fun_tables[f].items())) for f, _ in self.sig.functions))

    def __eq__(self, other):
        return isinstance(other, FiniteStructure) and self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    @property
    def universe(self):
        return range(self.size)

    def holds(self, rel: str, tup) -> bool:
        return tuple(tup) in self.rel_tables[rel]

    def apply(self, fun: str, *args) -> int:
        return self.fun_tables[fun][args]

    def fun_arrays(self):
        """Function tables as dense numpy arrays, in signature order (cached)."""
        if self._arrays is None:
            arrs = []
            for fname, arity in self.sig.functions:
                tab = self.fun_tables[fname]
                a = np.empty((self.size,) * arity, dtype=np.int64)
                for args, v in tab.items():
                    a[args] = v
                arrs.append(a)
            self._arrays = tuple(arrs)
        return self._arrays

    def relabel(self, perm: Sequence[int]) -> "FiniteStructure":
        """Isomorphic copy where old element ``x`` becomes ``perm[x]``."""
        if sorted(perm) != list(range(self.size)):
            raise MalformedInput("relabel needs a permutation of the universe")
        inv = [0] * self.size
        for x, y in enumerate(perm):
            inv[y] = x
        rels = {r: [tuple(perm[x] for x in t) for t in tab] for r, tab in self.rel_tables.items()}
        funs = {
            f: {tuple(perm[x] for x in args): perm[v] for args, v in tab.items()}
            for f, tab in self.fun_tables.items()
        }
        return FiniteStructure(self.sig, self.size, rels, funs, name=self.name)

    def reduct(self, relations=(), functions=()) -> "FiniteStructure":
        sig = self.sig.reduct(relations, functions)
        return FiniteStructure(
            sig, self.size,
            {r: self.rel_tables[r] for r, _ in sig.relations},
            {f: dict(self.fun_tables[f]) for f, _ in sig.functions},
            name=self.name,
        )

    def induced(self, elements: Sequence[int]) -> "FiniteStructure":
        """Substructure on ``elements`` (must be closed), relabelled in the given order."""
        index = {x: i for i, x in enumerate(elements)}
        if len(index) != len(elements):
            raise MalformedInput("induced substructure needs distinct elements")
        rels = {
            r: [tuple(index[x] for x in t) for t in tab if all(x in index for x in t)]
            for r, tab in self.rel_tables.items()
        }
        funs = {}
        for f, arity in self.sig.functions:
            tab = self.fun_tables[f]
            out = {}
            for args in product(elements, repeat=arity):
                v = tab[args]
                if v not in index:
                    raise MalformedInput(f"element set is not closed under {f!r}")
                out[tuple(index[x] for x in args)] = index[v]
            funs[f] = out
        return FiniteStructure(self.sig, len(elements), rels, funs)


def same_signature(*structs: FiniteStructure):
    sig = structs[0].sig
    for s in structs[1:]:
        if s.sig != sig:
            raise SignatureMismatch(f"signatures differ: {sig} vs {s.sig}")


@dataclass(frozen=True)
class Embedding:
    source: FiniteStructure
    target: FiniteStructure
    map: tuple

    def __call__(self, x):
        return self.map[x]

    @property
    def image(self):
        return tuple(sorted(self.map))

    def compose(self, inner: "Embedding") -> "Embedding":
        """``self ∘ inner``."""
        return Embedding(inner.source, self.target, tuple(self.map[x] for x in inner.map))


def is_embedding(A: FiniteStructure, C: FiniteStructure, mapping: Sequence[int]) -> bool:
    """Direct check: injective, relations preserved and reflected, functions commute."""
    if len(mapping) != A.size or len(set(mapping)) != A.size:
        return False
    if not all(0 <= y < C.size for y in mapping):
        return False
    for rname, arity in A.sig.relations:
        a_tab, c_tab = A.rel_tables[rname], C.rel_tables[rname]
        for t in product(range(A.size), repeat=arity):
            if (t in a_tab) != (tuple(mapping[x] for x in t) in c_tab):
                return False
    for fname, _ in A.sig.functions:
        c_tab = C.fun_tables[fname]
        for args, v in A.fun_tables[fname].items():
            if c_tab[tuple(mapping[x] for x in args)] != mapping[v]:
                return False
    return True


# ---------------------------------------------------------------- closure

def _outer_mask(L: int, frontier: int, arity: int):
    """Boolean array over local argument tuples that touch an index >= frontier."""
    fresh = np.arange(L) >= frontier
    mask = np.zeros((L,) * arity, dtype=bool)
    for axis in range(arity):
        shape = [1] * arity
        shape[axis] = L
        mask |= fresh.reshape(shape)
    return mask


def _closure(M: FiniteStructure, gens: Sequence[int]):
    """Term-discovery closure. Returns (local_order, index, generator_map).

    Local indices: distinct generators first (in order of first occurrence),
    then new values found by sweeping function symbols in signature order and
    argument tuples in lexicographic order of local indices, round by round.
    Each round only visits argument tuples touching an element found in the
    previous round.
    """
    order: list[int] = []
    index: dict[int, int] = {}
    gmap = []
    for x in gens:
        if not 0 <= x < M.size:
            raise MalformedInput(f"element {x} outside universe of size {M.size}")
        if x not in index:
            index[x] = len(order)
            order.append(x)
        gmap.append(index[x])
    if not M.sig.functions:
        return order, index, tuple(gmap)
    funs = list(zip(M.fun_arrays(), (a for _, a in M.sig.functions)))
    frontier = 0
    first_round = True
    while True:
        size = len(order)
        for arr, arity in funs:
            if arity == 0:
                if first_round:
                    v = int(arr[()])
                    if v not in index:
                        index[v] = len(order)
                        order.append(v)
                continue
            L = len(order)
            o = np.asarray(order)
            sub = arr[np.ix_(*([o] * arity))]
            vals = sub[_outer_mask(L, frontier, arity)] if frontier else sub.ravel()
            uniq, first = np.unique(vals, return_index=True)
            for v in uniq[np.argsort(first, kind="stable")].tolist():
                if v not in index:
                    index[v] = len(order)
                    order.append(v)
        first_round = False
        if len(order) == size:
            break
        frontier = size
    return order, index, tuple(gmap)


def generated_substructure(M: FiniteStructure, gens: Sequence[int]):
    """Substructure generated by ``gens`` in term-discovery order, with its inclusion."""
    order, _, _ = _closure(M, gens)
    if not order:
        raise MalformedInput("empty generator tuple generates the empty structure (no constants)")
    sub = M.induced(order)
    return sub, Embedding(sub, M, tuple(order))


def closure_set(M: FiniteStructure, gens: Iterable[int]) -> frozenset:
    order, _, _ = _closure(M, list(gens))
    return frozenset(order)


@dataclass(frozen=True)
class QfFingerprint:
    """Canonical code of ``<gens>`` with marked generators.

    Equal fingerprints (same signature) mean equal quantifier-free types.
    """

    generator_count: int
    local_size: int
    generator_map: tuple
    local_fun_tables: tuple
    local_rel_tables: tuple

    def code(self) -> tuple:
        """Flat integer sequence; comparable bytewise."""
        out = [self.generator_count, self.local_size, *self.generator_map]
        for tab in self.local_fun_tables:
            out.append(len(tab))
            out.extend(tab)
        for tab in self.local_rel_tables:
            out.append(len(tab))
            for t in tab:
                out.extend(t)
        return tuple(out)

    def to_bytes(self) -> bytes:
        return b"".join(x.to_bytes(4, "big") for x in self.code())


def qftp_fingerprint(M: FiniteStructure, t: Sequence[int], budget=None) -> QfFingerprint:
    limit = resolve(budget).max_tuple
    if len(t) > limit:
        raise BudgetExceeded(
            f"tuple length {len(t)} exceeds fingerprint bound {limit}",
            code="tuple-length", limit=limit, needed=len(t),
        )
    order, index, gmap = _closure(M, t)
    L = len(order)
    fun_codes = []
    if M.sig.functions:
        o = np.asarray(order)
        local = np.full(M.size, -1, dtype=np.int64)
        local[o] = np.arange(L)
        for arr, (_, arity) in zip(M.fun_arrays(), M.sig.functions):
            fun_codes.append(tuple(local[arr[np.ix_(*([o] * arity))]].ravel().tolist()))
    rel_codes = []
    for rname, arity in M.sig.relations:
        tab = M.rel_tables[rname]
        if len(tab) <= L ** arity:
            local = sorted(tuple(index[x] for x in tup) for tup in tab
                           if all(x in index for x in tup))
        else:
            local = [loc for loc in product(range(L), repeat=arity)
                     if tuple(order[i] for i in loc) in tab]
        rel_codes.append(tuple(local))
    return QfFingerprint(len(t), L, gmap, tuple(fun_codes), tuple(rel_codes))


def same_qftp(M: FiniteStructure, s, N: FiniteStructure, t, budget=None) -> bool:
    same_signature(M, N)
    return len(s) == len(t) and qftp_fingerprint(M, s, budget) == qftp_fingerprint(N, t, budget)


# ---------------------------------------------------------------- embeddings

class _EmbeddingPlan:
    """Assignment order and per-step checks for backtracking over ``A``.

    Free steps take the smallest unplaced element; after each one, every
    element that a function application on placed elements produces is placed
    next as a forced step. Every element below a free one is placed before it,
    so embeddings still come out in lexicographic order of the full map.
    Each constraint is attached to the step that completes it.
    """

    def __init__(self, A: FiniteStructure):
        n = A.size
        entries = [(fname, args, v) for fname, _ in A.sig.functions
                   for args, v in A.fun_tables[fname].items()]
        pos = [-1] * n
        self.order = []
        self.forced = []

        def place(x, how):
            pos[x] = len(self.order)
            self.order.append(x)
            self.forced.append(how)

        pending = entries
        while len(self.order) < n:
            if self.order or not any(not args for _, args, _ in pending):
                place(next(x for x in range(n) if pos[x] < 0), None)
            changed = True
            while changed:
                changed = False
                rest = []
                for fname, args, v in pending:
                    if all(pos[a] >= 0 for a in args):
                        if pos[v] < 0:
                            place(v, (fname, args))
                            changed = True
                    else:
                        rest.append((fname, args, v))
                pending = rest
        self.rel_checks = [[] for _ in range(n)]
        self.fun_checks = [[] for _ in range(n)]
        for rname, arity in A.sig.relations:
            tab = A.rel_tables[rname]
            for t in product(range(n), repeat=arity):
                self.rel_checks[max(pos[x] for x in t)].append((rname, t, t in tab))
        for fname, args, v in entries:
            self.fun_checks[max(pos[x] for x in (*args, v))].append((fname, args, v))


def iter_embeddings(A: FiniteStructure, C: FiniteStructure, fixed: Mapping[int, int] | None = None,
                    budget=None) -> Iterator[tuple]:
    """Yield embedding maps (tuples) A -> C in lexicographic order."""
    same_signature(A, C)
    fixed = dict(fixed or {})
    n, m = A.size, C.size
    if n > m:
        return
    plan = _EmbeddingPlan(A)
    ctabs = C.rel_tables
    cfuns = C.fun_tables
    assign = [-1] * n
    used = [False] * m

    def ok(i):
        for rname, t, expected in plan.rel_checks[i]:
            if (tuple(assign[x] for x in t) in ctabs[rname]) != expected:
                return False
        for fname, args, v in plan.fun_checks[i]:
            if cfuns[fname][tuple(assign[x] for x in args)] != assign[v]:
                return False
        return True

    def rec(i):
        if i == n:
            yield tuple(assign)
            return
        x = plan.order[i]
        how = plan.forced[i]
        if how is not None:
            fname, args = how
            cands = [cfuns[fname][tuple(assign[a] for a in args)]]
            if x in fixed and fixed[x] != cands[0]:
                return
        elif x in fixed:
            cands = [fixed[x]]
        else:
            cands = range(m)
        for y in cands:
            if used[y]:
                continue
            assign[x] = y
            if ok(i):
                used[y] = True
                yield from rec(i + 1)
                used[y] = False
        assign[x] = -1

    yield from rec(0)


def enumerate_embeddings(A: FiniteStructure, C: FiniteStructure, fixed=None, limit=None,
                         budget=None) -> list[Embedding]:
    out = []
    for mp in iter_embeddings(A, C, fixed, budget):
        out.append(Embedding(A, C, mp))
        if limit is not None and len(out) >= limit:
            break
    return out


def count_embeddings(A, C, fixed=None) -> int:
    return sum(1 for _ in iter_embeddings(A, C, fixed))


def is_isomorphic(A: FiniteStructure, B: FiniteStructure) -> bool:
    if A.sig != B.sig or A.size != B.size:
        return False
    return next(iter_embeddings(A, B), None) is not None


def enumerate_copies(A: FiniteStructure, C: FiniteStructure) -> list[tuple]:
    """Image sets of embeddings A -> C, deduplicated, sorted."""
    seen = set()
    for mp in iter_embeddings(A, C):
        seen.add(tuple(sorted(mp)))
    return sorted(seen)


@dataclass(frozen=True)
class AutomorphismGroup:
    generators: tuple
    order: int

    @property
    def is_rigid(self):
        return self.order == 1


def _group_closure(gens, n):
    ident = tuple(range(n))
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[x] for x in p)
                if q not in elems:
                    elems.add(q)
                    nxt.append(q)
        frontier = nxt
    return elems


def automorphism_group(A: FiniteStructure) -> AutomorphismGroup:
    auts = list(iter_embeddings(A, A))
    gens = []
    group = {tuple(range(A.size))}
    for p in auts:
        if p not in group:
            gens.append(p)
            group = _group_closure(gens, A.size)
    if len(group) != len(auts):
        raise AssertionError("generated group does not match enumerated automorphisms")
    return AutomorphismGroup(tuple(gens), len(auts))


def age_enumerate(M: FiniteStructure, k: int, budget=None) -> list[FiniteStructure]:
    """One representative per isomorphism class of substructures generated by <= k elements.

    Representatives come from the first generating set found (smaller sets
    first, then lexicographic). Dedup is an isomorphism test within buckets of
    equal size and equal relation/table statistics.
    """
    if k < 1:
        raise MalformedInput("k must be at least 1")
    cap = resolve(budget).age_candidates
    reps: list[FiniteStructure] = []
    buckets: dict[tuple, list[FiniteStructure]] = {}
    seen_sets = set()
    examined = 0
    for size in range(1, min(k, M.size) + 1):
        for gens in combinations(range(M.size), size):
            examined += 1
            if examined > cap:
                raise BudgetExceeded(f"age enumeration examined more than {cap} candidates",
                                     code="age-candidates", limit=cap)
            order, _, _ = _closure(M, gens)
            key_set = frozenset(order)
            if key_set in seen_sets:
                continue
            seen_sets.add(key_set)
            sub = M.induced(sorted(order))
            inv = (sub.size, tuple(len(sub.rel_tables[r]) for r, _ in sub.sig.relations))
            bucket = buckets.setdefault(inv, [])
            if any(is_isomorphic(sub, other) for other in bucket):
                continue
            bucket.append(sub)
            reps.append(sub)
    return reps


def injective_tuples(universe: Iterable[int], max_len: int, min_len: int = 1):
    items = list(universe)
    for n in range(min_len, max_len + 1):
        yield from permutations(items, n)

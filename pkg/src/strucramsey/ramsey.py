"""Partition arrows by bad-coloring search, witness validation, degree evidence.

``C -> (B)^A_{r,d}`` fails exactly when some ``r``-coloring of the copies of
``A`` in ``C`` (or of ``Emb(A, C)`` in embedding mode) makes every copy of
``B`` (every ``h`` in ``Emb(B, C)``) see at least ``d + 1`` colors. The search
below looks for such a coloring.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .budget import resolve
from .errors import BudgetExceeded, DegenerateInput, MalformedInput
from .structures import FiniteStructure, automorphism_group, iter_embeddings, same_signature

MODES = ("substructure", "embedding")


@dataclass(frozen=True)
class ArrowQuery:
    C: FiniteStructure
    B: FiniteStructure
    A: FiniteStructure
    r: int = 2
    d: int = 1
    mode: str = "substructure"

    def __post_init__(self):
        same_signature(self.A, self.B, self.C)
        if self.r < 2:
            raise MalformedInput(f"need r >= 2, got {self.r}")
        if self.d < 1:
            raise MalformedInput(f"need d >= 1, got {self.d}")
        if self.mode not in MODES:
            raise MalformedInput(f"mode must be one of {MODES}")

    def with_(self, **kw):
        vals = dict(C=self.C, B=self.B, A=self.A, r=self.r, d=self.d, mode=self.mode)
        vals.update(kw)
        return ArrowQuery(**vals)


@dataclass
class Coloring:
    mode: str
    domain: list
    colors: tuple

    def color_of(self):
        return dict(zip(self.domain, self.colors))

    def as_dict(self):
        return {"mode": self.mode, "domain": [list(x) for x in self.domain], "colors": list(self.colors)}


@dataclass
class ArrowVerdict:
    holds: bool
    witness: Coloring | None = None
    reason: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def degenerate(self):
        return self.reason == "no host copy of B"

    def as_dict(self):
        return {"holds": self.holds, "reason": self.reason,
                "witness": self.witness.as_dict() if self.witness else None, "stats": self.stats}


# ------------------------------------------------------------------ instance

def arrow_domain(A, C, mode) -> list:
    if mode == "embedding":
        return list(iter_embeddings(A, C))
    return sorted({tuple(sorted(e)) for e in iter_embeddings(A, C)})


def _host_views(q: ArrowQuery):
    """One entry per copy of B (substructure) or per embedding of B (embedding)."""
    seen = set()
    for h in iter_embeddings(q.B, q.C):
        if q.mode == "substructure":
            key = tuple(sorted(h))
            if key in seen:
                continue
            seen.add(key)
        yield h


def build_instance(q: ArrowQuery, budget=None):
    """Domain and the constraint sets (as index tuples), minimal under inclusion."""
    budget = resolve(budget)
    domain = arrow_domain(q.A, q.C, q.mode)
    if len(domain) > budget.arrow_domain:
        raise BudgetExceeded(f"arrow domain has {len(domain)} elements, cap is {budget.arrow_domain}",
                             code="arrow-domain", limit=budget.arrow_domain, needed=len(domain))
    index = {x: i for i, x in enumerate(domain)}
    inner = list(iter_embeddings(q.A, q.B))
    raw = set()
    n_views = 0
    for h in _host_views(q):
        n_views += 1
        if q.mode == "embedding":
            S = frozenset(index[tuple(h[x] for x in e)] for e in inner)
        else:
            S = frozenset(index[tuple(sorted(h[x] for x in e))] for e in inner)
        raw.add(S)
    cons = sorted(raw, key=lambda s: (len(s), sorted(s)))
    minimal = []
    for S in cons:
        if not any(T <= S for T in minimal):
            minimal.append(S)
    return domain, [tuple(sorted(S)) for S in minimal], n_views


# ------------------------------------------------------------------ search

def _order_vars(N, cons):
    """Greedy static order: pick the variable sharing most constraints with those placed."""
    var_cons = [[] for _ in range(N)]
    for ci, S in enumerate(cons):
        for v in S:
            var_cons[v].append(ci)
    placed = [False] * N
    placed_in = [0] * len(cons)
    order = []
    for _ in range(N):
        best, best_key = -1, None
        for v in range(N):
            if placed[v]:
                continue
            key = (sum(placed_in[c] for c in var_cons[v]), len(var_cons[v]), -v)
            if best_key is None or key > best_key:
                best, best_key = v, key
        placed[best] = True
        order.append(best)
        for c in var_cons[best]:
            placed_in[c] += 1
    return order, var_cons


def search_bad_coloring(N, cons, r, d, max_nodes):
    """Backtracking with color-symmetry breaking. Returns (colors or None, nodes)."""
    need = d + 1
    order, var_cons = _order_vars(N, cons)
    cnt = [[0] * r for _ in cons]
    distinct = [0] * len(cons)
    unassigned = [len(S) for S in cons]
    colors = [-1] * N
    nodes = 0

    def assign(v, col):
        ok = True
        for c in var_cons[v]:
            unassigned[c] -= 1
            if cnt[c][col] == 0:
                distinct[c] += 1
            cnt[c][col] += 1
            if distinct[c] + min(unassigned[c], r - distinct[c]) < need:
                ok = False
        colors[v] = col
        return ok

    def unassign(v, col):
        for c in var_cons[v]:
            unassigned[c] += 1
            cnt[c][col] -= 1
            if cnt[c][col] == 0:
                distinct[c] -= 1
        colors[v] = -1

    # explicit stack: (position, candidate list, index into it, max color used before)
    def candidates(v, max_used):
        top = min(r - 1, max_used + 1)
        cands = list(range(top + 1))
        # colors missing from more of v's open constraints first
        cands.sort(key=lambda col: -sum(1 for c in var_cons[v] if cnt[c][col] == 0 and distinct[c] < need))
        return cands

    if N == 0:
        return (None if cons else []), 0
    stack = [(0, candidates(order[0], -1), 0, -1)]
    while stack:
        pos, cands, ci, max_used = stack[-1]
        v = order[pos]
        if colors[v] >= 0:
            unassign(v, colors[v])
        if ci >= len(cands):
            stack.pop()
            continue
        col = cands[ci]
        stack[-1] = (pos, cands, ci + 1, max_used)
        nodes += 1
        if nodes > max_nodes:
            raise BudgetExceeded(f"search exceeded {max_nodes} nodes", code="nodes",
                                 limit=max_nodes, needed=nodes)
        if not assign(v, col):
            continue
        if pos + 1 == N:
            return list(colors), nodes
        nxt_max = max(max_used, col)
        stack.append((pos + 1, candidates(order[pos + 1], nxt_max), 0, nxt_max))
    return None, nodes


def exhaustive_bad_colorings(N, cons, r, d, budget=None, find_all=False, chunk=1 << 16):
    """Vectorized sweep over all ``r**N`` colorings. Returns the bad ones (or the first)."""
    cap = resolve(budget).exhaustive_domain
    if N > cap:
        raise BudgetExceeded(f"exhaustive sweep over {N} positions exceeds cap {cap}",
                             code="exhaustive-domain", limit=cap, needed=N)
    total = r ** N
    weights = r ** np.arange(N, dtype=np.int64)
    found = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        cols = (idx[:, None] // weights[None, :]) % r
        bad = np.ones(len(idx), dtype=bool)
        for S in cons:
            sub = cols[:, list(S)]
            seen = np.zeros(len(idx), dtype=np.int64)
            for col in range(r):
                seen += (sub == col).any(axis=1)
            bad &= seen >= d + 1
            if not bad.any():
                break
        hits = cols[bad]
        if len(hits):
            found.extend(tuple(int(x) for x in row) for row in hits)
            if not find_all:
                return found[:1]
    return found


def check_arrow(q: ArrowQuery, budget=None, method: str = "search") -> ArrowVerdict:
    budget = resolve(budget)
    t0 = time.perf_counter()
    domain, cons, n_views = build_instance(q, budget)
    stats = {"domain_size": len(domain), "constraints": len(cons), "host_views": n_views,
             "nodes": 0, "method": method}
    if n_views == 0:
        stats["seconds"] = time.perf_counter() - t0
        return ArrowVerdict(False, None, "no host copy of B", stats)
    if q.r < q.d + 1:
        stats["seconds"] = time.perf_counter() - t0
        return ArrowVerdict(True, None, "fewer than d+1 colors available", stats)
    if min(len(S) for S in cons) < q.d + 1:
        stats["seconds"] = time.perf_counter() - t0
        return ArrowVerdict(True, None, "some copy of B has at most d copies of A", stats)
    if method == "exhaustive":
        hits = exhaustive_bad_colorings(len(domain), cons, q.r, q.d, budget)
        cols = list(hits[0]) if hits else None
    else:
        cols, stats["nodes"] = search_bad_coloring(len(domain), cons, q.r, q.d, budget.max_nodes)
    stats["seconds"] = time.perf_counter() - t0
    if cols is None:
        return ArrowVerdict(True, None, "no bad coloring", stats)
    return ArrowVerdict(False, Coloring(q.mode, domain, tuple(cols)), "bad coloring found", stats)


def validate_witness(q: ArrowQuery, c: Coloring) -> bool:
    """Recount from scratch: every copy / embedding of B must see at least d+1 colors."""
    if c.mode != q.mode:
        raise MalformedInput("coloring mode does not match query mode")
    expected = set()
    for e in iter_embeddings(q.A, q.C):
        expected.add(tuple(e) if q.mode == "embedding" else tuple(sorted(e)))
    if set(map(tuple, c.domain)) != expected or len(c.domain) != len(c.colors):
        raise MalformedInput("coloring domain does not match the query")
    if any(not 0 <= col < q.r for col in c.colors):
        return False
    color = dict(zip(map(tuple, c.domain), c.colors))
    inner = list(iter_embeddings(q.A, q.B))
    any_view = False
    for h in iter_embeddings(q.B, q.C):
        any_view = True
        seen = set()
        for e in inner:
            img = tuple(h[x] for x in e)
            seen.add(color[img if q.mode == "embedding" else tuple(sorted(img))])
        if len(seen) < q.d + 1:
            return False
    return any_view


def orientation_coloring(A: FiniteStructure, C: FiniteStructure) -> Coloring:
    """Color an embedding of a 2-element structure 0 if it increases, 1 if it decreases."""
    if A.size != 2:
        raise MalformedInput("orientation coloring needs a 2-element structure")
    dom = arrow_domain(A, C, "embedding")
    return Coloring("embedding", dom, tuple(0 if e[0] < e[1] else 1 for e in dom))


# ------------------------------------------------------------------ degrees

def minimal_d(q: ArrowQuery, budget=None, d_max=None):
    """Smallest d for which the arrow holds, with the refuting witness at d - 1."""
    domain, cons, n_views = build_instance(q, budget)
    if n_views == 0:
        raise DegenerateInput("no host copy of B")
    top = min(len(S) for S in cons) if cons else 1
    d_max = top if d_max is None else min(d_max, top)
    prev = None
    for d in range(1, d_max + 1):
        v = check_arrow(q.with_(d=d), budget)
        if v.holds:
            return d, prev, v
        prev = v
    return None, prev, None


def two_degrees_check(A, B, C, r: int = 2, budget=None) -> dict:
    """Minimal d for copies and for embeddings on one instance, against |Aut(A)|."""
    d_sub, w_sub, _ = minimal_d(ArrowQuery(C, B, A, r, 1, "substructure"), budget)
    d_emb, w_emb, _ = minimal_d(ArrowQuery(C, B, A, r, 1, "embedding"), budget)
    aut = automorphism_group(A).order
    chain_ok = d_sub is not None and d_emb is not None and d_sub <= d_emb <= aut * d_sub
    return {
        "d_sub": d_sub, "d_emb": d_emb, "aut_order": aut,
        "inequality_holds": chain_ok,
        "emb_equals_aut_times_sub": d_emb == aut * d_sub if chain_ok else None,
        "sub_refutation": w_sub.witness if w_sub else None,
        "emb_refutation": w_emb.witness if w_emb else None,
    }


def degree_evidence(A, B_pool: Sequence, C_pool: Sequence, r_max: int = 2,
                    mode: str = "substructure", budget=None) -> dict:
    """Minimal d reached within the pool for each (B, r).

    This is evidence from the supplied pool only. Arrows get easier as C grows,
    so a pool that never reaches some d says nothing about larger hosts.
    """
    if not B_pool or not C_pool:
        raise MalformedInput("pools must be nonempty")
    cells = []
    for bi, B in enumerate(B_pool):
        for r in range(2, r_max + 1):
            best = None
            flags = []
            for ci, C in enumerate(C_pool):
                try:
                    d, refute, _ = minimal_d(ArrowQuery(C, B, A, r, 1, mode), budget)
                except DegenerateInput:
                    flags.append({"C": ci, "flag": "no host copy of B"})
                    continue
                except BudgetExceeded as exc:
                    flags.append({"C": ci, "flag": "budget", "code": exc.code})
                    continue
                if d is not None and (best is None or d < best["d"]):
                    best = {"d": d, "C": ci, "C_name": getattr(C, "name", None),
                            "refutation_below": refute.witness if refute else None}
            cells.append({"B": bi, "r": r, "min_d": best["d"] if best else None,
                          "achieved_at": best, "flags": flags})
    reached = [c["min_d"] for c in cells if c["min_d"] is not None]
    return {"mode": mode, "cells": cells,
            "pool_lower_bound": max(reached) if reached else None,
            "scope": "supplied pools only"}

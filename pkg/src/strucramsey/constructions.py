"""Concrete finite structures and semi-retraction fragments.

Chains, graphs, hypergraphs, convexly ordered equivalence relations and
trees, plus the two Boolean algebra encodings and the ready-made witness
pairs used across the test suite and the narrative scripts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product

from .boolalg import AtomSetAlgebra, export_structure
from .budget import resolve
from .errors import BudgetExceeded, MalformedInput
from .semiretraction import CrossMap, SemiRetractionWitness
from .structures import FiniteStructure, Signature

ORDER_SIG = Signature((("<", 2),))
GRAPH_SIG = Signature((("R", 2),))
SET_SIG = Signature()


def _cap(n, budget, what):
    limit = resolve(budget).max_universe
    if n > limit:
        raise BudgetExceeded(f"{what} needs {n} elements, cap is {limit}",
                             code="universe", limit=limit, needed=n)


def make_chain(n: int, budget=None) -> FiniteStructure:
    _cap(n, budget, "chain")
    return FiniteStructure(ORDER_SIG, n, {"<": list(combinations(range(n), 2))}, name=f"chain{n}")


def make_set(n: int) -> FiniteStructure:
    return FiniteStructure(SET_SIG, n, name=f"set{n}")


@dataclass(frozen=True)
class GraphSpec:
    m: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        es = set()
        for e in self.edges:
            a, b = tuple(e)
            if a == b:
                raise MalformedInput(f"loop at {a}")
            if not (0 <= a < self.m and 0 <= b < self.m):
                raise MalformedInput(f"edge {e} outside 0..{self.m - 1}")
            es.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(es))

    def adjacent(self, a, b):
        return (min(a, b), max(a, b)) in self.edges

    @classmethod
    def complete(cls, m):
        return cls(m, frozenset(combinations(range(m), 2)))

    @classmethod
    def path(cls, m):
        return cls(m, frozenset((i, i + 1) for i in range(m - 1)))


def make_graph(spec: GraphSpec, budget=None) -> FiniteStructure:
    _cap(spec.m, budget, "graph")
    rel = [(a, b) for a, b in spec.edges] + [(b, a) for a, b in spec.edges]
    return FiniteStructure(GRAPH_SIG, spec.m, {"R": rel})


def make_complete_graph(n):
    s = make_graph(GraphSpec.complete(n))
    s.name = f"K{n}"
    return s


def make_ordered_graph(spec: GraphSpec) -> FiniteStructure:
    sig = Signature((("R", 2), ("<", 2)))
    rel = [(a, b) for a, b in spec.edges] + [(b, a) for a, b in spec.edges]
    return FiniteStructure(sig, spec.m, {"R": rel, "<": list(combinations(range(spec.m), 2))})


def all_graphs(m: int) -> list[GraphSpec]:
    """One labelled representative per isomorphism class of graphs on ``m`` vertices."""
    pairs = list(combinations(range(m), 2))
    pidx = {p: i for i, p in enumerate(pairs)}
    perms = list(permutations(range(m)))
    # relabelling acts on pair indices
    perm_maps = [[pidx[tuple(sorted((p[a], p[b])))] for a, b in pairs] for p in perms]
    seen = set()
    out = []
    for mask in range(1 << len(pairs)):
        if mask in seen:
            continue
        orbit = set()
        for pm in perm_maps:
            img = 0
            for i, j in enumerate(pm):
                if mask >> i & 1:
                    img |= 1 << j
            orbit.add(img)
        seen |= orbit
        out.append(GraphSpec(m, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)))
    return out


@dataclass(frozen=True)
class HypergraphSpec:
    m: int
    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.n < 2:
            raise MalformedInput("uniformity must be at least 2")
        es = set()
        for e in self.edges:
            t = tuple(sorted(set(e)))
            if len(t) != self.n or len(tuple(e)) != self.n:
                raise MalformedInput(f"edge {tuple(e)} does not have {self.n} distinct members")
            if not all(0 <= x < self.m for x in t):
                raise MalformedInput(f"edge {t} outside 0..{self.m - 1}")
            es.add(t)
        object.__setattr__(self, "edges", frozenset(es))


def make_hypergraph(spec: HypergraphSpec, budget=None) -> FiniteStructure:
    _cap(spec.m, budget, "hypergraph")
    sig = Signature((("R", spec.n),))
    rel = [p for e in spec.edges for p in permutations(e)]
    return FiniteStructure(sig, spec.m, {"R": rel})


def make_convex_equivalence(classes, ordered: bool = True, budget=None) -> FiniteStructure:
    """Points ``(i, j)`` labelled in the convex order; returns labels in that order."""
    classes = [int(c) for c in classes]
    if any(c < 1 for c in classes):
        raise MalformedInput("class sizes must be positive")
    pts = [(i, j) for i, c in enumerate(classes) for j in range(c)]
    _cap(len(pts), budget, "equivalence relation")
    E = [(x, y) for x, p in enumerate(pts) for y, q in enumerate(pts) if p[0] == q[0]]
    rels = {"E": E}
    sig_rels = [("E", 2)]
    if ordered:
        # labels already follow the convex order
        rels["<"] = list(combinations(range(len(pts)), 2))
        sig_rels.append(("<", 2))
    s = FiniteStructure(Signature(tuple(sig_rels)), len(pts), rels,
                        name=f"eq{'x'.join(map(str, classes))}")
    return s


def convex_points(classes):
    return [(i, j) for i, c in enumerate(classes) for j in range(c)]


@dataclass(frozen=True)
class TreeSpec:
    k: int
    h: int
    flavor: str = "strtree"

    def __post_init__(self):
        if self.flavor not in ("stree", "strtree"):
            raise MalformedInput(f"unknown tree flavor {self.flavor!r}")
        if self.k < 1 or self.h < 0:
            raise MalformedInput("need branching >= 1 and height >= 0")


def tree_nodes(k, h):
    """Sequences over range(k) of length <= h, ordered by (length, lex)."""
    return [s for n in range(h + 1) for s in product(range(k), repeat=n)]


def _lex_less(a, b):
    # proper initial segment, or smaller at the first difference
    if a == b:
        return False
    n = 0
    while n < len(a) and n < len(b) and a[n] == b[n]:
        n += 1
    if n == len(a):
        return True
    if n == len(b):
        return False
    return a[n] < b[n]


def _common_prefix(a, b):
    n = 0
    while n < len(a) and n < len(b) and a[n] == b[n]:
        n += 1
    return a[:n]


def make_tree(spec: TreeSpec, nodes=None, budget=None):
    """Tree on ``nodes`` (default: the full ``k``-branching tree of height ``h``).

    ``nodes`` must be closed under common prefixes. Returns the structure and
    the node list; element ``i`` is ``nodes[i]``.
    """
    nodes = list(nodes) if nodes is not None else tree_nodes(spec.k, spec.h)
    _cap(len(nodes), budget, "tree")
    index = {s: i for i, s in enumerate(nodes)}
    N = len(nodes)
    for a in nodes:
        for b in nodes:
            if _common_prefix(a, b) not in index:
                raise MalformedInput(f"node set not closed under meets: {a} ^ {b}")
    pre = [(index[a], index[b]) for a in nodes for b in nodes if b[:len(a)] == a]
    lex = [(index[a], index[b]) for a in nodes for b in nodes if _lex_less(a, b)]
    rels = {"prefix": pre, "lex": lex}
    sig_rels = [("prefix", 2), ("lex", 2)]
    height = max(len(s) for s in nodes)
    if spec.flavor == "stree":
        for n in range(height + 1):
            sig_rels.append((f"P{n}", 1))
            rels[f"P{n}"] = [(index[s],) for s in nodes if len(s) == n]
    else:
        sig_rels.append(("len", 2))
        rels["len"] = [(index[a], index[b]) for a in nodes for b in nodes if len(a) < len(b)]
    sig = Signature(tuple(sig_rels), (("meet", 2),))
    meet = {(index[a], index[b]): index[_common_prefix(a, b)] for a in nodes for b in nodes}
    s = FiniteStructure(sig, N, rels, {"meet": meet}, name=f"{spec.flavor}_k{spec.k}h{height}")
    return s, nodes


# ----------------------------------------------------------- successor / predecessor

def make_pred(n: int, zero_fixed: bool = True) -> FiniteStructure:
    """``({0..n}, p)`` with ``p(x+1) = x``; ``p(0)`` is 0, or ``n`` when not fixed."""
    bottom = 0 if zero_fixed else n
    sig = Signature((), (("p", 1),))
    return FiniteStructure(sig, n + 1, {}, {"p": lambda x: x - 1 if x > 0 else bottom},
                           name=f"pred{n}")


def make_pred_with_successor(n: int, zero_fixed: bool = True) -> FiniteStructure:
    """Adds successor as a binary relation so the fragment stays closed."""
    base = make_pred(n, zero_fixed)
    sig = Signature((("S", 2),), (("p", 1),))
    S = [(a, a + 1) for a in range(n)]
    return FiniteStructure(sig, n + 1, {"S": S}, {"p": dict(base.fun_tables["p"])},
                           name=f"predS{n}")


def make_successor_graph(n: int, reverse_too: bool = False) -> FiniteStructure:
    rels = {"S": [(a, a + 1) for a in range(n)]}
    sig = [("S", 2)]
    if reverse_too:
        rels["P"] = [(a + 1, a) for a in range(n)]
        sig.append(("P", 2))
    return FiniteStructure(Signature(tuple(sig)), n + 1, rels)


# -------------------------------------------------------------- encodings

@dataclass
class GraphEncoding:
    spec: GraphSpec
    algebra: AtomSetAlgebra
    g: tuple
    vertex_atoms: tuple
    edge_atoms: dict = field(default_factory=dict)

    def related(self, x, y) -> bool:
        """Edge relation read off the algebra: distinct with nonzero meet."""
        return x != y and x & y != 0


def encode_graph_to_ba(spec: GraphSpec, budget=None) -> GraphEncoding:
    """Vertex ``n`` goes to its private atom joined with one atom per incident edge."""
    _cap(spec.m, budget, "graph encoding")
    names = [f"b{n}" for n in range(spec.m)]
    edges = sorted(spec.edges)
    names += [f"b{i}^{n}" for i, n in edges]
    B = AtomSetAlgebra(tuple(names))
    vertex_atoms = tuple(1 << n for n in range(spec.m))
    edge_atoms = {e: 1 << (spec.m + t) for t, e in enumerate(edges)}
    g = []
    for n in range(spec.m):
        x = vertex_atoms[n]
        for (i, j), atom in edge_atoms.items():
            if n in (i, j):
                x |= atom
        g.append(x)
    return GraphEncoding(spec, B, tuple(g), vertex_atoms, edge_atoms)


def meet_all(xs, one):
    out = one
    for x in xs:
        out &= x
    return out


@dataclass
class HypergraphEncoding:
    spec: HypergraphSpec
    algebra: AtomSetAlgebra
    g: tuple
    atom_index: tuple


def encode_hypergraph_to_ba(spec: HypergraphSpec, budget=None) -> HypergraphEncoding:
    """Atoms are increasing ``n``-sequences over ``m + n`` indices.

    The last ``n`` indices are padding that no vertex uses. Vertex ``l`` gets
    every atom whose sequence has ``l`` at a non-final position, and every
    atom whose sequence ends in ``l`` and is a hyperedge.
    """
    m, n = spec.m, spec.n
    seqs = list(combinations(range(m + n), n))
    limit = resolve(budget).max_nodes
    if len(seqs) * m > limit:
        raise BudgetExceeded(f"{len(seqs)} atoms is too many", code="atoms", limit=limit,
                             needed=len(seqs) * m)
    B = AtomSetAlgebra(tuple("b" + ".".join(map(str, s)) for s in seqs))
    g = []
    for l in range(m):
        x = 0
        for t, s in enumerate(seqs):
            if l in s[:-1] or (s[-1] == l and s in spec.edges):
                x |= 1 << t
        g.append(x)
    return HypergraphEncoding(spec, B, tuple(g), tuple(seqs))


# ---------------------------------------------------------------- witnesses

def treeprop_maps(c: int, s: int, k: int | None = None, height: int | None = None,
                  depth: int = 4, budget=None) -> SemiRetractionWitness:
    """Convex equivalence (``c`` classes of size ``s``) into a strong tree and back.

    ``g(i, j)`` is the all-zero node of length ``2i`` extended by ``j + 1``.
    ``f`` sends level ``l`` of the tree, in lexicographic order, onto class ``l``
    of a host equivalence relation whose class sizes match the level widths.
    """
    if c < 1 or s < 1:
        raise MalformedInput("need at least one class of size at least one")
    k = s + 1 if k is None else k
    height = 2 * c - 1 if height is None else height
    if k < s + 1 or height < 2 * c - 1:
        raise BudgetExceeded(f"tree needs branching >= {s + 1} and height >= {2 * c - 1}",
                             code="sizing", needed=(s + 1, 2 * c - 1), limit=(k, height))
    A = make_convex_equivalence([s] * c)
    B, nodes = make_tree(TreeSpec(k, height, "strtree"), budget=budget)
    index = {v: i for i, v in enumerate(nodes)}
    widths = [k ** l for l in range(height + 1)]
    host = make_convex_equivalence(widths, budget=budget)
    # nodes are listed by (length, lex) and host points by (class, position),
    # so both label sets line up and f is the identity on labels
    f_map = list(range(len(nodes)))
    g_map = [index[(0,) * (2 * i) + (j + 1,)] for i, j in convex_points([s] * c)]
    return SemiRetractionWitness(A, B, CrossMap(A, B, tuple(g_map)), CrossMap(B, host, tuple(f_map)),
                                 depth=depth, A_host=host, name=f"treeprop_c{c}s{s}")


def ordered_graph_indiscernible_fragment(n: int, depth: int = 4) -> SemiRetractionWitness:
    """Chain into the ordered complete graph on the same points, identity back."""
    A = make_chain(n)
    B = make_ordered_graph(GraphSpec.complete(n))
    ident = tuple(range(n))
    return SemiRetractionWitness(A, B, CrossMap(A, B, ident), CrossMap(B, A, ident), depth=depth,
                                 name=f"ordgraph_{n}")


def graph_ba_fragment(spec: GraphSpec | None = None, depth: int = 4):
    """Graph into the finite algebra of its encoding; identity back onto the algebra as a graph.

    The host is the algebra's universe with ``R(x, y)`` iff ``x != y`` and
    ``x ^ y != 0``; ``g`` itself is then the composite.
    """
    spec = GraphSpec.path(3) if spec is None else spec
    enc = encode_graph_to_ba(spec)
    Bs = export_structure(enc.algebra)
    N = Bs.size
    host = FiniteStructure(GRAPH_SIG, N, {"R": [(x, y) for x in range(N) for y in range(N)
                                                 if x != y and x & y]})
    A = make_graph(spec)
    w = SemiRetractionWitness(A, Bs, CrossMap(A, Bs, enc.g), CrossMap(Bs, host, tuple(range(N))),
                              depth=depth, A_host=host, name=f"graphba_{spec.m}")
    return w, enc


def interdefinability_fragments(kind: str, n: int = 5, zero_fixed: bool = True,
                                depth: int = 4) -> SemiRetractionWitness:
    """Identity pairs between quantifier-free interdefinable fragments.

    ``pred``: ``({0..n}, p)`` against the same points with successor added as a
    relation. ``succ_reduct``: the successor graph against the successor graph
    with its reverse added.
    """
    if kind == "pred":
        A = make_pred(n, zero_fixed)
        B = make_pred_with_successor(n, zero_fixed)
    elif kind == "succ_reduct":
        A = make_successor_graph(n)
        B = make_successor_graph(n, reverse_too=True)
    else:
        raise MalformedInput(f"unknown fragment kind {kind!r}")
    ident = tuple(range(n + 1))
    return SemiRetractionWitness(A, B, CrossMap(A, B, ident), CrossMap(B, A, ident), depth=depth,
                                 name=f"{kind}_{n}")


def not_sr_fragment(n: int):
    """Two successor chains of length ``n`` against one chain of length ``2n``.

    ``f`` interleaves: even ``2t`` goes to ``t`` in the first chain, odd
    ``2t + 1`` to ``t`` in the second. Returns ``(f, g)`` with ``g`` the inverse,
    both as cross maps of relational successor graphs.
    """
    A = FiniteStructure(Signature((("S", 2),)), 2 * n, {"S": [(a, a + 1) for a in range(2 * n - 1)]})
    # second chain occupies labels n..2n-1
    B = FiniteStructure(Signature((("S", 2),)), 2 * n,
                        {"S": [(a, a + 1) for a in range(n - 1)] +
                              [(a, a + 1) for a in range(n, 2 * n - 1)]})
    f_map = [x // 2 if x % 2 == 0 else n + x // 2 for x in range(2 * n)]
    f = CrossMap(A, B, tuple(f_map))
    inv = [0] * (2 * n)
    for x, y in enumerate(f_map):
        inv[y] = x
    return f, CrossMap(B, A, tuple(inv))


# ----------------------------------------------------------------- registry

def builtin(name: str):
    """Resolve a short name such as ``chain6``, ``k3``, ``ba2`` or ``treeprop_c2s2``."""
    import re

    from .boolalg import AtomSetAlgebra as _BA

    patterns = [
        (r"chain(\d+)", lambda n: make_chain(int(n))),
        (r"k(\d+)", lambda n: make_complete_graph(int(n))),
        (r"empty(\d+)", lambda n: make_graph(GraphSpec(int(n)))),
        (r"path(\d+)", lambda n: make_graph(GraphSpec.path(int(n)))),
        (r"set(\d+)", lambda n: make_set(int(n))),
        (r"ba(\d+)", lambda n: export_structure(_BA.of_size(int(n)))),
        (r"pred(\d+)", lambda n: make_pred(int(n))),
        (r"treeprop_c(\d+)s(\d+)", lambda c, s: treeprop_maps(int(c), int(s))),
        (r"ordgraph_(\d+)", lambda n: ordered_graph_indiscernible_fragment(int(n))),
        (r"graphba_path(\d+)", lambda n: graph_ba_fragment(GraphSpec.path(int(n)))[0]),
        (r"pred_(\d+)", lambda n: interdefinability_fragments("pred", int(n))),
        (r"succ_reduct_(\d+)", lambda n: interdefinability_fragments("succ_reduct", int(n))),
    ]
    for pat, fn in patterns:
        m = re.fullmatch(pat, name.lower())
        if m:
            return fn(*m.groups())
    return None

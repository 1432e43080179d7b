"""Semi-retraction checks on finite fragments.

A pair ``(g, f)`` with ``g: A_frag -> B_frag`` and ``f: B_frag -> A_host`` is
checked for the three axioms: both maps respect quantifier-free types, and
``f . g`` is an embedding of ``A_frag`` into ``A_host``. ``A_host`` defaults to
``A_frag``; a larger host is needed when ``f`` spreads a whole tree level into
one class, for example.

Everything is scoped to the supplied fragments and the tuple depth. Nothing
here claims anything about the infinite structures the fragments come from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Callable, Sequence

from .budget import resolve
from .errors import ConsistencyAlarm, FragmentIncomplete, MalformedInput
from .structures import (
    FiniteStructure,
    closure_set,
    generated_substructure,
    is_embedding,
    iter_embeddings,
    qftp_fingerprint,
)


@dataclass(frozen=True)
class CrossMap:
    """Injective map between structures that may have different signatures.

    ``map[x]`` is the image of ``x`` or ``None`` when ``x`` lies outside the
    fragment the map is defined on.
    """

    source: FiniteStructure
    target: FiniteStructure
    map: tuple

    def __post_init__(self):
        mp = tuple(None if y is None else int(y) for y in self.map)
        object.__setattr__(self, "map", mp)
        if len(mp) != self.source.size:
            raise MalformedInput(f"map has {len(mp)} entries, source has {self.source.size} elements")
        vals = [y for y in mp if y is not None]
        if len(set(vals)) != len(vals):
            raise MalformedInput("cross map is not injective")
        if any(not 0 <= y < self.target.size for y in vals):
            raise MalformedInput("cross map leaves the target universe")

    @property
    def domain(self):
        return [x for x, y in enumerate(self.map) if y is not None]

    def __call__(self, x):
        y = self.map[x]
        if y is None:
            raise FragmentIncomplete(f"element {x} is outside the domain of the map")
        return y

    def apply(self, t):
        return tuple(self(x) for x in t)

    def inverse_table(self) -> dict:
        return {y: x for x, y in enumerate(self.map) if y is not None}

    def preimage(self, t):
        inv = self.inverse_table()
        out = []
        for y in t:
            if y not in inv:
                raise FragmentIncomplete(f"target element {y} has no preimage")
            out.append(inv[y])
        return tuple(out)

    def then(self, outer: "CrossMap") -> "CrossMap":
        """``outer . self``."""
        return CrossMap(self.source, outer.target,
                        tuple(None if y is None else outer.map[y] for y in self.map))

    def with_entry(self, x, y) -> "CrossMap":
        mp = list(self.map)
        mp[x] = y
        return CrossMap(self.source, self.target, tuple(mp))


@dataclass
class SemiRetractionWitness:
    A_frag: FiniteStructure
    B_frag: FiniteStructure
    g: CrossMap
    f: CrossMap
    depth: int = 4
    A_host: FiniteStructure | None = None
    name: str = ""
    status: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.A_host is None:
            self.A_host = self.A_frag
        if self.g.source is not self.A_frag and self.g.source != self.A_frag:
            raise MalformedInput("g must start at A_frag")
        if self.g.target != self.B_frag or self.f.source != self.B_frag:
            raise MalformedInput("g must land in B_frag and f must start there")
        if self.f.target != self.A_host:
            raise MalformedInput("f must land in the A host structure")
        if self.A_frag.sig != self.A_host.sig:
            raise MalformedInput("A_frag and A_host must share a signature")

    def fg(self, x):
        return self.f(self.g(x))


@dataclass
class CheckResult:
    name: str
    passed: bool
    counterexample: tuple | None = None
    kind: str = "pass"
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def as_dict(self):
        return {"check": self.name, "passed": self.passed, "kind": self.kind,
                "counterexample": _jsonable(self.counterexample), "detail": _jsonable(self.detail)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    return x


class _FpCache:
    def __init__(self, M, budget):
        self.M = M
        self.budget = budget
        self.memo = {}

    def __call__(self, t):
        t = tuple(t)
        fp = self.memo.get(t)
        if fp is None:
            fp = qftp_fingerprint(self.M, t, self.budget)
            self.memo[t] = fp
        return fp


def effective_depth(target: FiniteStructure, n_max: int) -> int:
    """Depth that suffices when the target is relational.

    In a relational structure the type of a tuple is fixed by the types of its
    subtuples of length ``max(2, max arity)``, and respecting maps send equal
    subtuple types to equal subtuple types.
    """
    if target.sig.is_relational:
        return min(n_max, max(2, target.sig.max_arity))
    return n_max


def check_qftp_respecting(h: CrossMap, n_max: int, budget=None, exhaustive=False) -> CheckResult:
    """Group injective tuples of the domain by source type, compare image types within groups.

    Tuples with repeated entries are skipped: their types and the types of
    their images are both fixed by the deduplicated tuple and its repetition
    pattern.
    """
    budget = resolve(budget)
    if n_max > budget.max_tuple:
        from .errors import BudgetExceeded
        raise BudgetExceeded(f"depth {n_max} exceeds fingerprint bound {budget.max_tuple}",
                             code="tuple-length", limit=budget.max_tuple, needed=n_max)
    depth = n_max if exhaustive else effective_depth(h.target, n_max)
    src = _FpCache(h.source, budget)
    tgt = _FpCache(h.target, budget)
    dom = h.domain
    checked = 0
    for n in range(1, depth + 1):
        groups: dict = {}
        for t in permutations(dom, n):
            checked += 1
            key = src(t)
            img_fp = tgt(h.apply(t))
            first = groups.get(key)
            if first is None:
                groups[key] = (t, img_fp)
            elif first[1] != img_fp:
                return CheckResult("qftp-respecting", False, (first[0], t), "counterexample",
                                   {"requested_depth": n_max, "effective_depth": depth,
                                    "tuples_checked": checked})
    return CheckResult("qftp-respecting", True, None, "pass",
                       {"requested_depth": n_max, "effective_depth": depth,
                        "tuples_checked": checked})


def check_composition_embedding(w: SemiRetractionWitness) -> CheckResult:
    mp = []
    for x in range(w.A_frag.size):
        y = w.g.map[x]
        if y is None:
            raise FragmentIncomplete(f"g is undefined at {x}")
        z = w.f.map[y]
        if z is None:
            raise FragmentIncomplete(f"f is undefined at g({x}) = {y}")
        mp.append(z)
    A, H = w.A_frag, w.A_host
    if len(set(mp)) != len(mp):
        bad = next((x, y) for x in range(len(mp)) for y in range(x + 1, len(mp)) if mp[x] == mp[y])
        return CheckResult("fg-embedding", False, bad, "counterexample", {"reason": "not injective"})
    for rname, arity in A.sig.relations:
        for t in product(range(A.size), repeat=arity):
            if A.holds(rname, t) != H.holds(rname, tuple(mp[x] for x in t)):
                return CheckResult("fg-embedding", False, t, "counterexample",
                                   {"reason": f"relation {rname}"})
    for fname, _ in A.sig.functions:
        for args, v in A.fun_tables[fname].items():
            if H.apply(fname, *(mp[x] for x in args)) != mp[v]:
                return CheckResult("fg-embedding", False, args, "counterexample",
                                   {"reason": f"function {fname}"})
    return CheckResult("fg-embedding", True, None, "pass", {"map": tuple(mp)})


def verify_semiretraction(w: SemiRetractionWitness, depth=None, budget=None) -> dict:
    depth = w.depth if depth is None else depth
    results = {
        "g": check_qftp_respecting(w.g, depth, budget),
        "f": check_qftp_respecting(w.f, depth, budget),
    }
    try:
        results["fg"] = check_composition_embedding(w)
    except FragmentIncomplete as exc:
        results["fg"] = CheckResult("fg-embedding", False, None, "fragment-incomplete",
                                    {"reason": str(exc)})
    w.status = {k: v.passed for k, v in results.items()}
    return {"witness": w.name, "depth": depth, "passed": all(r.passed for r in results.values()),
            "checks": results}


def report_as_dict(report: dict) -> dict:
    out = dict(report)
    out["checks"] = {k: v.as_dict() for k, v in report["checks"].items()}
    return out


# ------------------------------------------------------- restricted inverse images

def check_restricted_inverse_images(f: CrossMap, a: Sequence[int], b0: Sequence[int],
                                    a0: Sequence[int], budget=None) -> CheckResult:
    """Every tuple of ``<f(b0)>`` typed like ``a`` must pull back into ``b0`` typed like ``a0``."""
    if len(a) != len(a0):
        raise MalformedInput("a and a0 must have equal length")
    A, B = f.target, f.source
    fa = qftp_fingerprint(A, a, budget)
    fa0 = qftp_fingerprint(B, a0, budget)
    image = sorted(closure_set(A, f.apply(b0)))
    inv = f.inverse_table()
    b0_set = set(b0)
    preimages = []
    for c1 in product(image, repeat=len(a)):
        if qftp_fingerprint(A, c1, budget) != fa:
            continue
        detail = {"matched": len(preimages) + 1, "preimages": preimages}
        if any(y not in inv for y in c1):
            return CheckResult("restricted-inverse-images", False, c1, "escapes-image", detail)
        c0 = tuple(inv[y] for y in c1)
        detail["preimage"] = c0
        if not set(c0) <= b0_set:
            return CheckResult("restricted-inverse-images", False, c1, "outside-b0", detail)
        if qftp_fingerprint(B, c0, budget) != fa0:
            return CheckResult("restricted-inverse-images", False, c1, "wrong-type", detail)
        preimages.append(c0)
    return CheckResult("restricted-inverse-images", True, None, "pass",
                       {"matched": len(preimages), "preimages": preimages})


def tuples_like(M: FiniteStructure, t: Sequence[int], budget=None) -> list[tuple]:
    """All tuples of ``M`` with the same quantifier-free type as ``t``."""
    target = qftp_fingerprint(M, t, budget)
    distinct = list(dict.fromkeys(t))
    pattern = [distinct.index(x) for x in t]
    out = []
    for s in permutations(range(M.size), len(distinct)):
        cand = tuple(s[p] for p in pattern)
        if qftp_fingerprint(M, cand, budget) == target:
            out.append(cand)
    return out


# -------------------------------------------------------------- transfer

def _fg_struct(w: SemiRetractionWitness, gens):
    """Pieces shared by the induced coloring and the transfer check.

    ``X0`` is generated by ``gens`` in ``A_frag``; ``X`` is ``<fg(gens)>`` in
    ``A_host``, whose local labels line up with ``X0``'s because ``fg`` is an
    embedding; ``Xp`` is ``<g(X0)>`` in ``B_frag``.
    """
    X0, incl0 = generated_substructure(w.A_frag, gens)
    X, inclX = generated_substructure(w.A_host, [w.fg(x) for x in gens])
    if tuple(w.fg(x) for x in incl0.map) != inclX.map:
        raise ConsistencyAlarm("fg does not carry the generated substructure onto its image")
    g_img = [w.g(x) for x in incl0.map]
    Xp, inclP = generated_substructure(w.B_frag, g_img)
    p_index = {y: i for i, y in enumerate(inclP.map)}
    g_local = [p_index[y] for y in g_img]
    return X0, incl0, X, inclX, Xp, inclP, g_local


@dataclass
class InducedColoring:
    A_struct: FiniteStructure
    A_prime: FiniteStructure
    colors: dict
    source_colors: dict


def induced_coloring(c: dict, w: SemiRetractionWitness, A_gens, budget=None) -> InducedColoring:
    """``c0(e) = c(f(e restricted to g(A0)))`` for every ``e`` in Emb(A', B_frag).

    ``c`` maps embedding tuples of ``A = <fg(A_gens)>`` into ``A_host`` to colors.
    """
    X0, incl0, X, inclX, Xp, inclP, g_local = _fg_struct(w, A_gens)
    out = {}
    for e in iter_embeddings(Xp, w.B_frag):
        pulled = tuple(w.f(e[i]) for i in g_local)
        if not is_embedding(X, w.A_host, pulled):
            raise ConsistencyAlarm(f"f(e|g(A0)) is not an embedding for e = {e}")
        if pulled not in c:
            raise FragmentIncomplete(f"coloring undefined at {pulled}")
        out[e] = c[pulled]
    return InducedColoring(X, Xp, out, c)


def random_coloring(A: FiniteStructure, host: FiniteStructure, r: int, seed: int) -> dict:
    import numpy as np

    embs = list(iter_embeddings(A, host))
    rng = np.random.default_rng(seed)
    cols = rng.integers(0, r, size=len(embs))
    return {e: int(col) for e, col in zip(embs, cols)}


def transfer_pipeline_check(w: SemiRetractionWitness, A_gens, B_gens, c: dict, h=None,
                            budget=None) -> dict:
    """Run the pull-back / push-forward argument on concrete finite data.

    With ``h`` omitted, the embedding ``B' -> B_frag`` on which ``c0`` shows the
    fewest colors is used.
    """
    ic = induced_coloring(c, w, A_gens, budget)
    A0, _, A, _, Ap, _, gA = _fg_struct(w, A_gens)
    _, _, B, _, Bp, _, gB = _fg_struct(w, B_gens)
    # A-local label i is the image of A0-local label i, same for B
    emb_App = list(iter_embeddings(Ap, Bp))

    def colors_under(hmap):
        return {ic.colors[tuple(hmap[x] for x in jp)] for jp in emb_App}

    if h is None:
        best = None
        for cand in iter_embeddings(Bp, w.B_frag):
            n = len(colors_under(cand))
            if best is None or n < best[0]:
                best = (n, cand)
        if best is None:
            raise ConsistencyAlarm("no embedding of B' into B_frag")
        h = best[1]
    h = tuple(h)
    if not is_embedding(Bp, w.B_frag, h):
        raise MalformedInput("h is not an embedding of <g(B0)> into B_frag")
    d = len(colors_under(h))
    k = tuple(w.f(h[gB[i]]) for i in range(B.size))
    k_ok = is_embedding(B, w.A_host, k)
    rows = []
    identity_ok = True
    for j in iter_embeddings(A, B):
        fixed = {gA[i]: gB[j[i]] for i in range(A.size)}
        jps = list(iter_embeddings(Ap, Bp, fixed=fixed))
        if len(jps) != 1:
            raise ConsistencyAlarm(f"{len(jps)} extensions of f^-1(j) for j = {j}")
        jp = jps[0]
        lhs = c[tuple(k[x] for x in j)]
        rhs = ic.colors[tuple(h[x] for x in jp)]
        identity_ok &= lhs == rhs
        rows.append({"j": j, "j_prime": jp, "c_kj": lhs, "c0_hjp": rhs})
    colors_k = {row["c_kj"] for row in rows}
    return {
        "passed": bool(k_ok and identity_ok and len(colors_k) <= d),
        "k": k,
        "k_is_embedding": k_ok,
        "h": h,
        "d": d,
        "colors_on_k": sorted(colors_k),
        "identity_holds": identity_ok,
        "rows": rows,
    }


# -------------------------------------------------------------- pre-adjunction

def _hom(M_fp: _FpCache, src, dst_elems):
    """qftp-preserving injections from the entries of ``src`` into the entries of ``dst``.

    A morphism is stored as the image tuple of ``src``.
    """
    want = M_fp(src)
    k = len(src)
    return [t for t in permutations(dst_elems, k) if M_fp(t) == want]


def default_phi(w: SemiRetractionWitness) -> Callable:
    """``psi -> f(psi) . f . g`` as a function of (psi as dict, domain tuple)."""
    def phi(psi: dict, dom):
        return {x: w.f(psi[w.g(x)]) for x in dom}
    return phi


def preadjunction_check(w: SemiRetractionWitness, max_len: int = 2, phi=None,
                        a_tuples=None, c_tuples=None, budget=None) -> dict:
    """Check ``Phi(psi . g(v)) = Phi(psi) . v`` for every enumerated ``(a, b, c, v, psi)``.

    Objects are injective tuples up to ``max_len``; morphisms are
    qftp-preserving injections between their entry sets. Besides the identity,
    the check confirms that ``g(v)`` and both values of ``Phi`` are morphisms.
    """
    phi = phi or default_phi(w)
    fa = _FpCache(w.A_frag, budget)
    fh = _FpCache(w.A_host, budget)
    fb = _FpCache(w.B_frag, budget)
    if a_tuples is None:
        a_tuples = [t for n in range(1, max_len + 1) for t in permutations(range(w.A_frag.size), n)]
    if c_tuples is None:
        c_tuples = [t for n in range(1, max_len + 1) for t in permutations(range(w.B_frag.size), n)]
    checked = 0
    failures = []
    for a in a_tuples:
        for b in a_tuples:
            if len(a) > len(b):
                continue
            homs_ab = _hom(fa, a, b)
            if not homs_ab:
                continue
            gb = tuple(w.g(x) for x in b)
            for c in c_tuples:
                if len(c) < len(gb):
                    continue
                for psi_img in _hom(fb, gb, c):
                    psi = dict(zip(gb, psi_img))
                    G_c = tuple(w.f(y) for y in c)
                    try:
                        phi_b = phi(psi, b)
                    except (KeyError, FragmentIncomplete) as exc:
                        failures.append({"a": a, "b": b, "c": c, "psi": psi_img, "error": str(exc)})
                        continue
                    for v_img in homs_ab:
                        checked += 1
                        v = dict(zip(a, v_img))
                        wmap = {w.g(x): w.g(v[x]) for x in a}
                        ga = tuple(w.g(x) for x in a)
                        w_img = tuple(wmap[y] for y in ga)
                        problem = None
                        if fb(w_img) != fb(ga):
                            problem = "w is not a morphism"
                        psi_w = {y: psi[wmap[y]] for y in ga}
                        try:
                            lhs = phi(psi_w, a)
                        except (KeyError, FragmentIncomplete) as exc:
                            problem = f"phi undefined: {exc}"
                            lhs = None
                        rhs = {x: phi_b[v[x]] for x in a}
                        if problem is None:
                            if fh(tuple(lhs[x] for x in a)) != fa(a) or not set(lhs.values()) <= set(G_c):
                                problem = "Phi(psi.w) is not a morphism into G(c)"
                            elif fh(tuple(phi_b[x] for x in b)) != fa(b):
                                problem = "Phi(psi) is not a morphism into G(c)"
                            elif lhs != rhs:
                                problem = "identity fails"
                        if problem:
                            failures.append({"a": a, "b": b, "c": c, "v": v_img, "psi": psi_img,
                                             "reason": problem})
                            if len(failures) >= 10:
                                return {"passed": False, "checked": checked, "failures": failures}
    return {"passed": not failures and checked > 0, "checked": checked, "failures": failures}

"""Command-line front end.

Structures and witnesses are given either as JSON document paths or as
built-in names (``chain6``, ``k3``, ``empty4``, ``path3``, ``set2``, ``ba2``,
``pred5``, ``treeprop_c2s2``, ``ordgraph_4``, ``graphba_path3``, ``pred_5``,
``succ_reduct_5``).

Exit codes: 0 pass/holds, 2 malformed input, 3 fail with witness,
4 degenerate input, 5 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import boolalg, constructions, docio, indiscernibles, ramsey, semiretraction, structures
from .budget import Budget
from .errors import BudgetExceeded, MalformedInput, StrucRamseyError
from .semiretraction import SemiRetractionWitness

EXIT_OK, EXIT_MALFORMED, EXIT_FAIL, EXIT_DEGENERATE, EXIT_BUDGET = 0, 2, 3, 4, 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise MalformedInput(message)


def _tuple(text):
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise MalformedInput(f"bad tuple {text!r}; expected comma-separated integers") from None


class Inputs:
    """Resolves names/paths and remembers documents for the report digest."""

    def __init__(self):
        self.docs = []

    def structure(self, ref):
        obj = constructions.builtin(ref)
        if obj is not None:
            if isinstance(obj, SemiRetractionWitness):
                raise MalformedInput(f"{ref!r} names a witness, not a structure")
            self.docs.append({"builtin": ref})
            return obj
        doc = docio.load_document(ref)
        self.docs.append(doc)
        return docio.structure_from_doc(doc)

    def witness(self, ref):
        obj = constructions.builtin(ref)
        if isinstance(obj, SemiRetractionWitness):
            self.docs.append({"builtin": ref})
            return obj
        if obj is not None:
            raise MalformedInput(f"{ref!r} names a structure, not a witness")
        doc = docio.load_document(ref)
        self.docs.append(doc)
        return docio.witness_from_doc(doc)

    def family(self, ref):
        doc = docio.load_document(ref)
        self.docs.append(doc)
        return docio.family_from_doc(doc)

    def raw(self, ref):
        doc = docio.load_document(ref)
        self.docs.append(doc)
        return doc


def _budget(args) -> Budget:
    return Budget(max_tuple=args.max_tuple, max_arity=args.max_arity, max_universe=args.max_universe,
                  arrow_domain=args.arrow_domain, exhaustive_domain=args.exhaustive_domain,
                  max_nodes=args.max_nodes, age_candidates=args.age_candidates,
                  max_atoms_export=args.max_atoms_export)


def _fp_doc(fp):
    return {"generator_count": fp.generator_count, "local_size": fp.local_size,
            "generator_map": list(fp.generator_map), "code": list(fp.code())}


# ------------------------------------------------------------------ commands

def cmd_qftp(a, inp, b):
    M = inp.structure(a.M)
    fps = [qf for qf in (structures.qftp_fingerprint(M, _tuple(t), b) for t in a.tuple)]
    res = {"fingerprints": [_fp_doc(fp) for fp in fps]}
    if len(fps) > 1:
        res["all_equal"] = all(fp == fps[0] for fp in fps)
    return res, EXIT_OK


def cmd_emb(a, inp, b):
    A, C = inp.structure(a.A), inp.structure(a.C)
    embs = structures.enumerate_embeddings(A, C, limit=a.limit, budget=b)
    return {"count": len(embs), "embeddings": [list(e.map) for e in embs]}, EXIT_OK


def cmd_copies(a, inp, b):
    A, C = inp.structure(a.A), inp.structure(a.C)
    cps = structures.enumerate_copies(A, C)
    return {"count": len(cps), "copies": [list(c) for c in cps]}, EXIT_OK


def cmd_aut(a, inp, b):
    G = structures.automorphism_group(inp.structure(a.A))
    return {"order": G.order, "is_rigid": G.is_rigid, "generators": [list(g) for g in G.generators]}, EXIT_OK


def cmd_age(a, inp, b):
    reps = structures.age_enumerate(inp.structure(a.M), a.k, b)
    return {"classes": len(reps), "structures": [docio.structure_to_doc(s) for s in reps]}, EXIT_OK


def _arrow(a, inp, b, mode):
    q = ramsey.ArrowQuery(inp.structure(a.C), inp.structure(a.B), inp.structure(a.A), a.r, a.d, mode)
    v = ramsey.check_arrow(q, b, method=a.method)
    res = v.as_dict()
    if v.witness is not None:
        res["witness_valid"] = ramsey.validate_witness(q, v.witness)
        return res, EXIT_FAIL
    if v.degenerate:
        return res, EXIT_DEGENERATE
    return res, EXIT_OK


def cmd_arrow(a, inp, b):
    return _arrow(a, inp, b, "substructure")


def cmd_earrow(a, inp, b):
    return _arrow(a, inp, b, "embedding")


def cmd_degree(a, inp, b):
    A = inp.structure(a.A)
    Bs = [inp.structure(x) for x in a.B]
    Cs = [inp.structure(x) for x in a.C]
    rep = ramsey.degree_evidence(A, Bs, Cs, a.r_max, a.mode, b)
    for cell in rep["cells"]:
        best = cell["achieved_at"]
        if best and best["refutation_below"] is not None:
            best["refutation_below"] = best["refutation_below"].as_dict()
    return rep, EXIT_OK


def cmd_twodeg(a, inp, b):
    rep = ramsey.two_degrees_check(inp.structure(a.A), inp.structure(a.B), inp.structure(a.C), a.r, b)
    for k in ("sub_refutation", "emb_refutation"):
        if rep[k] is not None:
            rep[k] = rep[k].as_dict()
    return rep, EXIT_OK if rep["inequality_holds"] else EXIT_FAIL


def cmd_semiret_verify(a, inp, b):
    w = inp.witness(a.witness)
    rep = semiretraction.verify_semiretraction(w, a.depth, b)
    out = semiretraction.report_as_dict(rep)
    if rep["passed"]:
        return out, EXIT_OK
    if any(c.kind == "fragment-incomplete" for c in rep["checks"].values()):
        return out, EXIT_DEGENERATE
    return out, EXIT_FAIL


def cmd_restricted(a, inp, b):
    w = inp.witness(a.witness)
    res = semiretraction.check_restricted_inverse_images(w.f, _tuple(a.a), _tuple(a.b0), _tuple(a.a0), b)
    return res.as_dict(), EXIT_OK if res.passed else EXIT_FAIL


def cmd_transfer(a, inp, b):
    w = inp.witness(a.witness)
    A_gens, B_gens = _tuple(a.A_gens), _tuple(a.B_gens)
    A_struct, _ = structures.generated_substructure(w.A_host, [w.fg(x) for x in A_gens])
    c = semiretraction.random_coloring(A_struct, w.A_host, a.r, a.seed)
    h = _tuple(a.h) if a.h else None
    rep = semiretraction.transfer_pipeline_check(w, A_gens, B_gens, c, h, b)
    rep["rows"] = len(rep["rows"])
    return rep, EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_preadj(a, inp, b):
    w = inp.witness(a.witness)
    rep = semiretraction.preadjunction_check(w, a.max_len, budget=b)
    return rep, EXIT_OK if rep["passed"] else EXIT_FAIL


def _graph_spec(a):
    edges = frozenset(_tuple(e) for e in a.edge)
    return constructions.GraphSpec(a.m, edges)


def cmd_encode_graph_ba(a, inp, b):
    spec = _graph_spec(a)
    inp.docs.append({"m": spec.m, "edges": sorted(spec.edges)})
    enc = constructions.encode_graph_to_ba(spec, b)
    B = enc.algebra
    atoms = boolalg.subalgebra_atoms(B, enc.g)
    return {"algebra": {"atoms": list(B.atom_names)},
            "g": [[v, docio.algebra_element_doc(B, x)] for v, x in enumerate(enc.g)],
            "generated_atoms": len(atoms)}, EXIT_OK


def cmd_encode_hyper_ba(a, inp, b):
    spec = constructions.HypergraphSpec(a.m, a.n, frozenset(_tuple(e) for e in a.edge))
    inp.docs.append({"m": spec.m, "n": spec.n, "edges": sorted(spec.edges)})
    enc = constructions.encode_hypergraph_to_ba(spec, b)
    B = enc.algebra
    return {"algebra": {"atoms": list(B.atom_names)},
            "g": [[v, docio.algebra_element_doc(B, x)] for v, x in enumerate(enc.g)]}, EXIT_OK


def cmd_make(a, inp, b):
    kind = a.kind
    if kind == "chain":
        M = constructions.make_chain(a.n, b)
    elif kind == "graph":
        M = constructions.make_graph(_graph_spec(a), b)
    elif kind == "hyper":
        M = constructions.make_hypergraph(
            constructions.HypergraphSpec(a.m, a.n, frozenset(_tuple(e) for e in a.edge)), b)
    elif kind == "eqrel":
        M = constructions.make_convex_equivalence(_tuple(a.classes), not a.unordered, b)
    elif kind == "tree":
        M, _ = constructions.make_tree(constructions.TreeSpec(a.k, a.height, a.flavor), budget=b)
    else:
        raise MalformedInput(f"unknown kind {kind!r}")
    return docio.structure_to_doc(M), EXIT_OK


def cmd_indisc(a, inp, b):
    rep = indiscernibles.qf_indiscernible_check(inp.family(a.family), a.n_max, b)
    return rep, EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_based(a, inp, b):
    rep = indiscernibles.atomic_locally_based_check(inp.family(a.X), inp.family(a.Y), a.n_max, b)
    return rep, EXIT_OK if rep["passed"] else EXIT_FAIL


# ------------------------------------------------------------------ parser

def build_parser():
    d = Budget()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "tsv"), default="json")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="accepted for interface stability; search runs sequentially")
    common.add_argument("--max-tuple", type=int, default=d.max_tuple)
    common.add_argument("--max-arity", type=int, default=d.max_arity)
    common.add_argument("--max-universe", type=int, default=d.max_universe)
    common.add_argument("--arrow-domain", type=int, default=d.arrow_domain)
    common.add_argument("--exhaustive-domain", type=int, default=d.exhaustive_domain)
    common.add_argument("--max-nodes", type=int, default=d.max_nodes)
    common.add_argument("--age-candidates", type=int, default=d.age_candidates)
    common.add_argument("--max-atoms-export", type=int, default=d.max_atoms_export)

    p = _Parser(prog="strucramsey", description="Finite structural Ramsey computations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.set_defaults(func=fn)
        return sp

    sp = add("qftp", cmd_qftp)
    sp.add_argument("--M", required=True)
    sp.add_argument("--tuple", action="append", required=True, help="comma-separated; repeatable")
    for name, fn in (("emb", cmd_emb), ("copies", cmd_copies)):
        sp = add(name, fn)
        sp.add_argument("--A", required=True)
        sp.add_argument("--C", required=True)
        if name == "emb":
            sp.add_argument("--limit", type=int)
    add("aut", cmd_aut).add_argument("--A", required=True)
    sp = add("age", cmd_age)
    sp.add_argument("--M", required=True)
    sp.add_argument("--k", type=int, required=True)
    for name, fn in (("arrow", cmd_arrow), ("earrow", cmd_earrow)):
        sp = add(name, fn)
        for s in ("--C", "--B", "--A"):
            sp.add_argument(s, required=True)
        sp.add_argument("--r", type=int, default=2)
        sp.add_argument("--d", type=int, default=1)
        sp.add_argument("--method", choices=("search", "exhaustive"), default="search")
    sp = add("degree", cmd_degree)
    sp.add_argument("--A", required=True)
    sp.add_argument("--B", action="append", required=True)
    sp.add_argument("--C", action="append", required=True)
    sp.add_argument("--r-max", type=int, default=2)
    sp.add_argument("--mode", choices=ramsey.MODES, default="substructure")
    sp = add("twodeg", cmd_twodeg)
    for s in ("--A", "--B", "--C"):
        sp.add_argument(s, required=True)
    sp.add_argument("--r", type=int, default=2)
    sp = add("semiret-verify", cmd_semiret_verify)
    sp.add_argument("--witness", required=True)
    sp.add_argument("--depth", type=int)
    sp = add("restricted", cmd_restricted)
    sp.add_argument("--witness", required=True)
    for s in ("--a", "--b0", "--a0"):
        sp.add_argument(s, required=True)
    sp = add("transfer", cmd_transfer)
    sp.add_argument("--witness", required=True)
    sp.add_argument("--A-gens", required=True)
    sp.add_argument("--B-gens", required=True)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--h")
    sp = add("preadj", cmd_preadj)
    sp.add_argument("--witness", required=True)
    sp.add_argument("--max-len", type=int, default=2)
    sp = add("encode-graph-ba", cmd_encode_graph_ba)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--edge", action="append", default=[])
    sp = add("encode-hyper-ba", cmd_encode_hyper_ba)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--edge", action="append", default=[])
    sp = add("make", cmd_make)
    sp.add_argument("kind", choices=("chain", "graph", "hyper", "eqrel", "tree"))
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--edge", action="append", default=[])
    sp.add_argument("--classes", default="2,2")
    sp.add_argument("--unordered", action="store_true")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--height", type=int, default=2)
    sp.add_argument("--flavor", choices=("stree", "strtree"), default="strtree")
    sp = add("indisc", cmd_indisc)
    sp.add_argument("--family", required=True)
    sp.add_argument("--n-max", type=int, default=2)
    sp = add("based", cmd_based)
    sp.add_argument("--X", required=True)
    sp.add_argument("--Y", required=True)
    sp.add_argument("--n-max", type=int, default=2)
    return p


def _default(o):
    if hasattr(o, "as_dict"):
        return o.as_dict()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    return str(o)


def _emit(report, fmt, stream):
    if fmt == "json":
        stream.write(json.dumps(report, default=_default, sort_keys=True) + "\n")
        return
    for key in sorted(report):
        val = report[key]
        if not isinstance(val, (str, int, float, bool)) and val is not None:
            val = json.dumps(val, default=_default, sort_keys=True)
        stream.write(f"{key}\t{val}\n")


def main(argv=None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    fmt = "tsv" if "--format" in argv and argv[argv.index("--format") + 1:][:1] == ["tsv"] else "json"
    t0 = time.perf_counter()
    inp = Inputs()
    try:
        args = build_parser().parse_args(argv)
        budget = _budget(args)
        result, code = args.func(args, inp, budget)
        report = {"command": argv, "inputs_digest": docio.canonical_digest(*inp.docs),
                  "budget": budget.as_dict(), "workers": args.workers, "result": result,
                  "status": {0: "pass", 3: "fail", 4: "degenerate"}.get(code, "pass"),
                  "exit_code": code, "wall_seconds": round(time.perf_counter() - t0, 6)}
        _emit(report, fmt, stdout)
        return code
    except StrucRamseyError as exc:
        code = exc.exit_code
        report = {"command": argv, "status": "error", "error": exc.code, "message": str(exc),
                  "exit_code": code}
        if isinstance(exc, BudgetExceeded):
            report.update(limit=exc.limit, needed=exc.needed)
        _emit(report, fmt, stdout)
        stderr.write(f"strucramsey: {exc.code}: {exc}\n")
        return code


if __name__ == "__main__":
    sys.exit(main())

"""JSON documents for structures, witnesses, families and algebras.

Structure document::

    {"signature": {"relations": [["<", 2]], "functions": [["meet", 2]]},
     "universe": 3,
     "relations": {"<": [[0, 1], [0, 2], [1, 2]]},
     "functions": {"meet": [[[0, 0], 0], [[0, 1], 0], ...]}}

Unknown fields are rejected. Errors carry a line/column (parse errors) or a
JSON path (validation errors).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .boolalg import AtomSetAlgebra
from .errors import MalformedInput
from .indiscernibles import IndexedFamily
from .semiretraction import CrossMap, SemiRetractionWitness
from .structures import FiniteStructure, Signature


def parse_json(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(exc.msg, position=f"{source}:{exc.lineno}:{exc.colno}") from None


def load_document(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from None
    return parse_json(text, str(p))


def _fields(doc, path, required, optional=()):
    if not isinstance(doc, dict):
        raise MalformedInput("expected an object", position=path)
    unknown = set(doc) - set(required) - set(optional)
    if unknown:
        raise MalformedInput(f"unknown fields {sorted(unknown)}", position=path)
    missing = [k for k in required if k not in doc]
    if missing:
        raise MalformedInput(f"missing fields {missing}", position=path)


def _int(x, path):
    if isinstance(x, bool) or not isinstance(x, int):
        raise MalformedInput(f"expected an integer, got {x!r}", position=path)
    return x


def _pairs(x, path):
    if not isinstance(x, list):
        raise MalformedInput("expected a list", position=path)
    out = []
    for i, p in enumerate(x):
        if not (isinstance(p, list) and len(p) == 2 and isinstance(p[0], str)):
            raise MalformedInput("expected [name, arity]", position=f"{path}[{i}]")
        out.append((p[0], _int(p[1], f"{path}[{i}][1]")))
    return out


def structure_from_doc(doc, path="$") -> FiniteStructure:
    _fields(doc, path, ["signature", "universe"], ["relations", "functions", "name"])
    sdoc = doc["signature"]
    _fields(sdoc, f"{path}.signature", [], ["relations", "functions"])
    try:
        sig = Signature(_pairs(sdoc.get("relations", []), f"{path}.signature.relations"),
                        _pairs(sdoc.get("functions", []), f"{path}.signature.functions"))
    except MalformedInput as exc:
        raise MalformedInput(str(exc), position=f"{path}.signature") from None
    n = _int(doc["universe"], f"{path}.universe")
    rels = {}
    for rname, tuples in (doc.get("relations") or {}).items():
        rp = f"{path}.relations.{rname}"
        if not isinstance(tuples, list):
            raise MalformedInput("expected a list of tuples", position=rp)
        rels[rname] = [tuple(_int(x, f"{rp}[{i}]") for x in t) for i, t in enumerate(tuples)]
    funs = {}
    for fname, table in (doc.get("functions") or {}).items():
        fp = f"{path}.functions.{fname}"
        if not isinstance(table, list):
            raise MalformedInput("expected a list of [args, value] entries", position=fp)
        tab = {}
        for i, entry in enumerate(table):
            if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], list)):
                raise MalformedInput("expected [args, value]", position=f"{fp}[{i}]")
            args = tuple(_int(x, f"{fp}[{i}][0]") for x in entry[0])
            if args in tab:
                raise MalformedInput(f"duplicate entry for {list(args)}", position=f"{fp}[{i}]")
            tab[args] = _int(entry[1], f"{fp}[{i}][1]")
        funs[fname] = tab
    try:
        return FiniteStructure(sig, n, rels, funs, name=doc.get("name"))
    except MalformedInput as exc:
        raise MalformedInput(str(exc), position=path) from None


def structure_to_doc(M: FiniteStructure) -> dict:
    doc = {"signature": M.sig.as_dict(), "universe": M.size,
           "relations": {r: [list(t) for t in sorted(M.rel_tables[r])] for r, _ in M.sig.relations},
           "functions": {f: [[list(a), v] for a, v in sorted(M.fun_tables[f].items())]
                         for f, _ in M.sig.functions}}
    if M.name:
        doc["name"] = M.name
    return doc


def _map_from_pairs(pairs, size, path):
    if not isinstance(pairs, list):
        raise MalformedInput("expected a list of [x, y] pairs", position=path)
    mp = [None] * size
    for i, p in enumerate(pairs):
        if not (isinstance(p, list) and len(p) == 2):
            raise MalformedInput("expected [x, y]", position=f"{path}[{i}]")
        x, y = _int(p[0], f"{path}[{i}][0]"), _int(p[1], f"{path}[{i}][1]")
        if not 0 <= x < size:
            raise MalformedInput(f"{x} outside the source universe", position=f"{path}[{i}]")
        if mp[x] is not None:
            raise MalformedInput(f"{x} mapped twice", position=f"{path}[{i}]")
        mp[x] = y
    return tuple(mp)


def witness_from_doc(doc, path="$") -> SemiRetractionWitness:
    _fields(doc, path, ["A_frag", "B_frag", "g", "f"], ["depth", "A_host", "name"])
    A = structure_from_doc(doc["A_frag"], f"{path}.A_frag")
    B = structure_from_doc(doc["B_frag"], f"{path}.B_frag")
    H = structure_from_doc(doc["A_host"], f"{path}.A_host") if "A_host" in doc else A
    try:
        g = CrossMap(A, B, _map_from_pairs(doc["g"], A.size, f"{path}.g"))
        f = CrossMap(B, H, _map_from_pairs(doc["f"], B.size, f"{path}.f"))
        return SemiRetractionWitness(A, B, g, f, depth=_int(doc.get("depth", 4), f"{path}.depth"),
                                     A_host=H, name=doc.get("name", ""))
    except MalformedInput as exc:
        if exc.position:
            raise
        raise MalformedInput(str(exc), position=path) from None


def witness_to_doc(w: SemiRetractionWitness) -> dict:
    doc = {"A_frag": structure_to_doc(w.A_frag), "B_frag": structure_to_doc(w.B_frag),
           "g": [[x, y] for x, y in enumerate(w.g.map) if y is not None],
           "f": [[x, y] for x, y in enumerate(w.f.map) if y is not None],
           "depth": w.depth}
    if w.A_host is not w.A_frag and w.A_host != w.A_frag:
        doc["A_host"] = structure_to_doc(w.A_host)
    if w.name:
        doc["name"] = w.name
    return doc


def family_from_doc(doc, path="$") -> IndexedFamily:
    _fields(doc, path, ["index", "host", "width", "tuples"])
    idx = structure_from_doc(doc["index"], f"{path}.index")
    host = structure_from_doc(doc["host"], f"{path}.host")
    width = _int(doc["width"], f"{path}.width")
    tuples = doc["tuples"]
    if not isinstance(tuples, list):
        raise MalformedInput("expected a list of tuples", position=f"{path}.tuples")
    try:
        return IndexedFamily(idx, host, tuple(tuple(t) for t in tuples), width)
    except MalformedInput as exc:
        raise MalformedInput(str(exc), position=f"{path}.tuples") from None


def family_to_doc(F: IndexedFamily) -> dict:
    return {"index": structure_to_doc(F.index), "host": structure_to_doc(F.host),
            "width": F.width, "tuples": [list(t) for t in F.tuples]}


def algebra_from_doc(doc, path="$") -> AtomSetAlgebra:
    _fields(doc, path, ["atoms"])
    if not isinstance(doc["atoms"], list) or not all(isinstance(a, str) for a in doc["atoms"]):
        raise MalformedInput("atoms must be a list of names", position=f"{path}.atoms")
    return AtomSetAlgebra(tuple(doc["atoms"]))


def algebra_element_doc(B: AtomSetAlgebra, x: int) -> list:
    return sorted(B.names_of(x))


def canonical_digest(*docs) -> str:
    h = hashlib.sha256()
    for d in docs:
        h.update(json.dumps(d, sort_keys=True, separators=(",", ":")).encode())
        h.update(b"\x00")
    return h.hexdigest()

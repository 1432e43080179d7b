# %% [markdown]
# # Graphs and hypergraphs inside finite Boolean algebras
#
# Vertex `n` becomes a private atom joined with one atom per incident edge.
# Two vertices then meet nontrivially exactly when they are adjacent, and no
# three vertices share an atom.

# %%
from itertools import combinations, permutations, product

import numpy as np

from strucramsey.boolalg import qftp_cells, subalgebra_atoms
from strucramsey.constructions import (
    GraphSpec,
    HypergraphSpec,
    all_graphs,
    encode_graph_to_ba,
    encode_hypergraph_to_ba,
    make_graph,
    meet_all,
)
from strucramsey.structures import qftp_fingerprint

# %%
spec = GraphSpec.path(4)
enc = encode_graph_to_ba(spec)
B = enc.algebra
for v, x in enumerate(enc.g):
    print(v, B.names_of(x))

meets = np.array([[int(enc.g[i] & enc.g[j] != 0) for j in range(4)] for i in range(4)])
print(meets)

# %% [markdown]
# Types agree on both sides: two vertex tuples have the same type in the
# graph exactly when their images have the same cell pattern in the algebra.

# %%
G = make_graph(spec)
pairs = {}
for t in product(range(4), repeat=3):
    pairs.setdefault(qftp_fingerprint(G, t), set()).add(qftp_cells(B, [enc.g[x] for x in t]))
print(len(pairs), "graph types, each with", {len(v) for v in pairs.values()}, "pattern(s)")

# %% [markdown]
# Atom counts of the generated subalgebra: a discrete graph on `m` vertices
# gives `m` atoms, the triangle gives six.

# %%
for m in range(1, 6):
    e = encode_graph_to_ba(GraphSpec(m))
    print(m, len(subalgebra_atoms(e.algebra, e.g)))
t = encode_graph_to_ba(GraphSpec.complete(3))
print("triangle:", len(subalgebra_atoms(t.algebra, t.g)))
print("graphs up to iso on 1..5 vertices:", [len(all_graphs(m)) for m in range(1, 6)])

# %% [markdown]
# For 3-uniform hypergraphs the atoms are increasing triples over
# `m + 3` indices. Any two vertices meet, a triple meets exactly when it is an
# edge, four vertices never meet.

# %%
h = HypergraphSpec(5, 3, frozenset({(0, 1, 2), (1, 3, 4)}))
he = encode_hypergraph_to_ba(h)
for k in (2, 3, 4):
    nz = [t for t in combinations(range(5), k) if meet_all([he.g[x] for x in t], he.algebra.one)]
    print(k, len(nz), nz if k == 3 else "")
print("pair patterns:", len({qftp_cells(he.algebra, [he.g[x] for x in t])
                             for t in permutations(range(5), 2)}))

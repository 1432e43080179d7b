# %% [markdown]
# # Partition arrows on small structures
#
# An arrow `C -> (B)^A_{r,d}` asks whether every `r`-coloring of the copies
# of `A` inside `C` leaves some copy of `B` whose `A`-copies use at most `d`
# colors. The checker turns the question into a search for a *bad* coloring.

# %%
import numpy as np

from strucramsey.constructions import make_chain, make_complete_graph
from strucramsey.ramsey import (
    ArrowQuery,
    build_instance,
    check_arrow,
    orientation_coloring,
    two_degrees_check,
    validate_witness,
)

# %% [markdown]
# Pairs in chains: edges of a complete graph, colored red/blue. Triangles
# are 3-chains. Five points admit a coloring without a monochromatic
# triangle, six points do not.

# %%
for n in (5, 6):
    q = ArrowQuery(make_chain(n), make_chain(3), make_chain(2), r=2, d=1)
    v = check_arrow(q)
    print(n, "holds" if v.holds else "fails", v.stats["nodes"], "nodes")
    if v.witness is not None:
        print("  witness valid:", validate_witness(q, v.witness))
        print("  colors:", dict(zip(v.witness.domain, v.witness.colors)))

# %% [markdown]
# The instance itself is a set system over the domain (copies of `A`), one
# set per copy of `B`. The numpy view below is the incidence matrix.

# %%
q = ArrowQuery(make_chain(5), make_chain(3), make_chain(2))
domain, cons, views = build_instance(q)
inc = np.zeros((len(cons), len(domain)), dtype=int)
for i, S in enumerate(cons):
    inc[i, list(S)] = 1
print(inc)
print("every copy of B contains", inc.sum(axis=1).min(), "copies of A")

# %% [markdown]
# Copies against embeddings. An edge has two automorphisms, so coloring
# embeddings of an edge can record its orientation; no triangle in `K6`
# then sees a single color.

# %%
A, B, C = make_complete_graph(2), make_complete_graph(3), make_complete_graph(6)
rep = two_degrees_check(A, B, C, r=2)
print({k: rep[k] for k in ("d_sub", "d_emb", "aut_order")})
oc = orientation_coloring(A, C)
print("orientation refutes d=1 for embeddings:",
      validate_witness(ArrowQuery(C, B, A, 2, 1, "embedding"), oc))

# %% [markdown]
# Raising `d` only makes the arrow easier.

# %%
for d in (1, 2, 3):
    v = check_arrow(ArrowQuery(make_chain(4), make_chain(3), make_chain(2), 2, d))
    print(d, v.holds, v.reason)

# %% [markdown]
# # Semi-retractions on finite fragments
#
# A pair `g: A -> B`, `f: B -> A` of type-respecting injections whose
# composite is an embedding. The convex equivalence relation sits inside a
# strong tree: class `i` goes to the children of the node `0^{2i}`.

# %%
from strucramsey.constructions import ordered_graph_indiscernible_fragment, treeprop_maps
from strucramsey.semiretraction import (
    CrossMap,
    SemiRetractionWitness,
    check_restricted_inverse_images,
    preadjunction_check,
    random_coloring,
    report_as_dict,
    transfer_pipeline_check,
    verify_semiretraction,
)
from strucramsey.structures import generated_substructure

# %%
w = treeprop_maps(c=2, s=2)
print(w.A_frag.size, "points,", w.B_frag.size, "tree nodes, g =", w.g.map)
rep = report_as_dict(verify_semiretraction(w))
for name, chk in rep["checks"].items():
    print(name, chk["passed"], chk["detail"])

# %% [markdown]
# Breaking `f` at one spot is caught at the level of pairs.

# %%
mp = list(w.f.map)
mp[1], mp[2] = mp[2], mp[1]
bad = SemiRetractionWitness(w.A_frag, w.B_frag, w.g, CrossMap(w.f.source, w.f.target, tuple(mp)),
                            A_host=w.A_host)
print(verify_semiretraction(bad)["checks"]["f"])

# %% [markdown]
# Transfer: color pairs in the host, pull the coloring back along `f`, pick a
# copy of `B` where the pulled-back coloring is thin, push it forward again.

# %%
o = ordered_graph_indiscernible_fragment(4)
A, _ = generated_substructure(o.A_host, [o.fg(x) for x in (0, 1)])
c = random_coloring(A, o.A_host, r=2, seed=1)
t = transfer_pipeline_check(o, (0, 1), (0, 1, 2, 3), c)
print("h =", t["h"], "shows", t["d"], "colors; k =", t["k"], "shows", t["colors_on_k"])
print("identity holds on every j:", t["identity_holds"])
for row in t["rows"][:3]:
    print(row)

# %% [markdown]
# Restricted inverse images: three points of one class pull back to three
# siblings, whose consecutive meets agree.

# %%
w3 = treeprop_maps(1, 3, height=2)
a0 = w3.g.apply((0, 1, 2))
res = check_restricted_inverse_images(w3.f, tuple(w3.fg(x) for x in (0, 1, 2)), a0, a0)
B = w3.B_frag
print(res.passed, res.detail["preimages"],
      [B.apply("meet", a0[0], a0[1]), B.apply("meet", a0[1], a0[2])])

# %% [markdown]
# The translation maps built from `(g, f)` commute with composition.

# %%
small = treeprop_maps(1, 2)
pre = preadjunction_check(small, 2)
print(pre["passed"], pre["checked"], "pairs")

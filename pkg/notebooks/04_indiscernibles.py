# %% [markdown]
# # Indexed families
#
# A family indexed by a structure `I` is indiscernible when index tuples of
# one type always carry host tuples of one type.

# %%
from strucramsey.constructions import make_chain, make_set
from strucramsey.indiscernibles import IndexedFamily, atomic_locally_based_check, qf_indiscernible_check

# %% [markdown]
# Index a chain by a chain: fine. Index a chain by a bare set: a pair and
# its reversal have the same index type but opposite order in the host.

# %%
ordered = IndexedFamily.from_map(make_chain(4), make_chain(8), {i: 2 * i for i in range(4)})
print(qf_indiscernible_check(ordered, 3))

bare = IndexedFamily.from_map(make_set(4), make_chain(4), {i: i for i in range(4)})
print(qf_indiscernible_check(bare, 2))

# %% [markdown]
# Local basedness compares two families over the same index: every pattern
# of the second must already appear in the first on an index tuple of the
# same type.

# %%
X = IndexedFamily.from_map(make_chain(3), make_chain(6), {0: 1, 1: 3, 2: 5})
Y = IndexedFamily.from_map(make_chain(3), make_chain(6), {0: 0, 1: 1, 2: 2})
Z = IndexedFamily.from_map(make_chain(3), make_chain(6), {0: 2, 1: 1, 2: 0})
print(atomic_locally_based_check(X, Y, 3))
print(atomic_locally_based_check(X, Z, 2))

from itertools import permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import SIGNATURES, random_structure, structure_pairs, structures
from strucramsey.boolalg import AtomSetAlgebra, export_structure
from strucramsey.budget import Budget
from strucramsey.constructions import GraphSpec, make_chain, make_complete_graph, make_graph, make_pred
from strucramsey.errors import BudgetExceeded, MalformedInput, SignatureMismatch
from strucramsey.structures import (
    FiniteStructure,
    Signature,
    age_enumerate,
    automorphism_group,
    closure_set,
    enumerate_copies,
    enumerate_embeddings,
    generated_substructure,
    is_isomorphic,
    iter_embeddings,
    qftp_fingerprint,
)


def ba(k):
    return export_structure(AtomSetAlgebra.of_size(k))


class TestSignature:
    def test_duplicate_names_rejected(self):
        with pytest.raises(MalformedInput):
            Signature((("R", 2),), (("R", 1),))

    def test_zero_arity_relation_rejected(self):
        with pytest.raises(MalformedInput):
            Signature((("R", 0),))

    def test_arity_budget(self):
        sig = Signature((("R", 9),))
        with pytest.raises(BudgetExceeded):
            FiniteStructure(sig, 1)
        FiniteStructure(sig, 1, budget=Budget(max_arity=9))


class TestFiniteStructure:
    def test_partial_function_rejected(self):
        sig = Signature((), (("s", 1),))
        with pytest.raises(MalformedInput, match="not total"):
            FiniteStructure(sig, 2, {}, {"s": {(0,): 1}})

    def test_out_of_universe_tuple_rejected(self):
        with pytest.raises(MalformedInput):
            FiniteStructure(Signature((("R", 2),)), 2, {"R": [(0, 2)]})

    def test_undeclared_table_rejected(self):
        with pytest.raises(MalformedInput):
            FiniteStructure(Signature(), 2, {"R": []})

    def test_empty_universe_rejected(self):
        with pytest.raises(MalformedInput):
            FiniteStructure(Signature(), 0)


class TestGenerated:
    def test_relational_closure_is_generators(self):
        sub, inc = generated_substructure(make_chain(3), (1,))
        assert sub.size == 1 and not sub.rel_tables["<"]
        assert inc.map == (1,)

    def test_predecessor_closure(self):
        sub, inc = generated_substructure(make_pred(5), (3,))
        assert sub.size == 4
        assert set(inc.map) == {3, 2, 1, 0}
        # term-discovery order follows p
        assert inc.map == (3, 2, 1, 0)

    def test_boolean_algebra_closure(self):
        M = ba(2)
        assert closure_set(M, (1,)) == oracles.closure(M, (1,)) == {0, 1, 2, 3}

    def test_inclusion_is_embedding(self):
        sub, inc = generated_substructure(make_pred(5), (4, 2))
        assert oracles.is_emb(sub, make_pred(5), inc.map)

    @given(structures(), st.data())
    def test_closure_matches_oracle(self, M, data):
        gens = data.draw(st.lists(st.integers(0, M.size - 1), min_size=1, max_size=3))
        assert closure_set(M, gens) == oracles.closure(M, gens)

    @given(structures(), st.data())
    def test_monotone(self, M, data):
        gens = data.draw(st.lists(st.integers(0, M.size - 1), min_size=1, max_size=3))
        extra = data.draw(st.integers(0, M.size - 1))
        assert closure_set(M, gens) <= closure_set(M, gens + [extra])

    @given(structures(), st.data())
    def test_idempotent(self, M, data):
        gens = data.draw(st.lists(st.integers(0, M.size - 1), min_size=1, max_size=3))
        sub, inc = generated_substructure(M, gens)
        again, _ = generated_substructure(M, inc.map)
        assert is_isomorphic(sub, again)


class TestFingerprint:
    def test_chain_pairs(self):
        C = make_chain(3)
        assert qftp_fingerprint(C, (0, 1)) == qftp_fingerprint(C, (1, 2))
        assert qftp_fingerprint(C, (0, 1)) != qftp_fingerprint(C, (1, 0))

    def test_predecessor_depths_differ(self):
        M = make_pred(5)
        assert qftp_fingerprint(M, (2,)) != qftp_fingerprint(M, (3,))
        assert oracles.same_type(M, (2,), M, (3,)) is False

    def test_tuple_bound(self):
        with pytest.raises(BudgetExceeded) as ei:
            qftp_fingerprint(make_chain(8), tuple(range(7)))
        assert ei.value.code == "tuple-length"
        qftp_fingerprint(make_chain(8), tuple(range(7)), Budget(max_tuple=7))

    def test_code_is_flat_ints(self):
        fp = qftp_fingerprint(ba(2), (1, 2))
        assert all(isinstance(x, int) for x in fp.code())
        assert fp.to_bytes() == qftp_fingerprint(ba(2), (1, 2)).to_bytes()

    @given(st.sampled_from(SIGNATURES), st.integers(0, 2**32 - 1), st.integers(1, 3))
    def test_soundness_against_oracle(self, sig, seed, k):
        rng = np.random.default_rng(seed)
        M = random_structure(rng, sig, int(rng.integers(1, 6)))
        N = random_structure(rng, sig, int(rng.integers(1, 6)))
        s = tuple(int(x) for x in rng.integers(0, M.size, k))
        t = tuple(int(x) for x in rng.integers(0, N.size, k))
        assert (qftp_fingerprint(M, s) == qftp_fingerprint(N, t)) == oracles.same_type(M, s, N, t)

    @given(structures(), st.data())
    def test_relabeling_invariance(self, M, data):
        perm = data.draw(st.permutations(range(M.size)))
        t = tuple(data.draw(st.lists(st.integers(0, M.size - 1), min_size=1, max_size=3)))
        N = M.relabel(perm)
        assert qftp_fingerprint(M, t) == qftp_fingerprint(N, tuple(perm[x] for x in t))


class TestEmbeddings:
    def test_chains(self):
        embs = enumerate_embeddings(make_chain(2), make_chain(3))
        assert [e.map for e in embs] == [(0, 1), (0, 2), (1, 2)]

    def test_triangle(self):
        assert len(enumerate_embeddings(make_complete_graph(2), make_complete_graph(3))) == 6

    def test_boolean_algebras(self):
        # frozen from the brute-force oracle: surjections 3 -> 2
        assert len(oracles.embeddings(ba(2), ba(3))) == 6
        assert len(enumerate_embeddings(ba(2), ba(3))) == 6

    def test_signature_mismatch(self):
        with pytest.raises(SignatureMismatch):
            enumerate_embeddings(make_chain(2), make_complete_graph(3))

    def test_fixed_and_limit(self):
        embs = enumerate_embeddings(make_chain(2), make_chain(4), fixed={0: 1})
        assert [e.map for e in embs] == [(1, 2), (1, 3)]
        assert len(enumerate_embeddings(make_chain(2), make_chain(4), limit=2)) == 2

    @given(structure_pairs())
    def test_matches_oracle_in_lex_order(self, pair):
        A, C = pair
        assert [e.map for e in enumerate_embeddings(A, C)] == oracles.embeddings(A, C)

    @given(structure_pairs(), st.data())
    def test_relabeling_preserves_counts(self, pair, data):
        A, C = pair
        perm = data.draw(st.permutations(range(C.size)))
        D = C.relabel(perm)
        assert len(enumerate_embeddings(A, C)) == len(enumerate_embeddings(A, D))
        assert len(enumerate_copies(A, C)) == len(enumerate_copies(A, D))

    @given(structure_pairs())
    def test_quotient_by_automorphisms(self, pair):
        A, C = pair
        assert len(enumerate_embeddings(A, C)) == len(enumerate_copies(A, C)) * automorphism_group(A).order


class TestCopies:
    def test_chain_copies(self):
        assert enumerate_copies(make_chain(2), make_chain(3)) == [(0, 1), (0, 2), (1, 2)]

    def test_edge_copies(self):
        assert len(enumerate_copies(make_complete_graph(2), make_complete_graph(3))) == 3

    def test_two_element_subalgebra_is_unique(self):
        assert oracles.copies(ba(1), ba(2)) == [(0, 3)]
        assert enumerate_copies(ba(1), ba(2)) == [(0, 3)]


class TestAutomorphisms:
    def test_triangle(self):
        assert automorphism_group(make_complete_graph(3)).order == 6

    def test_chain_rigid(self):
        G = automorphism_group(make_chain(5))
        assert G.order == 1 and G.is_rigid and G.generators == ()

    @pytest.mark.parametrize("k,expected", [(1, 1), (2, 2), (3, 6), (4, 24)])
    def test_boolean_algebra(self, k, expected):
        assert automorphism_group(ba(k)).order == expected

    def test_generators_generate(self):
        G = automorphism_group(make_graph(GraphSpec(4, frozenset({(0, 1), (2, 3)}))))
        assert G.order == 8
        assert 1 <= len(G.generators) <= 3


class TestAge:
    def test_chain(self):
        reps = age_enumerate(make_chain(4), 2)
        assert sorted(r.size for r in reps) == [1, 2]

    def test_triangle_plus_point(self):
        M = make_graph(GraphSpec(4, frozenset({(0, 1), (0, 2), (1, 2)})))
        reps = age_enumerate(M, 2)
        assert sorted((r.size, len(r.rel_tables["R"])) for r in reps) == [(1, 0), (2, 0), (2, 2)]

    def test_predecessor(self):
        reps = age_enumerate(make_pred(5), 1)
        assert sorted(r.size for r in reps) == [1, 2, 3, 4, 5, 6]

    def test_bad_k(self):
        with pytest.raises(MalformedInput):
            age_enumerate(make_chain(3), 0)

    def test_candidate_budget(self):
        with pytest.raises(BudgetExceeded):
            age_enumerate(make_chain(10), 3, Budget(age_candidates=5))

    @given(structures(max_size=4), st.integers(1, 2))
    def test_classes_pairwise_distinct_and_cover(self, M, k):
        reps = age_enumerate(M, k)
        for i, j in permutations(range(len(reps)), 2):
            assert not is_isomorphic(reps[i], reps[j])
        from itertools import combinations
        for n in range(1, k + 1):
            for gens in combinations(range(M.size), n):
                sub, _ = generated_substructure(M, gens)
                assert sum(is_isomorphic(sub, r) for r in reps) == 1


def test_iter_embeddings_forced_values_agree():
    # functional source: forced positions must still respect everything
    M = make_pred(4)
    sub, _ = generated_substructure(M, (2,))
    assert list(iter_embeddings(sub, M)) == oracles.embeddings(sub, M)

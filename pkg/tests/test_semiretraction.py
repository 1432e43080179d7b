from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import structures
from strucramsey.constructions import (
    GraphSpec,
    TreeSpec,
    graph_ba_fragment,
    interdefinability_fragments,
    make_chain,
    make_tree,
    not_sr_fragment,
    ordered_graph_indiscernible_fragment,
    treeprop_maps,
)
from strucramsey.errors import FragmentIncomplete, MalformedInput
from strucramsey.ramsey import orientation_coloring
from strucramsey.semiretraction import (
    CrossMap,
    SemiRetractionWitness,
    check_composition_embedding,
    check_qftp_respecting,
    check_restricted_inverse_images,
    effective_depth,
    induced_coloring,
    preadjunction_check,
    random_coloring,
    report_as_dict,
    transfer_pipeline_check,
    tuples_like,
    verify_semiretraction,
)
from strucramsey.structures import generated_substructure, qftp_fingerprint


def identity_witness(M):
    ident = tuple(range(M.size))
    return SemiRetractionWitness(M, M, CrossMap(M, M, ident), CrossMap(M, M, ident), depth=3)


def swap(cm, x, y):
    mp = list(cm.map)
    mp[x], mp[y] = mp[y], mp[x]
    return CrossMap(cm.source, cm.target, tuple(mp))


class TestCrossMap:
    def test_not_injective(self):
        with pytest.raises(MalformedInput):
            CrossMap(make_chain(2), make_chain(3), (1, 1))

    def test_wrong_length(self):
        with pytest.raises(MalformedInput):
            CrossMap(make_chain(2), make_chain(3), (1,))

    def test_partial(self):
        h = CrossMap(make_chain(3), make_chain(3), (0, None, 2))
        assert h.domain == [0, 2]
        with pytest.raises(FragmentIncomplete):
            h(1)
        with pytest.raises(FragmentIncomplete):
            h.preimage((1,))

    def test_then(self):
        C = make_chain(4)
        h = CrossMap(C, C, (1, 2, 3, 0))
        assert h.then(h).map == (2, 3, 0, 1)


class TestRespecting:
    @given(structures(max_size=4))
    @settings(max_examples=30)
    def test_identity_passes(self, M):
        assert check_qftp_respecting(CrossMap(M, M, tuple(range(M.size))), 3, exhaustive=True).passed

    @given(structures(max_size=4), st.data())
    @settings(max_examples=30)
    def test_automorphic_relabel_passes(self, M, data):
        perm = data.draw(st.permutations(range(M.size)))
        assert check_qftp_respecting(CrossMap(M, M.relabel(perm), tuple(perm)), 3, exhaustive=True).passed

    def test_effective_depth(self):
        C = make_chain(5)
        assert effective_depth(C, 4) == 2
        w = treeprop_maps(2, 2)
        assert effective_depth(w.B_frag, 4) == 4

    def test_reduced_depth_agrees_with_full_depth(self):
        w = ordered_graph_indiscernible_fragment(5)
        for h in (w.g, w.f, swap(w.g, 0, 3)):
            assert check_qftp_respecting(h, 4).passed == check_qftp_respecting(h, 4, exhaustive=True).passed

    def test_reversal_is_not_respecting(self):
        C = make_chain(3)
        res = check_qftp_respecting(CrossMap(C, C, (0, 2, 1)), 2)
        assert not res.passed and len(res.counterexample) == 2

    def test_interleaving_fails_at_pairs(self):
        f, g = not_sr_fragment(3)
        res = check_qftp_respecting(g, 2)
        assert not res.passed
        s, t = res.counterexample
        assert len(s) == len(t) == 2
        assert qftp_fingerprint(g.source, s) == qftp_fingerprint(g.source, t)
        assert qftp_fingerprint(g.target, g.apply(s)) != qftp_fingerprint(g.target, g.apply(t))

    def test_depth_budget(self):
        from strucramsey.budget import Budget
        from strucramsey.errors import BudgetExceeded
        M = make_chain(3)
        with pytest.raises(BudgetExceeded):
            check_qftp_respecting(CrossMap(M, M, (0, 1, 2)), 7, Budget(max_tuple=6))


class TestWitnesses:
    @pytest.mark.parametrize("make", [
        lambda: treeprop_maps(2, 2),
        lambda: treeprop_maps(1, 3),
        lambda: ordered_graph_indiscernible_fragment(4),
        lambda: graph_ba_fragment()[0],
        lambda: interdefinability_fragments("pred"),
        lambda: interdefinability_fragments("succ_reduct"),
        lambda: identity_witness(make_chain(4)),
    ])
    def test_builtin_witnesses_verify(self, make):
        w = make()
        rep = verify_semiretraction(w)
        assert rep["passed"], report_as_dict(rep)
        assert w.status == {"g": True, "f": True, "fg": True}

    def test_wrapping_predecessor_is_not_interdefinable(self):
        # p(0) = n makes every point look alike; the successor relation does not wrap
        rep = verify_semiretraction(interdefinability_fragments("pred", zero_fixed=False))
        assert not rep["checks"]["g"].passed and rep["checks"]["f"].passed

    def test_f_mutation_fails(self):
        w = treeprop_maps(2, 2)
        bad = SemiRetractionWitness(w.A_frag, w.B_frag, w.g, swap(w.f, 1, 2), A_host=w.A_host)
        rep = verify_semiretraction(bad)
        assert not rep["passed"] and not rep["checks"]["f"].passed
        assert len(rep["checks"]["f"].counterexample) == 2

    def test_g_swap_breaks_composite(self):
        w = treeprop_maps(2, 2)
        bad = SemiRetractionWitness(w.A_frag, w.B_frag, swap(w.g, 0, 2), w.f, A_host=w.A_host)
        res = check_composition_embedding(bad)
        assert not res.passed and res.kind == "counterexample"

    def test_incomplete_fragment(self):
        M = make_chain(3)
        w = SemiRetractionWitness(M, M, CrossMap(M, M, (0, 1, 2)), CrossMap(M, M, (0, None, 2)))
        with pytest.raises(FragmentIncomplete):
            check_composition_embedding(w)
        rep = verify_semiretraction(w)
        assert rep["checks"]["fg"].kind == "fragment-incomplete"

    def test_host_signature_checked(self):
        w = treeprop_maps(1, 2)
        with pytest.raises(MalformedInput):
            SemiRetractionWitness(w.A_frag, w.B_frag, w.g, w.f, A_host=make_chain(w.A_host.size))


class TestRestricted:
    def test_all_short_tuples_on_small_treeprop(self):
        w = treeprop_maps(1, 2)
        tups = [t for n in (1, 2) for t in permutations(range(w.A_frag.size), n)]
        like = {b: tuples_like(w.B_frag, w.g.apply(b)) for b in tups}
        for a in tups:
            fa = tuple(w.fg(x) for x in a)
            for b in tups:
                for b0 in like[b]:
                    assert check_restricted_inverse_images(w.f, fa, b0, w.g.apply(a)).passed

    def test_meet_equality_type_is_the_witness(self):
        w = treeprop_maps(1, 3, height=2)
        B = w.B_frag
        a = (0, 1, 2)
        b0 = w.g.apply(a)
        res = check_restricted_inverse_images(w.f, tuple(w.fg(x) for x in a), b0, b0)
        assert res.passed and res.detail["preimages"] == [b0]
        assert B.apply("meet", b0[0], b0[1]) == B.apply("meet", b0[1], b0[2])

    def test_three_preimage_types_in_deeper_level(self):
        w = treeprop_maps(1, 3, height=2)
        B = w.B_frag
        _, nodes = make_tree(TreeSpec(4, 2, "strtree"))
        level = [i for i, v in enumerate(nodes) if len(v) == 2]
        types = {}
        for t in combinations(level, 3):
            types.setdefault(qftp_fingerprint(B, t), t)
        assert len(types) == 3
        equal_meets = [t for t in types.values()
                       if B.apply("meet", t[0], t[1]) == B.apply("meet", t[1], t[2])]
        assert len(equal_meets) == 1
        a0 = w.g.apply((0, 1, 2))
        assert qftp_fingerprint(B, equal_meets[0]) == qftp_fingerprint(B, a0)
        # any other type offered as the target pattern is rejected
        other = next(t for t in types.values() if t != equal_meets[0])
        res = check_restricted_inverse_images(w.f, w.f.apply(other), other, a0)
        assert not res.passed and res.kind == "wrong-type"

    def test_escapes_image(self):
        from strucramsey.constructions import make_pred, make_set
        # <f(0)> = <3> = {3, 2, 1, 0} in the predecessor fragment, but 2 is not an f-value
        f = CrossMap(make_set(2), make_pred(3), (3, 1))
        res = check_restricted_inverse_images(f, (2,), (0,), (0,))
        assert not res.passed and res.kind == "escapes-image" and res.counterexample == (2,)

    def test_single_orbit_is_trivial(self):
        D = make_chain(3)
        assert check_restricted_inverse_images(CrossMap(D, D, (0, 1, 2)), (0,), (1,), (1,)).passed

    def test_outside_b0(self):
        from strucramsey.constructions import make_pred
        P = make_pred(3)
        f = CrossMap(P, P, (0, 1, 2, 3))
        # <f(3)> contains 2, which is not in b0 = (3,)
        res = check_restricted_inverse_images(f, (2,), (3,), (2,))
        assert not res.passed and res.kind == "outside-b0"

    def test_length_mismatch(self):
        C = make_chain(3)
        with pytest.raises(MalformedInput):
            check_restricted_inverse_images(CrossMap(C, C, (0, 1, 2)), (0, 1), (0,), (0,))


class TestTransfer:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_ordered_graph(self, seed):
        w = ordered_graph_indiscernible_fragment(4)
        A, _ = generated_substructure(w.A_host, [w.fg(x) for x in (0, 1)])
        c = random_coloring(A, w.A_host, 2, seed)
        rep = transfer_pipeline_check(w, (0, 1), (0, 1, 2, 3), c)
        assert rep["passed"] and rep["identity_holds"] and rep["k_is_embedding"]
        assert len(rep["rows"]) == 6

    def test_constant_coloring_pulls_back_constant(self):
        w, _ = graph_ba_fragment()
        A, _ = generated_substructure(w.A_host, [w.fg(x) for x in (0, 1)])
        c = {e: 0 for e in random_coloring(A, w.A_host, 2, 0)}
        ic = induced_coloring(c, w, (0, 1))
        assert set(ic.colors.values()) == {0}

    def test_identity_witness_pullback_is_the_coloring(self):
        w = identity_witness(make_chain(4))
        A, _ = generated_substructure(w.A_host, (0, 1))
        c = random_coloring(A, w.A_host, 3, 5)
        ic = induced_coloring(c, w, (0, 1))
        assert ic.colors == c

    def test_orientation_pullback_distinguishes_reversals(self):
        w, _ = graph_ba_fragment()
        A, _ = generated_substructure(w.A_host, [w.fg(x) for x in (0, 1)])
        oc = orientation_coloring(A, w.A_host)
        ic = induced_coloring(oc.color_of(), w, (0, 1))
        assert set(ic.colors.values()) == {0, 1}

    def test_given_h_must_embed(self):
        w = ordered_graph_indiscernible_fragment(4)
        A, _ = generated_substructure(w.A_host, (0, 1))
        c = random_coloring(A, w.A_host, 2, 0)
        with pytest.raises(MalformedInput):
            transfer_pipeline_check(w, (0, 1), (0, 1, 2), c, h=(2, 1, 0))


class TestPreadjunction:
    def test_identity_small(self):
        w = identity_witness(make_chain(3))
        rep = preadjunction_check(w, 2)
        assert rep["passed"] and rep["checked"] > 0

    def test_treeprop(self):
        rep = preadjunction_check(treeprop_maps(1, 2), 2)
        assert rep["passed"] and rep["checked"] > 0

    def test_wrong_phi_fails(self):
        w = treeprop_maps(1, 2)
        rep = preadjunction_check(w, 2, phi=lambda psi, dom: {x: w.f(psi[x]) for x in dom})
        assert not rep["passed"] and rep["failures"]

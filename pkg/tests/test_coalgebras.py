import pytest

from hybridkit.coalgebras import (
    Coalgebra,
    TreeCover,
    carrier_tree_cover,
    check_coalgebra_laws,
    check_open_pathwise_embedding,
    coalgebra_number,
    coalgebra_to_cover,
    cover_to_coalgebra,
    enumerate_coalgebras,
    enumerate_generated_covers,
    generated_tree_depth,
    is_generated_tree_cover,
)
from hybridkit.comonads import ComonadKind, build_comonad, counit, play_join
from hybridkit.errors import ResourceLimitError
from hybridkit.structures import INF, Signature, Structure

from fixtures import (
    BOUNDED_FIXTURES,
    FIXTURES30,
    ISOLATED_P,
    LOOP,
    PATH3,
    STAR2,
    UNIMODAL,
    unimodal,
)

CHAIN3 = TreeCover(PATH3, {"b": "a", "c": "b"})
STAR_COVER = TreeCover(STAR2, {"b1": "a", "b2": "a"})


class TestCoverPredicate:
    def test_path3_chain(self):
        assert is_generated_tree_cover(CHAIN3)
        assert CHAIN3.height() == 3

    def test_star_cover(self):
        assert is_generated_tree_cover(STAR_COVER)
        assert STAR_COVER.height() == 2

    def test_adjacent_elements_must_be_comparable(self):
        flat = TreeCover(PATH3, {"b": "a", "c": "a"})
        assert not is_generated_tree_cover(flat)

    def test_generation_requires_transition_from_strict_predecessor(self):
        s = unimodal(["a", "b"], [])  # no edges: b cannot be generated
        assert not is_generated_tree_cover(TreeCover(s, {"b": "a"}))

    def test_cycle_raises(self):
        cover = TreeCover(PATH3, {"b": "c", "c": "b"})
        with pytest.raises(ValueError):
            is_generated_tree_cover(cover)

    def test_height_bound(self):
        assert is_generated_tree_cover(CHAIN3, 2)
        assert not is_generated_tree_cover(CHAIN3, 1)


class TestConversions:
    def test_path3_alpha(self):
        alg = cover_to_coalgebra(CHAIN3, 2)
        assert alg.alpha["c"] == "a.b.c"

    def test_star_alpha(self):
        alg = cover_to_coalgebra(STAR_COVER, 1)
        assert alg.alpha["b1"] == "a.b1"
        assert alg.alpha["b2"] == "a.b2"

    def test_round_trip_on_enumerated_covers(self):
        for s in FIXTURES30[:12]:
            for k in (1, 2, 3):
                for cover in enumerate_generated_covers(s, k):
                    alg = cover_to_coalgebra(cover, k)
                    assert coalgebra_to_cover(alg) == cover

    def test_height_bound_enforced(self):
        with pytest.raises(ValueError):
            cover_to_coalgebra(CHAIN3, 1)


class TestLaws:
    def test_converted_covers_pass(self):
        report = check_coalgebra_laws(cover_to_coalgebra(CHAIN3, 2))
        assert report.all_pass

    def test_truncated_play_fails_counit(self):
        alg = cover_to_coalgebra(CHAIN3, 2)
        bad = dict(alg.alpha)
        bad["c"] = "a.b"
        report = check_coalgebra_laws(Coalgebra(alg.target, bad))
        assert not report.counit_law

    def test_ef_style_assignment_fails_hybrid_membership(self):
        # an isolated vertex can be played in the EF carrier but is not
        # generated, so the branch is not a hybrid play
        target = build_comonad(ISOLATED_P, ComonadKind.HYBRID, 2)
        alpha = {"a": "a", "z": "a.z"}
        report = check_coalgebra_laws(Coalgebra(target, alpha))
        assert not report.membership
        ef = build_comonad(ISOLATED_P, ComonadKind.EF, 2)
        assert "a.z" in set(ef.plays)


class TestDepthAndNumber:
    def test_path3(self):
        assert generated_tree_depth(PATH3) == 3

    def test_star(self):
        assert generated_tree_depth(STAR2) == 2

    def test_isolated_vertex_has_no_cover(self):
        assert generated_tree_depth(ISOLATED_P) == INF
        assert coalgebra_number(ISOLATED_P) == INF

    @pytest.mark.parametrize("s", FIXTURES30[:14], ids=range(14))
    def test_number_matches_depth_offset(self, s):
        depth = generated_tree_depth(s)
        number = coalgebra_number(s, ComonadKind.HYBRID)
        if depth == INF:
            assert number == INF
        else:
            assert number == max(depth - 1, 1)


class TestBijectionCount:
    @pytest.mark.parametrize("s", FIXTURES30[:12], ids=range(12))
    def test_counts_match(self, s):
        for k in (1, 2, 3):
            covers = list(enumerate_generated_covers(s, k))
            coalgebras = list(enumerate_coalgebras(s, ComonadKind.HYBRID, k))
            assert len(covers) == len(coalgebras)
            converted = {coalgebra_to_cover(c) for c in coalgebras}
            assert converted == set(covers)

    def test_bounded_m2_chain_condition(self):
        for s in BOUNDED_FIXTURES[:4]:
            m = s.signature.num_basepoints
            for cover in enumerate_generated_covers(s, 2):
                bps = s.basepoints
                assert cover.roots() == (bps[0],)
                for i in range(1, m):
                    assert cover.parent[bps[i]] == bps[i - 1]
                assert cover.height() - m <= 2


class TestCarrierCover:
    @pytest.mark.parametrize("s", FIXTURES30[:8], ids=range(8))
    def test_prefix_order_is_generated_cover(self, s):
        c = build_comonad(s, ComonadKind.HYBRID, 2)
        cover = carrier_tree_cover(c)
        assert is_generated_tree_cover(cover, 2)

    @pytest.mark.parametrize("s", FIXTURES30[:8], ids=range(8))
    def test_counit_triangle(self, s):
        for k in (1, 2):
            for cover in enumerate_generated_covers(s, k):
                alg = cover_to_coalgebra(cover, k)
                for e in s.universe:
                    assert counit(alg.target, alg.alpha[e]) == e


class TestOpenPathwiseEmbeddings:
    def test_identity(self):
        ident = {e: e for e in PATH3.universe}
        assert check_open_pathwise_embedding(ident, CHAIN3, CHAIN3)

    def test_collapsing_distinct_atoms_is_not_pathwise(self):
        base = unimodal(["a", "b1", "b2"], [("a", "b1"), ("a", "b2")], pos=["b1"])
        target = unimodal(["a", "b"], [("a", "b")], pos=["b"])
        cover = TreeCover(base, {"b1": "a", "b2": "a"})
        target_cover = TreeCover(target, {"b": "a"})
        f = {"a": "a", "b1": "b", "b2": "b"}
        assert not check_open_pathwise_embedding(f, cover, target_cover)

    def test_pruned_branch_fails_lifting(self):
        full = unimodal(["a", "b", "c"], [("a", "b"), ("b", "c")])
        pruned = unimodal(["a", "b"], [("a", "b")])
        full_cover = TreeCover(full, {"b": "a", "c": "b"})
        pruned_cover = TreeCover(pruned, {"b": "a"})
        inclusion = {"a": "a", "b": "b"}
        assert not check_open_pathwise_embedding(inclusion, pruned_cover, full_cover)

    def test_size_guard(self):
        with pytest.raises(ResourceLimitError):
            check_open_pathwise_embedding(
                {e: e for e in PATH3.universe}, CHAIN3, CHAIN3, size_guard=2
            )

    def test_non_morphism_rejected(self):
        with pytest.raises(ValueError):
            check_open_pathwise_embedding(
                {"a": "a", "b": "a", "c": "a"}, CHAIN3, CHAIN3
            )

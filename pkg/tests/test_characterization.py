import random

import pytest

from hybridkit import syntax as sx
from hybridkit.characterization import (
    WorkspaceStrategy,
    build_workspace,
    check_invariance,
    synthesize_bounded_equivalent,
    verify_workspace,
    workspace_game_result,
)
from hybridkit.games import DUPLICATOR, GameVariant, solve, verify_strategy
from hybridkit.parser import parse_fo
from hybridkit.randgen import random_bounded_sentence, random_structure
from hybridkit.scott import characteristic_formula
from hybridkit.semantics import eval_fo
from hybridkit.structures import (
    ball_part,
    gaifman_distance,
    is_partial_isomorphism,
    reachable_part,
)

from fixtures import (
    C2,
    FIXTURES30,
    ISOLATED_P,
    LOOP,
    PATH3,
    PATH6,
    STAR2,
    UNIMODAL,
)


class TestBuildWorkspace:
    def test_size_bound(self):
        workspace, _, _ = build_workspace(PATH3, 1)
        assert len(workspace) <= 2 * 1 * len(PATH3)

    def test_path6_example(self):
        workspace, left, right = build_workspace(PATH6, 1)
        # ball of radius 2 around a has 3 elements, so |C| = 6 + 3
        assert len(workspace) == 9
        assert len(workspace) <= 12

    def test_ball_covering_gives_equal_sides(self):
        # diameter < 2^q, so the ball is the whole structure
        _, left, right = build_workspace(PATH3, 2)
        assert left == right

    def test_shared_ids_between_sides(self):
        _, left, right = build_workspace(PATH6, 1)
        assert set(right.universe) <= set(left.universe)
        assert left.basepoints == right.basepoints


class TestStrategyCases:
    def test_case_one_copies_near_moves(self):
        machine = WorkspaceStrategy(PATH6, 1)
        state = machine.initial_state()
        nxt = machine.step(state, "left", "A:x1")  # adjacent to the basepoint
        assert nxt.right_play[-1] == "A:x1"
        assert "A:x1" in nxt.c0 and "A:x1" in nxt.d0

    def test_case_three_opens_fresh_summand(self):
        machine = WorkspaceStrategy(PATH6, 1)
        state = machine.initial_state()
        nxt = machine.step(state, "left", "M1:x4")
        assert nxt.right_play[-1] == "M1:x4"  # the shared workspace copy
        assert nxt.rho[-1] == ("M1", "M1")

    def test_case_three_far_real_element(self):
        machine = WorkspaceStrategy(PATH6, 1)
        state = machine.initial_state()
        nxt = machine.step(state, "left", "A:x5")  # distance 5 > 1 from basepoint
        assert nxt.rho[-1] == ("A", "M1")
        assert nxt.right_play[-1] == "M1:x5"

    def test_case_two_follows_recorded_isomorphism(self):
        machine = WorkspaceStrategy(PATH6, 2)
        state = machine.initial_state()
        state = machine.step(state, "left", "A:x4")  # far: case III
        assert state.rho[-1] == ("A", "M1")
        nxt = machine.step(state, "left", "A:x5")  # within 1 of x4: case II
        assert nxt.right_play[-1] == "M1:x5"
        assert nxt.rho[-1] == ("A", "M1")

    def test_radius_halves_each_round(self):
        machine = WorkspaceStrategy(PATH6, 2)
        state = machine.initial_state()
        radii = [state.radius]
        for element in ("A:x1", "A:x2"):
            state = machine.step(state, "left", element)
            radii.append(state.radius)
        assert radii == [4, 2, 1]

    def test_invariants_hold_after_every_step(self):
        machine = WorkspaceStrategy(PATH3, 2)
        state = machine.initial_state()
        for side, element in [
            ("left", "A:b"),
            ("right", "N2:a"),
        ]:
            state = machine.step(state, side, element)
            assert machine.invariant_violations(state) == []


class TestVerifyWorkspace:
    @pytest.mark.parametrize("s", [LOOP, PATH3, C2, STAR2, ISOLATED_P])
    def test_small_fixtures(self, s):
        for q in (1, 2):
            assert verify_workspace(s, q)

    def test_two_basepoint_structures(self):
        from fixtures import BOUNDED_FIXTURES

        for s in BOUNDED_FIXTURES[:3]:
            assert verify_workspace(s, 1)

    def test_path6(self):
        assert verify_workspace(PATH6, 1)

    def test_strategy_verifies_as_ef_strategy(self):
        result, violations = workspace_game_result(PATH3, 1)
        assert violations == []
        _, left, right = build_workspace(PATH3, 1)
        assert verify_strategy(result, left, right, GameVariant.EF, 1)

    def test_sabotaged_case_two_fails(self):
        machine = WorkspaceStrategy(PATH6, 2)
        state = machine.initial_state()
        state = machine.step(state, "left", "A:x4")  # case III, answered in M1
        good = machine.step(state, "left", "A:x5")  # case II follows the same rho
        assert machine.invariant_violations(good) == []
        # sabotage: answer the case-II move with the wrong isomorphism
        bad = type(good)(
            good.left_play,
            good.right_play[:-1] + ("N1:a",),
            good.c0,
            good.c1,
            good.d0,
            (good.d1 - {good.right_play[-1]}) | {"N1:a"},
            good.rho[:-1] + (("A", "N1"),),
            good.round,
            good.q,
        )
        pairs = tuple(zip(bad.left_play, bad.right_play))
        iso = is_partial_isomorphism(
            pairs, machine.left.structure, machine.right.structure
        )
        assert machine.invariant_violations(bad) and not iso


class TestUnionLemma:
    def test_separated_partial_isomorphisms_union(self):
        rng = random.Random(99)
        for _ in range(40):
            s = random_structure(rng, max_size=4, signature=UNIMODAL)
            t = random_structure(rng, max_size=4, signature=UNIMODAL)
            from hybridkit.structures import disjoint_union

            big = disjoint_union(s, t)
            dist = gaifman_distance(big)
            elems = list(big.universe)
            isos = []
            for _ in range(30):
                size = rng.randint(1, 2)
                dom = rng.sample(elems, min(size, len(elems)))
                rng_side = rng.sample(elems, len(dom))
                pairs = list(zip(dom, rng_side))
                if is_partial_isomorphism(pairs, big, big):
                    isos.append(pairs)
            for i, alpha in enumerate(isos):
                for beta in isos[i + 1 :]:
                    dom_d = dist.set_distance(
                        [x for x, _ in alpha], [x for x, _ in beta]
                    )
                    ran_d = dist.set_distance(
                        [y for _, y in alpha], [y for _, y in beta]
                    )
                    if dom_d > 1 and ran_d > 1:
                        assert is_partial_isomorphism(alpha + beta, big, big)


class TestInvariance:
    def test_bounded_sentences_are_generated_invariant(self):
        rng = random.Random(17)
        corpus = FIXTURES30[:12]
        for _ in range(30):
            rank = rng.randint(0, 2)
            f = random_bounded_sentence(rng, UNIMODAL, rank)
            report = check_invariance(f, f"generated:{max(rank, 1)}", corpus)
            assert report.invariant, (f, report.counterexamples)

    def test_invariance_extends_to_larger_radius(self):
        rng = random.Random(18)
        corpus = FIXTURES30[:10]
        for _ in range(20):
            f = random_bounded_sentence(rng, UNIMODAL, 1)
            for radius in (1, 2, 3):
                assert check_invariance(f, f"generated:{radius}", corpus).invariant

    def test_unbounded_sentence_flagged(self):
        f = parse_fo("exists y (P(y))")
        report = check_invariance(f, "generated:1", [ISOLATED_P])
        assert not report.invariant
        entry = report.counterexamples[0]
        assert entry.original is True and entry.transformed is False

    def test_disjoint_invariance_of_bounded_sentences(self):
        rng = random.Random(19)
        corpus = FIXTURES30[:8]
        for _ in range(10):
            f = random_bounded_sentence(rng, UNIMODAL, 1)
            assert check_invariance(f, "disjoint", corpus).invariant

    def test_free_variables_rejected(self):
        with pytest.raises(ValueError):
            check_invariance(parse_fo("P(x)"), "generated:1", [LOOP])


class TestLemmaCrosswalks:
    def test_bounded_equivalence_survives_reachable_part(self):
        subset = FIXTURES30[:10]
        for a in subset:
            for b in subset:
                for m in (1, 2):
                    if solve(a, b, GameVariant.BACK_FORTH_BOUNDED, m).winner == DUPLICATOR:
                        for k in (1, 2):
                            ra, rb = reachable_part(a, k), reachable_part(b, k)
                            assert (
                                solve(ra, rb, GameVariant.BACK_FORTH_BOUNDED, m).winner
                                == DUPLICATOR
                            )

    def test_long_bounded_game_gives_ef_equivalence_on_reachable_parts(self):
        subset = FIXTURES30[:10]
        k, q = 2, 1
        for a in subset:
            for b in subset:
                ra, rb = reachable_part(a, k), reachable_part(b, k)
                bounded = solve(ra, rb, GameVariant.BACK_FORTH_BOUNDED, k * q).winner
                if bounded == DUPLICATOR:
                    assert solve(ra, rb, GameVariant.EF, q).winner == DUPLICATOR

    def test_temporal_equivalence_survives_ball_part(self):
        subset = FIXTURES30[:10]
        for a in subset:
            for b in subset:
                for m in (1, 2):
                    if (
                        solve(a, b, GameVariant.BACK_FORTH_TEMPORAL, m).winner
                        == DUPLICATOR
                    ):
                        for k in (1, 2):
                            sa, sb = ball_part(a, k), ball_part(b, k)
                            assert (
                                solve(sa, sb, GameVariant.BACK_FORTH_TEMPORAL, m).winner
                                == DUPLICATOR
                            )

    def test_long_temporal_game_gives_ef_equivalence_on_ball_parts(self):
        subset = FIXTURES30[:10]
        k, q = 2, 1
        for a in subset:
            for b in subset:
                sa, sb = ball_part(a, k), ball_part(b, k)
                temporal = solve(sa, sb, GameVariant.BACK_FORTH_TEMPORAL, k * q).winner
                if temporal == DUPLICATOR:
                    assert solve(sa, sb, GameVariant.EF, q).winner == DUPLICATOR


class TestSynthesis:
    def test_single_structure_corpus(self):
        f = parse_fo("E(c1,c1)")  # quantifier rank 0, so the target rank is 0
        out = synthesize_bounded_equivalent(f, 1, [LOOP])
        assert out == characteristic_formula(LOOP, 0)

    def test_bounded_input_agrees_on_corpus(self):
        corpus = [LOOP, C2, PATH3, STAR2]
        f = parse_fo("exists y (E(c1,y) & P(y))")
        out = synthesize_bounded_equivalent(f, 1, corpus)
        for s in corpus:
            assert eval_fo(out, s) == eval_fo(f, s)

    def test_relativized_sentence_agrees_on_corpus(self):
        from hybridkit.semantics import gaifman_relativize

        corpus = [LOOP, C2, PATH3, STAR2, ISOLATED_P]
        f = gaifman_relativize(parse_fo("exists y (P(y))"), 1, UNIMODAL)
        out = synthesize_bounded_equivalent(f, 1, corpus)
        for s in corpus:
            assert eval_fo(out, s) == eval_fo(f, s)

    def test_rejects_non_invariant_sentence(self):
        with pytest.raises(ValueError):
            synthesize_bounded_equivalent(
                parse_fo("exists y (P(y))"), 1, [ISOLATED_P]
            )

"""The constructive workspace argument, invariance checkers, and the
desk-scale pipeline turning an invariant sentence into a bounded equivalent.

The workspace construction pads a pointed structure A with q disjoint copies
of A and q copies of its radius-2^q ball N, then plays the copy-cat strategy
between (A + workspace) and (N + workspace).  The strategy is an explicit
online state machine: each move is answered by Case I (near the shared
ball: copy it), Case II (near an earlier matched element: apply the recorded
summand isomorphism), or Case III (far from everything: open a fresh summand
of the same type).  Radii halve each round, which keeps the matched blocks
separated enough for their union to stay a partial isomorphism.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .structures import (
    DistanceMatrix,
    Structure,
    ball_part,
    disjoint_union,
    gaifman_distance,
    is_partial_isomorphism,
    reachable_part,
    tagged_sum,
)
from . import syntax as sx
from .semantics import eval_fo
from .scott import characteristic_formula
from .games import DUPLICATOR, GameResult, GameVariant, solve, verify_strategy

REAL_TAG = "A"


def _summand_tag(element: str) -> str:
    return element.split(":", 1)[0]


@dataclass(frozen=True)
class MetricSpaceView:
    """A disjoint-sum structure seen as a metric space with summand tags."""

    structure: Structure
    dist: DistanceMatrix
    tags: dict[str, str]

    @classmethod
    def of(cls, structure: Structure) -> "MetricSpaceView":
        return cls(
            structure,
            gaifman_distance(structure),
            {e: _summand_tag(e) for e in structure.universe},
        )


def build_workspace(a: Structure, q: int) -> tuple[Structure, Structure, Structure]:
    """The workspace C = q copies of A + q copies of the 2^q-ball N, and the
    two padded structures: left = A + C and right = N + C, pointed at A's
    basepoints (shared element ids, since N is an induced part of A).

    The workspace stays within the 2q|A| size bound.
    """
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    radius = 2**q
    ball = ball_part(a, radius)
    copies = [(f"M{i}", a) for i in range(1, q + 1)]
    copies += [(f"N{i}", ball) for i in range(1, q + 1)]
    workspace = tagged_sum(copies, basepoints_from=None)
    left = tagged_sum([(REAL_TAG, a)] + copies, basepoints_from=0)
    right = tagged_sum([(REAL_TAG, ball)] + copies, basepoints_from=0)
    assert len(workspace) <= 2 * q * len(a)
    return workspace, left, right


@dataclass(frozen=True)
class WorkspaceStrategyState:
    """One position of the copy-cat strategy with its bookkeeping: the play
    pair, the near/far bipartitions on both sides, and the per-index summand
    isomorphism (a tag pair, left to right) for far elements."""

    left_play: tuple[str, ...]
    right_play: tuple[str, ...]
    c0: frozenset[str]
    c1: frozenset[str]
    d0: frozenset[str]
    d1: frozenset[str]
    rho: tuple[tuple[str, str] | None, ...]
    round: int
    q: int

    @property
    def radius(self) -> int:
        """Separation radius for the current round; halves each step."""
        return 2 ** (self.q - self.round)


class WorkspaceStrategy:
    """The online strategy between (A + C) and (N + C)."""

    def __init__(self, a: Structure, q: int):
        self.q = q
        self.ell = 2**q
        workspace, left, right = build_workspace(a, q)
        self.workspace = workspace
        self.left = MetricSpaceView.of(left)
        self.right = MetricSpaceView.of(right)

    def initial_state(self) -> WorkspaceStrategyState:
        bps = self.left.structure.basepoints
        return WorkspaceStrategyState(
            left_play=bps,
            right_play=self.right.structure.basepoints,
            c0=frozenset(bps),
            c1=frozenset(),
            d0=frozenset(bps),
            d1=frozenset(),
            rho=tuple(None for _ in bps),
            round=0,
            q=self.q,
        )

    def _summand_type(self, tag: str, left_side: bool) -> str:
        if tag == REAL_TAG:
            return "M" if left_side else "N"
        return tag[0]

    def _fresh_partner(
        self, move_tag: str, move_on_left: bool, state: WorkspaceStrategyState
    ) -> tuple[str, str]:
        """Least-indexed unused summand of the same type on the responding
        side; returns the rho tag pair (left tag, right tag)."""
        kind = self._summand_type(move_tag, move_on_left)
        respond_left = not move_on_left
        play = state.left_play if respond_left else state.right_play
        used = {_summand_tag(e) for e in play}
        candidates = [REAL_TAG] if (kind == "M") == respond_left else []
        candidates += [f"{kind}{i}" for i in range(1, self.q + 1)]
        for tag in candidates:
            if tag not in used:
                return (tag, move_tag) if respond_left else (move_tag, tag)
        raise AssertionError(
            "no unused summand available; cannot happen within q rounds"
        )

    def step(
        self, state: WorkspaceStrategyState, side: str, element: str
    ) -> WorkspaceStrategyState:
        """Answer one move.  ``side`` is "left" or "right"; ``element`` is any
        element of that structure."""
        if state.round >= self.q:
            raise ValueError("all rounds already played")
        on_left = side == "left"
        view = self.left if on_left else self.right
        play = state.left_play if on_left else state.right_play
        near0 = state.c0 if on_left else state.d0
        near1 = state.c1 if on_left else state.d1
        half = 2 ** (self.q - state.round - 1)

        case = "III"
        witness = None
        for i, prior in enumerate(play):
            if view.dist.distance(prior, element) <= half:
                if prior in near0:
                    case = "I"
                    witness = i
                    break
                if prior in near1:
                    case = "II"
                    witness = i
                    break

        if case == "I":
            response = element
            rho_entry = None
        elif case == "II":
            rho_entry = state.rho[witness]
            tag, rest = element.split(":", 1)
            if on_left:
                assert tag == rho_entry[0]
                response = f"{rho_entry[1]}:{rest}"
            else:
                assert tag == rho_entry[1]
                response = f"{rho_entry[0]}:{rest}"
        else:
            rho_entry = self._fresh_partner(_summand_tag(element), on_left, state)
            rest = element.split(":", 1)[1]
            partner_tag = rho_entry[1] if on_left else rho_entry[0]
            response = f"{partner_tag}:{rest}"

        if on_left:
            new_left, new_right = element, response
        else:
            new_left, new_right = response, element
        to_near0 = case == "I"
        return WorkspaceStrategyState(
            left_play=state.left_play + (new_left,),
            right_play=state.right_play + (new_right,),
            c0=state.c0 | {new_left} if to_near0 else state.c0,
            c1=state.c1 if to_near0 else state.c1 | {new_left},
            d0=state.d0 | {new_right} if to_near0 else state.d0,
            d1=state.d1 if to_near0 else state.d1 | {new_right},
            rho=state.rho + (rho_entry,),
            round=state.round + 1,
            q=self.q,
        )

    def invariant_violations(self, state: WorkspaceStrategyState) -> list[str]:
        """All six strategy invariants, checked literally."""
        out: list[str] = []
        m = len(self.left.structure.basepoints)
        n = len(state.left_play)
        radius = state.radius
        reach = self.ell - radius
        left_bps = self.left.structure.basepoints
        played_left = set(state.left_play)
        played_right = set(state.right_play)

        if state.c0 | state.c1 != played_left or state.c0 & state.c1:
            out.append("left bipartition does not split the played elements")
        if state.d0 | state.d1 != played_right or state.d0 & state.d1:
            out.append("right bipartition does not split the played elements")
        if not set(left_bps) <= (state.c0 & state.d0):
            out.append("basepoints escape the near parts")

        for e in state.c0:
            if self.left.dist.set_distance([e], left_bps) > reach:
                out.append(f"near element {e!r} outside the {reach}-ball (left)")
        for e in state.d0:
            if self.right.dist.set_distance([e], left_bps) > reach:
                out.append(f"near element {e!r} outside the {reach}-ball (right)")
        for i in range(n):
            if (state.left_play[i] in state.c0) != (state.right_play[i] in state.d0):
                out.append(f"index {i} is near on one side only")

        near_left = [e for e in state.left_play if e in state.c0]
        near_right = [e for e in state.right_play if e in state.d0]
        if near_left != near_right:
            out.append("matched near subsequences differ")

        if self.left.dist.set_distance(state.c0, state.c1) <= radius:
            out.append("left separation violated")
        if self.right.dist.set_distance(state.d0, state.d1) <= radius:
            out.append("right separation violated")

        for i in range(m, n):
            x, y = state.left_play[i], state.right_play[i]
            if x in state.c1 and y in state.d1:
                entry = state.rho[i]
                if entry is None:
                    out.append(f"far index {i} lacks a summand isomorphism")
                    continue
                lt, rt = entry
                if _summand_tag(x) != lt or _summand_tag(y) != rt:
                    out.append(f"far index {i} not matched by its isomorphism tags")
                if self._summand_type(lt, True) != self._summand_type(rt, False):
                    out.append(f"far index {i} pairs summands of different types")
                if x.split(":", 1)[1] != y.split(":", 1)[1]:
                    out.append(f"far index {i} not related by the canonical map")

        for i in range(m, n):
            for j in range(m, n):
                xi, xj = state.left_play[i], state.left_play[j]
                yi, yj = state.right_play[i], state.right_play[j]
                if xi in state.c1 and xj in state.c1 and yi in state.d1 and yj in state.d1:
                    close = (
                        self.left.dist.distance(xi, xj) <= radius
                        or self.right.dist.distance(yi, yj) <= radius
                    )
                    if close and state.rho[i] != state.rho[j]:
                        out.append(f"nearby far indices {i},{j} use different isomorphisms")
        return out


def workspace_game_result(a: Structure, q: int, check_invariants: bool = True):
    """Exhaustively replay the strategy against every move sequence of length
    q, recording responses as a game strategy.

    Returns (result, violations): an EF-shaped :class:`GameResult` for the
    game between left and right, plus any invariant or winning-condition
    violations found during the replay (empty for a correct build).
    """
    machine = WorkspaceStrategy(a, q)
    left = machine.left.structure
    right = machine.right.structure
    strategy: dict = {}
    violations: list[str] = []

    def record(state: WorkspaceStrategyState):
        pairs = tuple(zip(state.left_play, state.right_play))
        broken = False
        if check_invariants:
            for issue in machine.invariant_violations(state):
                violations.append(f"at {pairs!r}: {issue}")
                broken = True
        if not is_partial_isomorphism(pairs, left, right):
            violations.append(f"at {pairs!r}: not a partial isomorphism")
            broken = True
        if broken or state.round >= q:
            return
        for side, structure in (("left", left), ("right", right)):
            game_side = "A" if side == "left" else "B"
            for element in structure.universe:
                nxt = machine.step(state, side, element)
                response = (
                    nxt.right_play[-1] if side == "left" else nxt.left_play[-1]
                )
                strategy[(pairs, game_side, element)] = response
                record(nxt)

    record(machine.initial_state())
    result = GameResult(DUPLICATOR, GameVariant.EF, q, lambda: strategy)
    result._strategy = strategy
    return result, violations


def verify_workspace(a: Structure, q: int) -> bool:
    """Exhaustive validation of the workspace construction: every strategy
    replay keeps the partial-isomorphism condition and the state invariants,
    the recorded strategy verifies as an EF strategy, and the independent
    game solver confirms the two padded structures are q-round equivalent."""
    result, violations = workspace_game_result(a, q)
    if violations:
        return False
    _, left, right = build_workspace(a, q)
    if not verify_strategy(result, left, right, GameVariant.EF, q):
        return False
    solved = solve(left, right, GameVariant.EF, q)
    return solved.winner == DUPLICATOR


# -- invariance ---------------------------------------------------------------------


@dataclass(frozen=True)
class InvarianceEntry:
    index: int
    partner: int | None  # other corpus structure for disjoint extensions
    original: bool
    transformed: bool

    @property
    def ok(self) -> bool:
        return self.original == self.transformed


@dataclass(frozen=True)
class InvarianceReport:
    notion: str
    entries: tuple[InvarianceEntry, ...]

    @property
    def invariant(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def counterexamples(self) -> tuple[InvarianceEntry, ...]:
        return tuple(e for e in self.entries if not e.ok)


def check_invariance(
    f: sx.FOFormula,
    notion: str,
    corpus: Sequence[Structure],
) -> InvarianceReport:
    """Compare a sentence's truth on each corpus structure with its truth on
    the transformed structure.  Notions: ``generated:k`` (reachable part),
    ``ball:k`` (Gaifman ball part), ``disjoint`` (disjoint union with every
    same-vocabulary corpus partner)."""
    if sx.free_vars(f):
        raise ValueError(
            f"invariance needs a sentence; free variables {sorted(sx.free_vars(f))}"
        )
    name, _, arg = notion.partition(":")
    entries: list[InvarianceEntry] = []
    if name in ("generated", "ball"):
        if not arg:
            raise ValueError(f"notion {name!r} needs a radius, e.g. {name}:2")
        k = int(arg)
        transform = reachable_part if name == "generated" else ball_part
        for i, s in enumerate(corpus):
            original = eval_fo(f, s)
            transformed = eval_fo(f, transform(s, k))
            entries.append(InvarianceEntry(i, None, original, transformed))
    elif name == "disjoint":
        for i, s in enumerate(corpus):
            original = eval_fo(f, s)
            for j, partner in enumerate(corpus):
                if not s.signature.same_vocabulary(partner.signature):
                    continue
                summed = disjoint_union(s, partner)
                entries.append(
                    InvarianceEntry(i, j, original, eval_fo(f, summed))
                )
    else:
        raise ValueError(f"unknown invariance notion {notion!r}")
    return InvarianceReport(notion, tuple(entries))


def synthesize_bounded_equivalent(
    f: sx.FOFormula,
    k: int,
    corpus: Sequence[Structure],
    q: int | None = None,
) -> sx.FOFormula:
    """Corpus-relative bounded equivalent of a sentence invariant under
    k-generated substructures: the disjunction of the rank q*2^max(k,q)
    characteristic formulas of the corpus models.

    The output is only guaranteed to agree with the input on the given
    corpus.  Agreement on all structures would need the sentence to be
    invariant everywhere, which no finite check can establish; callers must
    label the result as corpus-relative.
    """
    if q is None:
        q = sx.quantifier_rank(f)
    report = check_invariance(f, f"generated:{k}", corpus)
    if not report.invariant:
        bad = report.counterexamples[0]
        raise ValueError(
            f"sentence is not generated:{k}-invariant on the corpus "
            f"(structure {bad.index})"
        )
    rank = q * 2 ** max(k, q)
    disjuncts: list[sx.FOFormula] = []
    for s in corpus:
        if eval_fo(f, s):
            disjuncts.append(characteristic_formula(s, rank))
    return sx.disj_all(list(dict.fromkeys(disjuncts)))

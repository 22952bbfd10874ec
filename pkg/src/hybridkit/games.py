"""A uniform engine for the model-comparison games, solved exactly by
memoized backward induction.

Positions are quotiented by the partial map induced by the two move
sequences: the winning condition and the legal moves depend only on that map
and the sets of played elements, so memoizing on the pair set is sound.  All
iteration follows universe order, which makes winners, strategies and traces
deterministic.

The exposed round count ``k`` is the number of free rounds after the forced
basepoint round(s); the winning condition is checked at every position
including the initial one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import permutations, product
from typing import Callable, Mapping

from .errors import ResourceLimitError
from .structures import Structure, is_partial_isomorphism
from .comonads import ComonadKind, build_comonad, play_parts

DUPLICATOR = "Duplicator"
SPOILER = "Spoiler"

DEFAULT_MAX_ACCESSIBLE = 8


class GameVariant(Enum):
    EXISTENTIAL_EF = "existential-ef"
    EXISTENTIAL_HYBRID = "existential-hybrid"
    EXISTENTIAL_BOUNDED = "existential-bounded"
    EF = "ef"
    BACK_FORTH_HYBRID = "back-forth-hybrid"
    BACK_FORTH_BOUNDED = "back-forth-bounded"
    BACK_FORTH_TEMPORAL = "back-forth-temporal"
    BIJECTION = "bijection"
    COMONADIC_GK = "comonadic-gk"


_EXISTENTIAL = {
    GameVariant.EXISTENTIAL_EF,
    GameVariant.EXISTENTIAL_HYBRID,
    GameVariant.EXISTENTIAL_BOUNDED,
}
_UNIMODAL = {
    GameVariant.EXISTENTIAL_HYBRID,
    GameVariant.BACK_FORTH_HYBRID,
    GameVariant.BACK_FORTH_TEMPORAL,
    GameVariant.COMONADIC_GK,
}

#: Comonad kind whose coKleisli morphisms match each existential variant.
KIND_FOR_VARIANT = {
    GameVariant.EXISTENTIAL_EF: ComonadKind.EF,
    GameVariant.EXISTENTIAL_HYBRID: ComonadKind.HYBRID,
    GameVariant.EXISTENTIAL_BOUNDED: ComonadKind.BOUNDED,
}


@dataclass
class GameResult:
    winner: str
    variant: GameVariant
    k: int
    _strategy_fn: Callable[[], dict] = field(repr=False, compare=False)
    _strategy: dict | None = field(default=None, repr=False, compare=False)

    @property
    def strategy(self) -> dict:
        """Deterministic strategy for the winner, keyed by the position
        reached (the aligned pair sequence) plus the opponent's move where
        one is needed.  Extracted lazily and cached."""
        if self._strategy is None:
            self._strategy = self._strategy_fn()
        return self._strategy


class _Side:
    """Move bookkeeping for one structure of a game."""

    def __init__(self, s: Structure, variant: GameVariant):
        self.structure = s
        self.universe = s.universe
        edges = s.transition_edges()
        self.seen_from: dict[str, frozenset[str]] = {}
        for e in s.universe:
            if variant in (GameVariant.EXISTENTIAL_EF, GameVariant.EF):
                continue
            if variant is GameVariant.BACK_FORTH_TEMPORAL:
                self.seen_from[e] = frozenset(
                    z for z in s.universe if (e, z) in edges or (z, e) in edges
                )
            else:
                self.seen_from[e] = frozenset(z for z in s.universe if (e, z) in edges)
        self.unrestricted = variant in (GameVariant.EXISTENTIAL_EF, GameVariant.EF)

    def legal(self, played: frozenset[str]) -> tuple[str, ...]:
        if self.unrestricted:
            return self.universe
        allowed: set[str] = set()
        for e in played:
            allowed |= self.seen_from[e]
        return tuple(e for e in self.universe if e in allowed)


def _check_variant(a: Structure, b: Structure, variant: GameVariant, k: int):
    if k < 0:
        raise ValueError(f"round count must be non-negative, got {k}")
    if not a.signature.same_vocabulary(b.signature):
        raise ValueError("signature mismatch between the two structures")
    if a.signature.num_basepoints != b.signature.num_basepoints:
        raise ValueError("basepoint count mismatch between the two structures")
    if variant in _UNIMODAL and not a.signature.is_unimodal():
        raise ValueError(
            f"{variant.value} needs a unimodal signature "
            "(one transition relation, one basepoint)"
        )


class _Engine:
    """Backward-induction solver for the sequence-move variants."""

    def __init__(self, a: Structure, b: Structure, variant: GameVariant, k: int):
        self.a = a
        self.b = b
        self.variant = variant
        self.k = k
        self.existential = variant in _EXISTENTIAL
        self.left = _Side(a, variant)
        self.right = _Side(b, variant)
        self.init_pairs = tuple(zip(a.basepoints, b.basepoints))
        self.memo: dict[tuple[frozenset, int], str] = {}
        # tuples of each relation grouped by a participating element
        self.a_tuples_at = self._index_tuples(a)
        self.b_tuples_at = self._index_tuples(b)
        self.a_rel_sets = {n: set(t) for n, t in a.relations.items()}
        self.b_rel_sets = {n: set(t) for n, t in b.relations.items()}

    @staticmethod
    def _index_tuples(s: Structure) -> dict[str, list[tuple[str, tuple[str, ...]]]]:
        at: dict[str, list[tuple[str, tuple[str, ...]]]] = {e: [] for e in s.universe}
        for name, tuples in s.relations.items():
            for tup in tuples:
                for e in set(tup):
                    at[e].append((name, tup))
        return at

    # -- winning condition ----------------------------------------------------

    def initial_ok(self) -> bool:
        pairs = self.init_pairs
        if self.existential:
            fwd: dict[str, str] = {}
            for x, y in pairs:
                if fwd.setdefault(x, y) != y:
                    return False
            for name, tuples in self.a.relations.items():
                tgt = self.b_rel_sets[name]
                for tup in tuples:
                    if all(e in fwd for e in tup):
                        if tuple(fwd[e] for e in tup) not in tgt:
                            return False
            return True
        return is_partial_isomorphism(pairs, self.a, self.b)

    def extension_ok(
        self, fwd: Mapping[str, str], bwd: Mapping[str, str], x: str, y: str
    ) -> bool:
        """Whether the winning condition still holds after adding (x, y),
        assuming it holds for the current map."""
        if x in fwd:
            return fwd[x] == y
        if not self.existential and y in bwd:
            return False
        tmp_x = dict(fwd)
        tmp_x[x] = y
        for name, tup in self.a_tuples_at[x]:
            if all(e in tmp_x for e in tup):
                if tuple(tmp_x[e] for e in tup) not in self.b_rel_sets[name]:
                    return False
        if self.existential:
            return True
        tmp_y = dict(bwd)
        tmp_y[y] = x
        for name, tup in self.b_tuples_at[y]:
            if all(e in tmp_y for e in tup):
                if tuple(tmp_y[e] for e in tup) not in self.a_rel_sets[name]:
                    return False
        return True

    # -- solving ----------------------------------------------------------------

    def spoiler_options(
        self, dom: frozenset[str], rng: frozenset[str]
    ) -> list[tuple[str, str]]:
        options = [("A", x) for x in self.left.legal(dom)]
        if not self.existential:
            options.extend(("B", y) for y in self.right.legal(rng))
        return options

    def responses(self, side: str) -> tuple[str, ...]:
        return self.right.universe if side == "A" else self.left.universe

    def win(self, pairs: frozenset[tuple[str, str]], rounds: int) -> str:
        """Game value at a position where the winning condition holds."""
        if rounds == 0:
            return DUPLICATOR
        key = (pairs, rounds)
        got = self.memo.get(key)
        if got is not None:
            return got
        fwd = dict(pairs)
        bwd = {y: x for x, y in pairs}
        dom = frozenset(fwd)
        rng = frozenset(bwd)
        value = DUPLICATOR
        for side, x in self.spoiler_options(dom, rng):
            survivable = False
            for y in self.responses(side):
                pair = (x, y) if side == "A" else (y, x)
                if side == "A":
                    ok = self.extension_ok(fwd, bwd, x, y)
                else:
                    ok = self.extension_ok(fwd, bwd, y, x)
                if ok and self.win(pairs | {pair}, rounds - 1) == DUPLICATOR:
                    survivable = True
                    break
            if not survivable:
                value = SPOILER
                break
        self.memo[key] = value
        return value

    def solve(self) -> GameResult:
        if not self.initial_ok():
            winner = SPOILER
        else:
            winner = self.win(frozenset(self.init_pairs), self.k)
        return GameResult(winner, self.variant, self.k, lambda: self._extract(winner))

    # -- strategy extraction -------------------------------------------------------

    def _extract(self, winner: str) -> dict:
        strategy: dict = {}
        if winner == SPOILER and not self.initial_ok():
            return strategy

        def visit(seq: tuple[tuple[str, str], ...]):
            rounds = self.k - (len(seq) - len(self.init_pairs))
            if rounds == 0:
                return
            pairs = frozenset(seq)
            fwd = dict(pairs)
            bwd = {y: x for x, y in pairs}
            dom = frozenset(fwd)
            rng = frozenset(bwd)
            if winner == DUPLICATOR:
                for side, x in self.spoiler_options(dom, rng):
                    response = None
                    for y in self.responses(side):
                        ok = (
                            self.extension_ok(fwd, bwd, x, y)
                            if side == "A"
                            else self.extension_ok(fwd, bwd, y, x)
                        )
                        pair = (x, y) if side == "A" else (y, x)
                        if ok and self.win(pairs | {pair}, rounds - 1) == DUPLICATOR:
                            response = y
                            break
                    if response is None:
                        continue  # Spoiler move loses immediately for Spoiler
                    key = (seq, side, x)
                    if key in strategy:
                        continue
                    strategy[key] = response
                    pair = (x, response) if side == "A" else (response, x)
                    visit(seq + (pair,))
            else:
                if seq in strategy:
                    return
                best = None
                for side, x in self.spoiler_options(dom, rng):
                    refuted = True
                    for y in self.responses(side):
                        ok = (
                            self.extension_ok(fwd, bwd, x, y)
                            if side == "A"
                            else self.extension_ok(fwd, bwd, y, x)
                        )
                        pair = (x, y) if side == "A" else (y, x)
                        if ok and self.win(pairs | {pair}, rounds - 1) == DUPLICATOR:
                            refuted = False
                            break
                    if refuted:
                        best = (side, x)
                        break
                if best is None:
                    return
                strategy[seq] = best
                side, x = best
                for y in self.responses(side):
                    ok = (
                        self.extension_ok(fwd, bwd, x, y)
                        if side == "A"
                        else self.extension_ok(fwd, bwd, y, x)
                    )
                    if ok:
                        pair = (x, y) if side == "A" else (y, x)
                        visit(seq + (pair,))

        visit(self.init_pairs)
        return strategy


def solve(a: Structure, b: Structure, variant: GameVariant, k: int) -> GameResult:
    """Exact value and deterministic strategy of the k-round game."""
    _check_variant(a, b, variant, k)
    if variant is GameVariant.BIJECTION:
        return solve_bijection(a, b, k)
    if variant is GameVariant.COMONADIC_GK:
        return solve_Gk(a, b, k)
    return _Engine(a, b, variant, k).solve()


# -- the bounded bijection game ---------------------------------------------------------


def _accessible_from(s: Structure, elems: frozenset[str]) -> tuple[str, ...]:
    edges = s.transition_edges()
    hits = {v for (u, v) in edges if u in elems}
    return tuple(e for e in s.universe if e in hits)


def _has_perfect_matching(
    rows: tuple[str, ...], cols: tuple[str, ...], good: set[tuple[str, str]]
) -> bool:
    match_of_col: dict[str, str] = {}

    def augment(r: str, visited: set[str]) -> bool:
        for c in cols:
            if (r, c) in good and c not in visited:
                visited.add(c)
                if c not in match_of_col or augment(match_of_col[c], visited):
                    match_of_col[c] = r
                    return True
        return False

    for r in rows:
        if not augment(r, set()):
            return False
    return True


def _least_matching(
    rows: tuple[str, ...], cols: tuple[str, ...], good: set[tuple[str, str]]
) -> tuple[tuple[str, str], ...] | None:
    """Lexicographically least perfect matching over rows in order."""

    def extend(i: int, taken: dict[str, str]) -> dict[str, str] | None:
        if i == len(rows):
            return taken
        r = rows[i]
        for c in cols:
            if c in taken or (r, c) not in good:
                continue
            taken[c] = r
            rest_rows = rows[i + 1 :]
            rest_cols = tuple(c2 for c2 in cols if c2 not in taken)
            rest_good = {(x, y) for (x, y) in good if y not in taken}
            if _has_perfect_matching(rest_rows, rest_cols, rest_good):
                out = extend(i + 1, taken)
                if out is not None:
                    return out
            del taken[c]
        return None

    full = extend(0, {})
    if full is None:
        return None
    by_row = {r: c for c, r in full.items()}
    return tuple((r, by_row[r]) for r in rows)


def solve_bijection(
    a: Structure,
    b: Structure,
    k: int,
    max_accessible: int = DEFAULT_MAX_ACCESSIBLE,
) -> GameResult:
    """Value of the m+k-round bounded bijection game: each round Duplicator
    commits to a bijection between the one-step-accessible sets (Spoiler wins
    on a cardinality clash), Spoiler picks an accessible element, and the
    accumulated correspondence must stay a partial isomorphism."""
    _check_variant(a, b, GameVariant.BIJECTION, k)
    init_pairs = tuple(zip(a.basepoints, b.basepoints))
    memo: dict[tuple[frozenset, int], str] = {}

    def win(pairs: frozenset[tuple[str, str]], rounds: int) -> str:
        if not is_partial_isomorphism(pairs, a, b):
            return SPOILER
        if rounds == 0:
            return DUPLICATOR
        key = (pairs, rounds)
        got = memo.get(key)
        if got is not None:
            return got
        dom = frozenset(x for x, _ in pairs)
        rng = frozenset(y for _, y in pairs)
        acc_a = _accessible_from(a, dom)
        acc_b = _accessible_from(b, rng)
        if len(acc_a) != len(acc_b):
            value = SPOILER
        elif not acc_a:
            value = DUPLICATOR
        elif len(acc_a) > max_accessible:
            raise ResourceLimitError(
                f"bijection round over {len(acc_a)} accessible elements exceeds "
                f"the cap of {max_accessible}"
            )
        else:
            good = {
                (x, y)
                for x in acc_a
                for y in acc_b
                if win(pairs | {(x, y)}, rounds - 1) == DUPLICATOR
            }
            value = (
                DUPLICATOR if _has_perfect_matching(acc_a, acc_b, good) else SPOILER
            )
        memo[key] = value
        return value

    winner = win(frozenset(init_pairs), k)

    def extract() -> dict:
        strategy: dict = {}

        def visit(seq: tuple[tuple[str, str], ...]):
            rounds = k - (len(seq) - len(init_pairs))
            pairs = frozenset(seq)
            if not is_partial_isomorphism(pairs, a, b) or rounds == 0:
                return
            dom = frozenset(x for x, _ in pairs)
            rng = frozenset(y for _, y in pairs)
            acc_a = _accessible_from(a, dom)
            acc_b = _accessible_from(b, rng)
            if len(acc_a) != len(acc_b) or not acc_a:
                return
            if winner == DUPLICATOR:
                if seq in strategy:
                    return
                good = {
                    (x, y)
                    for x in acc_a
                    for y in acc_b
                    if win(pairs | {(x, y)}, rounds - 1) == DUPLICATOR
                }
                bijection = _least_matching(acc_a, acc_b, good)
                strategy[seq] = bijection
                for x, y in bijection:
                    visit(seq + ((x, y),))
            else:
                for perm in permutations(acc_b):
                    bijection = tuple(zip(acc_a, perm))
                    bkey = (seq, bijection)
                    if bkey in strategy:
                        continue
                    pick = None
                    for x, y in bijection:
                        if win(pairs | {(x, y)}, rounds - 1) == SPOILER:
                            pick = x
                            break
                    strategy[bkey] = pick
                    if pick is not None:
                        y = dict(bijection)[pick]
                        visit(seq + ((pick, y),))

        visit(init_pairs)
        return strategy

    return GameResult(winner, GameVariant.BIJECTION, k, extract)


# -- the comonadic game over carriers -----------------------------------------------------


def solve_Gk(
    a: Structure, b: Structure, k: int, max_plays: int | None = None
) -> GameResult:
    """The back-and-forth game played on the hybrid comonad carriers: moves
    step to immediate extensions, and a position is winning when pairing the
    two plays elementwise yields a partial isomorphism (so repeated elements
    must correspond)."""
    _check_variant(a, b, GameVariant.COMONADIC_GK, k)
    if k < 1:
        raise ValueError("the comonadic game needs k >= 1")
    kwargs = {} if max_plays is None else {"max_plays": max_plays}
    c_a = build_comonad(a, ComonadKind.HYBRID, k, **kwargs)
    c_b = build_comonad(b, ComonadKind.HYBRID, k, **kwargs)

    def winning_pos(s_play: str, t_play: str) -> bool:
        pairs = tuple(zip(play_parts(s_play), play_parts(t_play)))
        return is_partial_isomorphism(pairs, a, b)

    memo: dict[tuple[str, str], str] = {}

    def win(s_play: str, t_play: str) -> str:
        key = (s_play, t_play)
        got = memo.get(key)
        if got is not None:
            return got
        value = DUPLICATOR
        for s_next in c_a.children(s_play):
            if not any(
                winning_pos(s_next, t_next) and win(s_next, t_next) == DUPLICATOR
                for t_next in c_b.children(t_play)
            ):
                value = SPOILER
                break
        if value == DUPLICATOR:
            for t_next in c_b.children(t_play):
                if not any(
                    winning_pos(s_next, t_next) and win(s_next, t_next) == DUPLICATOR
                    for s_next in c_a.children(s_play)
                ):
                    value = SPOILER
                    break
        memo[key] = value
        return value

    start = (c_a.carrier.basepoints[-1], c_b.carrier.basepoints[-1])
    if not winning_pos(*start):
        winner = SPOILER
    else:
        winner = win(*start)

    def extract() -> dict:
        strategy: dict = {}
        if winner == SPOILER and not winning_pos(*start):
            return strategy

        def visit(s_play: str, t_play: str):
            if winner == DUPLICATOR:
                for side, mover, other, own in (
                    ("A", c_a, c_b, t_play),
                    ("B", c_b, c_a, s_play),
                ):
                    moving_from = s_play if side == "A" else t_play
                    for nxt in mover.children(moving_from):
                        key = ((s_play, t_play), side, nxt)
                        if key in strategy:
                            continue
                        response = None
                        for cand in other.children(own):
                            pos = (nxt, cand) if side == "A" else (cand, nxt)
                            if winning_pos(*pos) and win(*pos) == DUPLICATOR:
                                response = cand
                                break
                        if response is None:
                            continue
                        strategy[key] = response
                        pos = (nxt, response) if side == "A" else (response, nxt)
                        visit(*pos)
            else:
                if (s_play, t_play) in strategy:
                    return
                best = None
                for side, mover, other, own in (
                    ("A", c_a, c_b, t_play),
                    ("B", c_b, c_a, s_play),
                ):
                    moving_from = s_play if side == "A" else t_play
                    for nxt in mover.children(moving_from):
                        refuted = all(
                            not (
                                winning_pos(
                                    *((nxt, cand) if side == "A" else (cand, nxt))
                                )
                                and win(
                                    *((nxt, cand) if side == "A" else (cand, nxt))
                                )
                                == DUPLICATOR
                            )
                            for cand in other.children(own)
                        )
                        if refuted:
                            best = (side, nxt)
                            break
                    if best:
                        break
                if best is None:
                    return
                strategy[(s_play, t_play)] = best
                side, nxt = best
                other = c_b if side == "A" else c_a
                own = t_play if side == "A" else s_play
                for cand in other.children(own):
                    pos = (nxt, cand) if side == "A" else (cand, nxt)
                    if winning_pos(*pos):
                        visit(*pos)

        visit(*start)
        return strategy

    return GameResult(winner, GameVariant.COMONADIC_GK, k, extract)


# -- the inductive back-and-forth relations ----------------------------------------------


def back_and_forth_rank(a: Structure, b: Structure, k: int) -> bool:
    """The inductively defined rank-k back-and-forth relation over extension
    tuples: atomic agreement at every level, and matching one-step transition
    extensions of every tuple component.  Independent of the game engine."""
    if not a.signature.same_vocabulary(b.signature):
        raise ValueError("signature mismatch between the two structures")
    if a.signature.num_basepoints != b.signature.num_basepoints:
        raise ValueError("basepoint count mismatch between the two structures")
    transitions = sorted(a.signature.transitions)
    a_edges = {n: set(a.relations[n]) for n in transitions}
    b_edges = {n: set(b.relations[n]) for n in transitions}
    memo: dict[tuple[tuple[str, ...], tuple[str, ...], int], bool] = {}

    rel_sets = {
        name: (set(a.relations[name]), set(b.relations[name]))
        for name in a.signature.relations
    }

    def atomic_agree(ta: tuple[str, ...], tb: tuple[str, ...]) -> bool:
        for i in range(len(ta)):
            for j in range(i + 1, len(ta)):
                if (ta[i] == ta[j]) != (tb[i] == tb[j]):
                    return False
        for name, arity in a.signature.relations.items():
            a_set, b_set = rel_sets[name]
            for idx in product(range(len(ta)), repeat=arity):
                in_a = tuple(ta[i] for i in idx) in a_set
                in_b = tuple(tb[i] for i in idx) in b_set
                if in_a != in_b:
                    return False
        return True

    def bf(ta: tuple[str, ...], tb: tuple[str, ...], rank: int) -> bool:
        key = (ta, tb, rank)
        got = memo.get(key)
        if got is not None:
            return got
        value = atomic_agree(ta, tb)
        if value and rank > 0:
            for name in transitions:
                ea, eb = a_edges[name], b_edges[name]
                for i in range(len(ta)):
                    forth = all(
                        any(
                            (tb[i], y) in eb and bf(ta + (x,), tb + (y,), rank - 1)
                            for y in b.universe
                        )
                        for x in a.universe
                        if (ta[i], x) in ea
                    )
                    back = forth and all(
                        any(
                            (ta[i], x) in ea and bf(ta + (x,), tb + (y,), rank - 1)
                            for x in a.universe
                        )
                        for y in b.universe
                        if (tb[i], y) in eb
                    )
                    if not (forth and back):
                        value = False
                        break
                if not value:
                    break
        memo[key] = value
        return value

    return bf(a.basepoints, b.basepoints, k)


# -- strategy verification --------------------------------------------------------------


def verify_strategy(
    result: GameResult, a: Structure, b: Structure, variant: GameVariant, k: int
) -> bool:
    """Replay every opponent option against the recorded strategy and confirm
    the winning condition at every reached position.  Raises when the
    strategy is missing a response at a reachable state."""
    if variant is GameVariant.BIJECTION:
        return _verify_bijection(result, a, b, k)
    if variant is GameVariant.COMONADIC_GK:
        return _verify_gk(result, a, b, k)
    engine = _Engine(a, b, variant, k)
    strategy = result.strategy
    init = engine.init_pairs

    def condition(pairs) -> bool:
        if engine.existential:
            fwd: dict[str, str] = {}
            for x, y in pairs:
                if fwd.setdefault(x, y) != y:
                    return False
            for name, tuples in a.relations.items():
                tgt = engine.b_rel_sets[name]
                for tup in tuples:
                    if all(e in fwd for e in tup):
                        if tuple(fwd[e] for e in tup) not in tgt:
                            return False
            return True
        return is_partial_isomorphism(pairs, a, b)

    if result.winner == DUPLICATOR:

        def replay_dup(seq) -> bool:
            if not condition(seq):
                return False
            rounds = k - (len(seq) - len(init))
            if rounds == 0:
                return True
            dom = frozenset(x for x, _ in seq)
            rng = frozenset(y for _, y in seq)
            for side, x in engine.spoiler_options(dom, rng):
                key = (seq, side, x)
                if key not in strategy:
                    raise ValueError(
                        f"strategy is not total: no response at {key!r}"
                    )
                y = strategy[key]
                pair = (x, y) if side == "A" else (y, x)
                if not replay_dup(seq + (pair,)):
                    return False
            return True

        return replay_dup(init)

    def replay_spoiler(seq) -> bool:
        if not condition(seq):
            return True
        rounds = k - (len(seq) - len(init))
        if rounds == 0:
            return False
        if seq not in strategy:
            raise ValueError(f"strategy is not total: no move at {seq!r}")
        side, x = strategy[seq]
        dom = frozenset(e for e, _ in seq)
        rng = frozenset(e for _, e in seq)
        legal = engine.left.legal(dom) if side == "A" else engine.right.legal(rng)
        if x not in legal:
            return False
        for y in engine.responses(side):
            pair = (x, y) if side == "A" else (y, x)
            if not replay_spoiler(seq + (pair,)):
                return False
        return True

    return replay_spoiler(init)


def _verify_bijection(result: GameResult, a: Structure, b: Structure, k: int) -> bool:
    strategy = result.strategy
    init = tuple(zip(a.basepoints, b.basepoints))

    if result.winner == DUPLICATOR:

        def replay(seq) -> bool:
            if not is_partial_isomorphism(seq, a, b):
                return False
            rounds = k - (len(seq) - len(init))
            if rounds == 0:
                return True
            dom = frozenset(x for x, _ in seq)
            rng = frozenset(y for _, y in seq)
            acc_a = _accessible_from(a, dom)
            acc_b = _accessible_from(b, rng)
            if len(acc_a) != len(acc_b):
                return False
            if not acc_a:
                return True
            if seq not in strategy:
                raise ValueError(f"strategy is not total: no bijection at {seq!r}")
            bijection = strategy[seq]
            if bijection is None or {x for x, _ in bijection} != set(acc_a):
                return False
            return all(replay(seq + ((x, y),)) for x, y in bijection)

        return replay(init)

    def replay(seq) -> bool:
        if not is_partial_isomorphism(seq, a, b):
            return True
        rounds = k - (len(seq) - len(init))
        if rounds == 0:
            return False
        dom = frozenset(x for x, _ in seq)
        rng = frozenset(y for _, y in seq)
        acc_a = _accessible_from(a, dom)
        acc_b = _accessible_from(b, rng)
        if len(acc_a) != len(acc_b):
            return True
        if not acc_a:
            return False
        for perm in permutations(acc_b):
            bijection = tuple(zip(acc_a, perm))
            bkey = (seq, bijection)
            if bkey not in strategy:
                raise ValueError(f"strategy is not total: no pick at {bkey!r}")
            pick = strategy[bkey]
            if pick is None:
                return False
            y = dict(bijection)[pick]
            if not replay(seq + ((pick, y),)):
                return False
        return True

    return replay(init)


def _verify_gk(result: GameResult, a: Structure, b: Structure, k: int) -> bool:
    c_a = build_comonad(a, ComonadKind.HYBRID, k)
    c_b = build_comonad(b, ComonadKind.HYBRID, k)
    strategy = result.strategy

    def winning_pos(s_play: str, t_play: str) -> bool:
        return is_partial_isomorphism(
            tuple(zip(play_parts(s_play), play_parts(t_play))), a, b
        )

    start = (c_a.carrier.basepoints[-1], c_b.carrier.basepoints[-1])

    if result.winner == DUPLICATOR:

        def replay(s_play: str, t_play: str) -> bool:
            if not winning_pos(s_play, t_play):
                return False
            for side, mover, own in (("A", c_a, t_play), ("B", c_b, s_play)):
                moving_from = s_play if side == "A" else t_play
                for nxt in mover.children(moving_from):
                    key = ((s_play, t_play), side, nxt)
                    if key not in strategy:
                        raise ValueError(
                            f"strategy is not total: no response at {key!r}"
                        )
                    response = strategy[key]
                    pos = (nxt, response) if side == "A" else (response, nxt)
                    if not replay(*pos):
                        return False
            return True

        return replay(*start)

    def replay(s_play: str, t_play: str) -> bool:
        if not winning_pos(s_play, t_play):
            return True
        key = (s_play, t_play)
        if key not in strategy:
            raise ValueError(f"strategy is not total: no move at {key!r}")
        side, nxt = strategy[key]
        other = c_b if side == "A" else c_a
        own = t_play if side == "A" else s_play
        responses = other.children(own)
        if not responses:
            return True  # Duplicator cannot respond at all
        return all(
            replay(*((nxt, cand) if side == "A" else (cand, nxt)))
            for cand in responses
        )

    return replay(*start)


# -- traces ------------------------------------------------------------------------------


def trace_game(a: Structure, b: Structure, variant: GameVariant, k: int) -> str:
    """Line-per-round transcript of the principal play: the winner follows the
    extracted strategy, the loser probes with the least legal option."""
    result = solve(a, b, variant, k)
    lines = [f"game: {variant.value} k={k}", f"winner: {result.winner}"]
    if variant in (GameVariant.BIJECTION, GameVariant.COMONADIC_GK):
        lines.append("trace: not rendered for this variant")
        return "\n".join(lines) + "\n"
    engine = _Engine(a, b, variant, k)
    strategy = result.strategy
    seq = engine.init_pairs
    ok = engine.initial_ok()
    lines.append(f"round 0: initial position {_fmt_pairs(seq)} [{_verdict(ok)}]")
    for rnd in range(1, k + 1):
        if not ok:
            break
        dom = frozenset(x for x, _ in seq)
        rng = frozenset(y for _, y in seq)
        if result.winner == SPOILER:
            move = strategy.get(seq)
            if move is None:
                break
            side, x = move
            response = None
            for y in engine.responses(side):
                pair = (x, y) if side == "A" else (y, x)
                ext = (
                    engine.extension_ok(dict(seq), {b_: a_ for a_, b_ in seq}, x, y)
                    if side == "A"
                    else engine.extension_ok(
                        dict(seq), {b_: a_ for a_, b_ in seq}, y, x
                    )
                )
                if ext:
                    response = y
                    break
            if response is None:
                response = engine.responses(side)[0]
            pair = (x, response) if side == "A" else (response, x)
        else:
            options = engine.spoiler_options(dom, rng)
            if not options:
                lines.append(f"round {rnd}: spoiler has no legal move [ok]")
                break
            side, x = options[0]
            response = strategy[(seq, side, x)]
            pair = (x, response) if side == "A" else (response, x)
        seq = seq + (pair,)
        if engine.existential:
            fwd: dict[str, str] = {}
            ok = True
            for p, q in seq:
                if fwd.setdefault(p, q) != q:
                    ok = False
            if ok:
                for name, tuples in a.relations.items():
                    tgt = engine.b_rel_sets[name]
                    for tup in tuples:
                        if all(e in fwd for e in tup):
                            if tuple(fwd[e] for e in tup) not in tgt:
                                ok = False
        else:
            ok = is_partial_isomorphism(seq, a, b)
        lines.append(
            f"round {rnd}: spoiler {side}:{x} -> duplicator {pair[1] if side == 'A' else pair[0]} "
            f"[{_verdict(ok)}]"
        )
    return "\n".join(lines) + "\n"


def _fmt_pairs(seq) -> str:
    return " ".join(f"({x},{y})" for x, y in seq) if seq else "(empty)"


def _verdict(ok: bool) -> str:
    return "ok" if ok else "fail"

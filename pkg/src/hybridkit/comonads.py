"""Explicit construction of the play comonads over pointed structures.

A carrier is an ordinary :class:`Structure` whose elements encode plays
(nonempty sequences of base elements joined with ``.``), so every structure
operation and morphism predicate applies to carriers unchanged.  Plays start
with the basepoint tuple and are capped at length k+m; each comonad kind
restricts how a play may grow:

* EF: no restriction (any element may be played);
* Modal: each element is seen by its immediate predecessor;
* Hybrid: each element is seen by some earlier element;
* HybridTemporal: seen forward or backward by some earlier element;
* Bounded: seen from some earlier element through any transition relation.

Relations are lifted along plays: a tuple of plays is related when the plays
are pairwise comparable in the prefix order and the base relation holds of
their last elements.  The Modal kind instead relates a play only to its
immediate extensions through the transition relation.  With ``with_I`` the
identity-tracking relation ``I`` is added: comparable plays with equal last
elements.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .errors import ResourceLimitError
from .structures import (
    RESERVED_IDENTITY,
    Signature,
    Structure,
    is_homomorphism,
    with_identity_I,
)

PLAY_SEP = "."

DEFAULT_MAX_PLAYS = 200_000


def play_parts(play: str) -> tuple[str, ...]:
    return tuple(play.split(PLAY_SEP))


def play_join(parts) -> str:
    return PLAY_SEP.join(parts)


class ComonadKind(Enum):
    EF = "ef"
    MODAL = "modal"
    HYBRID = "hybrid"
    HYBRID_TEMPORAL = "hybrid-temporal"
    BOUNDED = "bounded"


_UNIMODAL_KINDS = (ComonadKind.MODAL, ComonadKind.HYBRID, ComonadKind.HYBRID_TEMPORAL)


@dataclass(frozen=True)
class ComonadStructure:
    kind: ComonadKind
    k: int
    base: Structure
    carrier: Structure
    with_I: bool

    @property
    def plays(self) -> tuple[str, ...]:
        return self.carrier.universe

    def children(self, play: str) -> tuple[str, ...]:
        """Immediate extensions of a play inside the carrier."""
        return self._children_map()[play]

    def _children_map(self) -> dict[str, tuple[str, ...]]:
        cached = getattr(self, "_children_cache", None)
        if cached is None:
            out: dict[str, list[str]] = {p: [] for p in self.plays}
            for p in self.plays:
                parts = play_parts(p)
                if len(parts) > 1:
                    out[play_join(parts[:-1])].append(p)
            cached = {p: tuple(v) for p, v in out.items()}
            object.__setattr__(self, "_children_cache", cached)
        return cached


def build_comonad(
    base: Structure,
    kind: ComonadKind,
    k: int,
    with_I: bool = False,
    max_plays: int = DEFAULT_MAX_PLAYS,
) -> ComonadStructure:
    """Materialize the comonad carrier over a pointed structure.

    The carrier universe is ordered by play length, then lexicographically by
    base universe positions, which fixes deterministic iteration for morphism
    search and dump output.
    """
    if k < 1:
        raise ValueError(f"comonad resource k must be at least 1, got {k}")
    sig = base.signature
    m = sig.num_basepoints
    if kind in _UNIMODAL_KINDS and not sig.is_unimodal():
        raise ValueError(
            f"{kind.value} comonads need a unimodal signature "
            "(one transition relation, one basepoint)"
        )
    if kind is ComonadKind.BOUNDED and m < 1:
        raise ValueError("bounded comonads need at least one basepoint")
    for e in base.universe:
        if PLAY_SEP in e:
            raise ValueError(
                f"element id {e!r} contains the play separator {PLAY_SEP!r}"
            )

    edges = base.transition_edges()

    def extension_ok(played: tuple[str, ...], candidate: str) -> bool:
        if kind is ComonadKind.EF:
            return True
        if kind is ComonadKind.MODAL:
            return (played[-1], candidate) in edges
        if kind is ComonadKind.HYBRID or kind is ComonadKind.BOUNDED:
            return any((p, candidate) in edges for p in played)
        return any(
            (p, candidate) in edges or (candidate, p) in edges for p in played
        )

    plays: list[tuple[str, ...]] = []
    frontier: list[tuple[str, ...]] = []
    for i in range(1, m + 1):
        prefix = base.basepoints[:i]
        plays.append(prefix)
        frontier = [prefix]
    if m == 0:
        frontier = [()]
    while frontier:
        nxt: list[tuple[str, ...]] = []
        for played in frontier:
            if len(played) >= k + m:
                continue
            for candidate in base.universe:
                if played and not extension_ok(played, candidate):
                    continue
                extended = played + (candidate,)
                nxt.append(extended)
        plays.extend(nxt)
        if len(plays) > max_plays:
            raise ResourceLimitError(
                f"carrier would exceed {max_plays} plays; "
                "raise max_plays to build it anyway"
            )
        frontier = nxt

    encoded = [play_join(p) for p in plays]
    rels: dict[str, list[tuple[str, ...]]] = {name: [] for name in sig.relations}
    single_transition = next(iter(sig.transitions)) if sig.transitions else None
    by_parts = {p: play_parts(p) for p in encoded}
    prefix_sets = {
        p: [play_join(by_parts[p][:i]) for i in range(1, len(by_parts[p]) + 1)]
        for p in encoded
    }
    for name, arity in sig.relations.items():
        base_tuples = set(base.relations[name])
        out = rels[name]
        if kind is ComonadKind.MODAL and name == single_transition:
            for p in encoded:
                parts = by_parts[p]
                if len(parts) > 1 and (parts[-2], parts[-1]) in base_tuples:
                    out.append((play_join(parts[:-1]), p))
            continue
        if arity == 1:
            out.extend((p,) for p in encoded if (by_parts[p][-1],) in base_tuples)
            continue
        seen: set[tuple[str, ...]] = set()
        for p in encoded:
            chain = prefix_sets[p]
            for tup in _tuples_over_chain(chain, p, arity):
                if tup in seen:
                    continue
                seen.add(tup)
                lasts = tuple(by_parts[q][-1] for q in tup)
                if lasts in base_tuples:
                    out.append(tup)
    if with_I:
        identity: list[tuple[str, str]] = []
        seen_i: set[tuple[str, str]] = set()
        for p in encoded:
            chain = prefix_sets[p]
            last_p = by_parts[p][-1]
            for q in chain:
                for tup in ((p, q), (q, p)):
                    if tup not in seen_i:
                        seen_i.add(tup)
                        if by_parts[tup[0]][-1] == by_parts[tup[1]][-1]:
                            identity.append(tup)
        rels[RESERVED_IDENTITY] = identity
        carrier_rels = dict(sig.relations)
        carrier_rels[RESERVED_IDENTITY] = 2
        carrier_sig = Signature(
            carrier_rels, sig.transitions, m, _allow_reserved=True
        )
    else:
        carrier_sig = Signature(sig.relations, sig.transitions, m, _allow_reserved=True)
    carrier_bps = tuple(play_join(base.basepoints[: i + 1]) for i in range(m))
    carrier = Structure(carrier_sig, encoded, rels, carrier_bps)
    return ComonadStructure(kind, k, base, carrier, with_I)


def _tuples_over_chain(chain: list[str], top: str, arity: int):
    """All arity-tuples of plays from the chain that mention its top element.

    Comparable tuples lie on a single branch, so enumerating per branch with
    the longest play required avoids duplicates across branches.
    """
    if arity == 2:
        for q in chain:
            yield (top, q)
            if q != top:
                yield (q, top)
        return

    def rec(partial: tuple[str, ...]):
        if len(partial) == arity:
            if top in partial:
                yield partial
            return
        for q in chain:
            yield from rec(partial + (q,))

    yield from rec(())


def counit(c: ComonadStructure, play: str) -> str:
    """Last element of a play: the current focus."""
    if play not in c.carrier._pos:
        raise ValueError(f"play {play!r} is not in the carrier")
    return play_parts(play)[-1]


def cokleisli_extension(
    h: Mapping[str, str], c_a: ComonadStructure, c_b: ComonadStructure
) -> dict[str, str]:
    """The coextension of a map from plays over A to elements of B: apply the
    map to every prefix.  Total on the carrier of A; lands in the carrier of
    B whenever the input is a coKleisli homomorphism."""
    if c_a.kind is not c_b.kind or c_a.k != c_b.k:
        raise ValueError("coKleisli extension needs matching kind and resource")
    out: dict[str, str] = {}
    for play in c_a.plays:
        parts = play_parts(play)
        images = []
        for i in range(1, len(parts) + 1):
            prefix = play_join(parts[:i])
            if prefix not in h:
                raise ValueError(f"map is not total: no image for play {prefix!r}")
            images.append(h[prefix])
        out[play] = play_join(images)
    return out


def comultiplication(c: ComonadStructure, play: str) -> tuple[str, ...]:
    """The play of plays listing all prefixes; this is the coextension of the
    identity map."""
    if play not in c.carrier._pos:
        raise ValueError(f"play {play!r} is not in the carrier")
    parts = play_parts(play)
    return tuple(play_join(parts[:i]) for i in range(1, len(parts) + 1))


def lift_homomorphism(
    f: Mapping[str, str], c_a: ComonadStructure, c_b: ComonadStructure
) -> dict[str, str]:
    """Functorial lift of a base homomorphism: map plays elementwise."""
    return {
        play: play_join(f[e] for e in play_parts(play)) for play in c_a.plays
    }


@dataclass(frozen=True)
class ComonadLawReport:
    counit_law: bool  # counit after coextension recovers the map
    identity_law: bool  # coextension of the counit is the identity
    associativity_law: bool  # coextension distributes over coKleisli composition
    failures: tuple[str, ...]

    @property
    def all_pass(self) -> bool:
        return self.counit_law and self.identity_law and self.associativity_law


def check_comonad_laws(
    c_a: ComonadStructure,
    c_b: ComonadStructure,
    c_c: ComonadStructure,
    h: Mapping[str, str],
    g: Mapping[str, str],
    h_star: Mapping[str, str] | None = None,
    g_star: Mapping[str, str] | None = None,
) -> ComonadLawReport:
    """Check the three Kleisli-form equations pointwise on every play.

    ``h`` maps plays over A to elements of B, ``g`` plays over B to elements
    of C.  Precomputed coextensions may be supplied (e.g. corrupted ones, as
    a negative control); by default they are computed here.
    """
    failures: list[str] = []
    if h_star is None:
        h_star = cokleisli_extension(h, c_a, c_b)
    if g_star is None:
        g_star = cokleisli_extension(g, c_b, c_c)

    law1 = True
    for play in c_a.plays:
        if play_parts(h_star[play])[-1] != h[play]:
            law1 = False
            failures.append(f"counit law fails at {play!r}")
            break

    eps = {play: play_parts(play)[-1] for play in c_a.plays}
    eps_star = cokleisli_extension(eps, c_a, c_a)
    law2 = True
    for play in c_a.plays:
        if eps_star[play] != play:
            law2 = False
            failures.append(f"identity law fails at {play!r}")
            break

    law3 = True
    escape = next((p for p in c_a.plays if h_star[p] not in g_star), None)
    if escape is not None:
        law3 = False
        failures.append(
            f"associativity law not checkable at {escape!r}: "
            f"{h_star[escape]!r} is outside the middle carrier"
        )
    else:
        gh = {p: g[h_star[p]] for p in c_a.plays}
        gh_star = cokleisli_extension(gh, c_a, c_c)
        for play in c_a.plays:
            if gh_star[play] != g_star[h_star[play]]:
                law3 = False
                failures.append(f"associativity law fails at {play!r}")
                break

    return ComonadLawReport(law1, law2, law3, tuple(failures))


def find_cokleisli_morphism(
    a: Structure,
    b: Structure,
    kind: ComonadKind,
    k: int,
    max_plays: int = DEFAULT_MAX_PLAYS,
) -> dict[str, str] | None:
    """Deterministic least coKleisli morphism from A to B, or None.

    The search looks for a homomorphism from the I-carrier over A to B with
    the identity I-relation, preserving basepoints.  Carrier relations only
    relate comparable plays, so the image of a play is constrained by its
    prefix branch alone; subtree viability is memoized on (play, branch
    images) and witnesses are chosen least in universe order.
    """
    if not a.signature.same_vocabulary(b.signature):
        raise ValueError("signature mismatch between the two structures")
    if a.signature.num_basepoints != b.signature.num_basepoints:
        raise ValueError("basepoint count mismatch between the two structures")
    c_a = build_comonad(a, kind, k, with_I=True, max_plays=max_plays)
    target = with_identity_I(b)
    carrier = c_a.carrier
    m = a.signature.num_basepoints

    by_parts = {p: play_parts(p) for p in carrier.universe}
    # Constraint tuples grouped under their longest component play.
    constraints: dict[str, list[tuple[set[tuple[str, ...]], tuple[int, ...]]]] = {
        p: [] for p in carrier.universe
    }
    for name, tuples in carrier.relations.items():
        target_set = set(target.relations[name])
        for tup in tuples:
            longest = max(tup, key=lambda q: len(by_parts[q]))
            depths = tuple(len(by_parts[q]) - 1 for q in tup)
            constraints[longest].append((target_set, depths))

    forced: dict[str, str] = {}
    for i in range(m):
        forced[play_join(a.basepoints[: i + 1])] = b.basepoints[i]

    def candidates(play: str) -> tuple[str, ...]:
        want = forced.get(play)
        if want is not None:
            return (want,)
        return b.universe

    def constraints_ok(play: str, images: tuple[str, ...]) -> bool:
        for target_set, depths in constraints[play]:
            mapped = tuple(images[d] for d in depths)
            if mapped not in target_set:
                return False
        return True

    viable_memo: dict[tuple[str, tuple[str, ...]], bool] = {}

    def viable(play: str, images: tuple[str, ...]) -> bool:
        key = (play, images)
        got = viable_memo.get(key)
        if got is not None:
            return got
        ok = True
        for child in c_a.children(play):
            if not any(
                constraints_ok(child, images + (v,)) and viable(child, images + (v,))
                for v in candidates(child)
            ):
                ok = False
                break
        viable_memo[key] = ok
        return ok

    witness: dict[str, str] = {}
    for play in carrier.universe:
        parts = by_parts[play]
        images = tuple(
            witness[play_join(parts[:i])] for i in range(1, len(parts))
        )
        chosen = None
        for v in candidates(play):
            if constraints_ok(play, images + (v,)) and viable(play, images + (v,)):
                chosen = v
                break
        if chosen is None:
            return None
        witness[play] = chosen
    return witness


def lands_in_carrier(h_star: Mapping[str, str], c: ComonadStructure) -> bool:
    """Whether every image of a coextension is a play of the given carrier."""
    plays = set(c.plays)
    return all(v in plays for v in h_star.values())


def is_cokleisli_homomorphism(
    h: Mapping[str, str], c_a: ComonadStructure, b: Structure
) -> bool:
    """Whether h is a homomorphism from the carrier over A to B, with the
    identity interpretation of I when the carrier tracks it."""
    target = with_identity_I(b) if c_a.with_I else b
    return is_homomorphism(h, c_a.carrier, target)


def dump_carrier(c: ComonadStructure) -> str:
    """Diffable dump: one play per line, then one block per relation."""
    lines = [f"kind: {c.kind.value}", f"k: {c.k}", f"plays: {len(c.plays)}"]
    lines.extend(c.plays)
    for name in sorted(c.carrier.relations):
        lines.append(f"[{name}]")
        for tup in sorted(c.carrier.relations[name]):
            lines.append(" ".join(tup))
    return "\n".join(lines) + "\n"

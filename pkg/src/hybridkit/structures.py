"""Finite relational structures with basepoints, and the substructure operators on them.

A :class:`Structure` is a finite relational structure over a :class:`Signature`
together with an m-tuple of basepoints (m may be 0).  Element ids are opaque
strings; the universe is an ordered tuple, and that order fixes deterministic
iteration and tie-breaking everywhere downstream.  Relation tuples are stored
sorted, so structure equality is syntactic.

The module also provides the Gaifman graph and its path metric, disjoint
unions, and the two idempotent substructure operators: the reachable part
(directed transition paths from the basepoints, bounded by k) and the ball
part (Gaifman balls of radius k around the basepoints).
"""
from __future__ import annotations

import json
from typing import Iterable, Mapping, Sequence

from .errors import InvalidStructureError

#: Distinguished infinite distance / unbounded resource value.  Arithmetic
#: and comparisons saturate the way extended naturals should.
INF = float("inf")

RESERVED_IDENTITY = "I"


class Signature:
    """Relation symbols with arities, a transition sub-vocabulary, and a basepoint count.

    ``transitions`` must be binary relation symbols; they are the relations
    that guard bounded quantifiers and game moves.  The symbol name ``I`` is
    reserved for the injected identity relation and cannot appear in user
    signatures.
    """

    __slots__ = ("relations", "transitions", "num_basepoints")

    def __init__(
        self,
        relations: Mapping[str, int],
        transitions: Iterable[str] = (),
        num_basepoints: int = 1,
        _allow_reserved: bool = False,
    ):
        rels = dict(relations)
        for name, arity in rels.items():
            if not isinstance(arity, int) or arity < 1:
                raise InvalidStructureError(
                    f"signature.relations.{name}: arity must be a positive integer, got {arity!r}"
                )
            if name == RESERVED_IDENTITY and not _allow_reserved:
                raise InvalidStructureError(
                    "signature.relations.I: the symbol name 'I' is reserved"
                )
        trans = frozenset(transitions)
        for name in sorted(trans):
            if name not in rels:
                raise InvalidStructureError(
                    f"signature.transitions: {name!r} is not a relation symbol"
                )
            if rels[name] != 2:
                raise InvalidStructureError(
                    f"signature.transitions: {name!r} has arity {rels[name]}, transitions must be binary"
                )
        if not isinstance(num_basepoints, int) or num_basepoints < 0:
            raise InvalidStructureError(
                f"signature.num_basepoints: must be a natural number, got {num_basepoints!r}"
            )
        self.relations: dict[str, int] = rels
        self.transitions: frozenset[str] = trans
        self.num_basepoints: int = num_basepoints

    def _key(self):
        return (
            tuple(sorted(self.relations.items())),
            tuple(sorted(self.transitions)),
            self.num_basepoints,
        )

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (
            f"Signature({self.relations!r}, transitions={sorted(self.transitions)!r}, "
            f"num_basepoints={self.num_basepoints})"
        )

    def is_unimodal(self) -> bool:
        """Single transition relation and exactly one basepoint."""
        return len(self.transitions) == 1 and self.num_basepoints == 1

    def with_num_basepoints(self, m: int) -> "Signature":
        return Signature(self.relations, self.transitions, m, _allow_reserved=True)

    def same_vocabulary(self, other: "Signature") -> bool:
        """Equal relation symbols/arities and transitions, ignoring basepoint count."""
        return (
            self.relations == other.relations and self.transitions == other.transitions
        )


class Structure:
    """A finite relational structure with an m-tuple of basepoints.

    Immutable after construction; all operations in this package are pure.
    """

    __slots__ = ("signature", "universe", "relations", "basepoints", "_pos")

    def __init__(
        self,
        signature: Signature,
        universe: Sequence[str],
        relations: Mapping[str, Iterable[Sequence[str]]],
        basepoints: Sequence[str] = (),
    ):
        uni = tuple(universe)
        pos: dict[str, int] = {}
        for i, el in enumerate(uni):
            if not isinstance(el, str):
                raise InvalidStructureError(
                    f"universe[{i}]: element ids must be strings, got {el!r}"
                )
            if el in pos:
                raise InvalidStructureError(f"universe[{i}]: duplicate element {el!r}")
            pos[el] = i
        canon: dict[str, tuple[tuple[str, ...], ...]] = {}
        for name in relations:
            if name not in signature.relations:
                raise InvalidStructureError(
                    f"relations.{name}: not a relation symbol of the signature"
                )
        for name, arity in signature.relations.items():
            tuples = []
            for j, tup in enumerate(relations.get(name, ())):
                tup = tuple(tup)
                if len(tup) != arity:
                    raise InvalidStructureError(
                        f"relations.{name}[{j}]: expected arity {arity}, got {len(tup)}"
                    )
                for p, el in enumerate(tup):
                    if el not in pos:
                        raise InvalidStructureError(
                            f"relations.{name}[{j}][{p}]: {el!r} is not in the universe"
                        )
                tuples.append(tup)
            canon[name] = tuple(sorted(set(tuples)))
        bps = tuple(basepoints)
        if len(bps) != signature.num_basepoints:
            raise InvalidStructureError(
                f"basepoints: expected {signature.num_basepoints} basepoints, got {len(bps)}"
            )
        for i, el in enumerate(bps):
            if el not in pos:
                raise InvalidStructureError(
                    f"basepoints[{i}]: {el!r} is not in the universe"
                )
        self.signature = signature
        self.universe = uni
        self.relations = canon
        self.basepoints = bps
        self._pos = pos

    # -- identity -----------------------------------------------------------

    def _key(self):
        return (
            self.signature,
            self.universe,
            tuple(sorted(self.relations.items())),
            self.basepoints,
        )

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        rels = {k: list(v) for k, v in self.relations.items() if v}
        return (
            f"Structure(universe={list(self.universe)!r}, relations={rels!r}, "
            f"basepoints={list(self.basepoints)!r})"
        )

    def __len__(self):
        return len(self.universe)

    # -- helpers ------------------------------------------------------------

    def position(self, element: str) -> int:
        """Index of an element in the universe order."""
        return self._pos[element]

    def has_tuple(self, relation: str, tup: Sequence[str]) -> bool:
        return tuple(tup) in set(self.relations[relation])

    def transition_edges(self) -> set[tuple[str, str]]:
        """All directed (u, v) pairs related by some transition relation."""
        edges: set[tuple[str, str]] = set()
        for name in self.signature.transitions:
            edges.update(self.relations[name])
        return edges

    def induced(self, elements: Iterable[str]) -> "Structure":
        """Induced substructure on the given elements, keeping universe order.

        Basepoints must all survive; raises otherwise.
        """
        keep = set(elements)
        uni = [e for e in self.universe if e in keep]
        rels = {
            name: [t for t in tuples if all(e in keep for e in t)]
            for name, tuples in self.relations.items()
        }
        return Structure(self.signature, uni, rels, self.basepoints)

    def relabel(self, mapping: Mapping[str, str]) -> "Structure":
        """Rename elements injectively; universe order follows the old order."""
        images = [mapping[e] for e in self.universe]
        if len(set(images)) != len(images):
            raise ValueError("relabeling must be injective")
        uni = images
        rels = {
            name: [tuple(mapping[e] for e in t) for t in tuples]
            for name, tuples in self.relations.items()
        }
        bps = tuple(mapping[e] for e in self.basepoints)
        return Structure(self.signature, uni, rels, bps)


# -- Gaifman machinery -------------------------------------------------------


def gaifman_graph(s: Structure) -> dict[str, tuple[str, ...]]:
    """Adjacency of the Gaifman graph: distinct elements co-occurring in a tuple."""
    adj: dict[str, set[str]] = {e: set() for e in s.universe}
    for tuples in s.relations.values():
        for tup in tuples:
            for x in tup:
                for y in tup:
                    if x != y:
                        adj[x].add(y)
    return {e: tuple(sorted(adj[e], key=s.position)) for e in s.universe}


class DistanceMatrix:
    """All-pairs Gaifman path distance; unreachable pairs are ``INF``."""

    __slots__ = ("order", "_d")

    def __init__(self, order: Sequence[str], dist: Mapping[tuple[str, str], float]):
        self.order = tuple(order)
        self._d = dict(dist)

    def distance(self, x: str, y: str) -> float:
        return self._d[(x, y)]

    def ball(self, centers: Iterable[str], radius: float) -> tuple[str, ...]:
        """Elements within `radius` of some center, in universe order."""
        cs = list(centers)
        return tuple(
            e for e in self.order if any(self._d[(c, e)] <= radius for c in cs)
        )

    def set_distance(self, xs: Iterable[str], ys: Iterable[str]) -> float:
        """inf over pairs; INF when either side is empty."""
        best = INF
        ys = list(ys)
        for x in xs:
            for y in ys:
                d = self._d[(x, y)]
                if d < best:
                    best = d
        return best


def gaifman_distance(s: Structure) -> DistanceMatrix:
    """BFS from every element over the Gaifman graph."""
    adj = gaifman_graph(s)
    dist: dict[tuple[str, str], float] = {}
    for src in s.universe:
        seen = {src: 0}
        frontier = [src]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if v not in seen:
                        seen[v] = d
                        nxt.append(v)
            frontier = nxt
        for e in s.universe:
            dist[(src, e)] = seen.get(e, INF)
    return DistanceMatrix(s.universe, dist)


# -- sums ---------------------------------------------------------------------


def tagged_sum(
    parts: Sequence[tuple[str, Structure]], basepoints_from: int | None = 0
) -> Structure:
    """Disjoint sum of same-vocabulary structures, elements retagged ``tag:id``.

    Basepoints are taken (retagged) from the part at index ``basepoints_from``;
    ``None`` produces an unpointed sum.
    """
    if not parts:
        raise ValueError("tagged_sum of no parts")
    sig0 = parts[0][1].signature
    for tag, part in parts[1:]:
        if not sig0.same_vocabulary(part.signature):
            raise InvalidStructureError(
                f"signature mismatch between summands {parts[0][0]!r} and {tag!r}"
            )
    tags = [tag for tag, _ in parts]
    if len(set(tags)) != len(tags):
        raise ValueError(f"duplicate summand tags: {tags}")
    universe: list[str] = []
    rels: dict[str, list[tuple[str, ...]]] = {
        name: [] for name in sig0.relations
    }
    for tag, part in parts:
        universe.extend(f"{tag}:{e}" for e in part.universe)
        for name, tuples in part.relations.items():
            rels[name].extend(tuple(f"{tag}:{e}" for e in t) for t in tuples)
    if basepoints_from is None:
        bps: tuple[str, ...] = ()
    else:
        base_tag, base_part = parts[basepoints_from]
        bps = tuple(f"{base_tag}:{e}" for e in base_part.basepoints)
    sig = sig0.with_num_basepoints(len(bps))
    return Structure(sig, universe, rels, bps)


def disjoint_union(a: Structure, b: Structure) -> Structure:
    """Coproduct of structures; basepoints come from the left operand.

    Elements are retagged with ``L:`` / ``R:`` prefixes.
    """
    if not a.signature.same_vocabulary(b.signature):
        raise InvalidStructureError("signature mismatch between operands")
    return tagged_sum([("L", a), ("R", b)], basepoints_from=0)


# -- substructure operators ---------------------------------------------------


def reachable_part(s: Structure, k: float = INF) -> Structure:
    """Induced substructure on elements reachable from a basepoint by a
    directed transition path of length <= k.  ``k=INF`` gives the full
    reachable part."""
    succ: dict[str, set[str]] = {e: set() for e in s.universe}
    for u, v in s.transition_edges():
        succ[u].add(v)
    depth: dict[str, float] = {e: 0 for e in s.basepoints}
    frontier = list(dict.fromkeys(s.basepoints))
    d = 0
    while frontier and d < k:
        d += 1
        nxt = []
        for u in frontier:
            for v in succ[u]:
                if v not in depth:
                    depth[v] = d
                    nxt.append(v)
        frontier = nxt
    return s.induced(depth)


def ball_part(s: Structure, k: float) -> Structure:
    """Induced substructure on the union of Gaifman k-balls around the basepoints."""
    dist = gaifman_distance(s)
    return s.induced(dist.ball(s.basepoints, k))


# -- morphism predicates ------------------------------------------------------


def is_homomorphism(h: Mapping[str, str], a: Structure, b: Structure) -> bool:
    """True iff ``h`` preserves every relation tuple and maps basepoints
    to basepoints componentwise.  ``h`` must be total on ``a`` and land in
    ``b``'s universe; otherwise a ``ValueError`` is raised."""
    for e in a.universe:
        if e not in h:
            raise ValueError(f"map is not total: no image for {e!r}")
        if h[e] not in b._pos:
            raise ValueError(f"map sends {e!r} outside the codomain universe")
    if len(a.basepoints) != len(b.basepoints):
        raise ValueError("basepoint tuples have different lengths")
    for x, y in zip(a.basepoints, b.basepoints):
        if h[x] != y:
            return False
    for name, tuples in a.relations.items():
        target = set(b.relations[name])
        for tup in tuples:
            if tuple(h[e] for e in tup) not in target:
                return False
    return True


def is_partial_isomorphism(
    pairs: Iterable[tuple[str, str]], a: Structure, b: Structure
) -> bool:
    """True iff the pair set is a well-defined injective partial map whose
    graph preserves and reflects every relation (and equality) on its
    domain/range."""
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}
    for x, y in pairs:
        if x not in a._pos or y not in b._pos:
            return False
        if fwd.get(x, y) != y or bwd.get(y, x) != x:
            return False
        fwd[x] = y
        bwd[y] = x
    for name, tuples in a.relations.items():
        target = set(b.relations[name])
        for tup in tuples:
            if all(e in fwd for e in tup):
                if tuple(fwd[e] for e in tup) not in target:
                    return False
    for name, tuples in b.relations.items():
        source = set(a.relations[name])
        for tup in tuples:
            if all(e in bwd for e in tup):
                if tuple(bwd[e] for e in tup) not in source:
                    return False
    return True


def with_identity_I(s: Structure) -> Structure:
    """The structure extended with the identity relation ``I`` (not a transition)."""
    rels = dict(s.signature.relations)
    if RESERVED_IDENTITY in rels:
        raise InvalidStructureError("structure already interprets 'I'")
    rels[RESERVED_IDENTITY] = 2
    sig = Signature(
        rels,
        s.signature.transitions,
        s.signature.num_basepoints,
        _allow_reserved=True,
    )
    interp = {name: list(tuples) for name, tuples in s.relations.items()}
    interp[RESERVED_IDENTITY] = [(e, e) for e in s.universe]
    return Structure(sig, s.universe, interp, s.basepoints)


# -- JSON ---------------------------------------------------------------------


def structure_from_data(data: object) -> Structure:
    """Build a structure from the documented JSON shape, validating all
    invariants and reporting the first violation with its path."""
    if not isinstance(data, dict):
        raise InvalidStructureError(": top-level value must be an object")
    sig_data = data.get("signature")
    if not isinstance(sig_data, dict):
        raise InvalidStructureError("signature: missing or not an object")
    rels = sig_data.get("relations")
    if not isinstance(rels, dict):
        raise InvalidStructureError("signature.relations: missing or not an object")
    transitions = sig_data.get("transitions", [])
    if not isinstance(transitions, list):
        raise InvalidStructureError("signature.transitions: must be a list")
    universe = data.get("universe")
    if not isinstance(universe, list):
        raise InvalidStructureError("universe: missing or not a list")
    relations = data.get("relations", {})
    if not isinstance(relations, dict):
        raise InvalidStructureError("relations: must be an object")
    basepoints = data.get("basepoints", [])
    if not isinstance(basepoints, list):
        raise InvalidStructureError("basepoints: must be a list")
    sig = Signature(rels, transitions, num_basepoints=len(basepoints))
    return Structure(sig, universe, relations, basepoints)


def load_structure(path: str) -> Structure:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidStructureError(f"{path}: not valid JSON: {exc}") from exc
    return structure_from_data(data)


def structure_to_data(s: Structure) -> dict:
    return {
        "signature": {
            "relations": dict(sorted(s.signature.relations.items())),
            "transitions": sorted(s.signature.transitions),
        },
        "universe": list(s.universe),
        "relations": {
            name: [list(t) for t in tuples]
            for name, tuples in sorted(s.relations.items())
        },
        "basepoints": list(s.basepoints),
    }

"""Generated tree covers, their correspondence with comonad coalgebras,
generated tree depth and the coalgebra number, and the small-scale path /
embedding / open-map predicates.

A cover is stored as a parent map (the covering relation); the order is its
reflexive-transitive closure.  For an m-pointed structure the basepoints must
form the chain ``a1 < ... < am`` with everything else in a tree rooted at the
last basepoint.  Heights count nodes, and the bound for resource k is
``height - m <= k`` (for one basepoint this is the familiar ``height <= k+1``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Mapping

from .errors import InvalidStructureError, ResourceLimitError
from .structures import (
    INF,
    Structure,
    gaifman_graph,
    is_homomorphism,
    is_partial_isomorphism,
)
from .comonads import (
    ComonadKind,
    ComonadStructure,
    build_comonad,
    play_join,
    play_parts,
)


class TreeCover:
    """A tree order on a structure's universe, stored via the parent map."""

    def __init__(self, base: Structure, parent: Mapping[str, str]):
        self.base = base
        self.parent = dict(parent)
        for child, par in self.parent.items():
            for el, role in ((child, "child"), (par, "parent")):
                if el not in base._pos:
                    raise InvalidStructureError(
                        f"parent.{child}: {role} {el!r} is not in the universe"
                    )
        self._branches: dict[str, tuple[str, ...]] | None = None

    def __eq__(self, other):
        if not isinstance(other, TreeCover):
            return NotImplemented
        return self.base == other.base and self.parent == other.parent

    def __hash__(self):
        return hash((self.base, tuple(sorted(self.parent.items()))))

    def __repr__(self):
        return f"TreeCover(parent={self.parent!r})"

    def roots(self) -> tuple[str, ...]:
        return tuple(e for e in self.base.universe if e not in self.parent)

    def branch(self, element: str) -> tuple[str, ...]:
        """Ancestor chain listed root-to-element; raises on a parent cycle."""
        if self._branches is None:
            self._branches = {}
        got = self._branches.get(element)
        if got is not None:
            return got
        chain = [element]
        seen = {element}
        cur = element
        while cur in self.parent:
            cur = self.parent[cur]
            if cur in seen:
                raise ValueError(f"parent map has a cycle through {cur!r}")
            seen.add(cur)
            chain.append(cur)
        out = tuple(reversed(chain))
        self._branches[element] = out
        return out

    def le(self, x: str, y: str) -> bool:
        return x in self.branch(y)

    def comparable(self, x: str, y: str) -> bool:
        return self.le(x, y) or self.le(y, x)

    def height(self) -> int:
        return max((len(self.branch(e)) for e in self.base.universe), default=0)


def is_generated_tree_cover(t: TreeCover, k_bound: int | None = None) -> bool:
    """All cover conditions: a tree order rooted at the basepoint chain,
    Gaifman-adjacent elements comparable, and every element beyond the chain
    seen from a strict predecessor through a transition relation.  With
    ``k_bound``, additionally ``height - m <= k_bound``."""
    base = t.base
    m = base.signature.num_basepoints
    if m < 1:
        return False
    bps = base.basepoints
    if len(set(bps)) != m:
        return False
    branches = {e: t.branch(e) for e in base.universe}
    if t.roots() != (bps[0],):
        return False
    for i in range(1, m):
        if t.parent.get(bps[i]) != bps[i - 1]:
            return False
    # nothing except the next basepoint may hang below a non-final basepoint
    for child, par in t.parent.items():
        for i in range(m - 1):
            if par == bps[i] and child != bps[i + 1]:
                return False
    adjacency = gaifman_graph(base)
    for x in base.universe:
        for y in adjacency[x]:
            if not t.comparable(x, y):
                return False
    edges = base.transition_edges()
    chain = set(bps)
    for e in base.universe:
        if e in chain:
            continue
        branch = branches[e]
        if not any((anc, e) in edges for anc in branch[:-1]):
            return False
    if k_bound is not None and t.height() - m > k_bound:
        return False
    return True


class Coalgebra:
    """A branch assignment into a comonad carrier over the same base."""

    def __init__(self, target: ComonadStructure, alpha: Mapping[str, str]):
        self.target = target
        self.alpha = dict(alpha)

    @property
    def base(self) -> Structure:
        return self.target.base

    def __eq__(self, other):
        if not isinstance(other, Coalgebra):
            return NotImplemented
        return self.target == other.target and self.alpha == other.alpha

    def __repr__(self):
        return f"Coalgebra(alpha={self.alpha!r})"


def default_kind(s: Structure) -> ComonadKind:
    return ComonadKind.HYBRID if s.signature.is_unimodal() else ComonadKind.BOUNDED


def cover_to_coalgebra(
    t: TreeCover, k: int, kind: ComonadKind | None = None
) -> Coalgebra:
    """Read each element's root-to-element branch as its play."""
    if not is_generated_tree_cover(t, k):
        raise ValueError("not a generated tree cover within the height bound")
    base = t.base
    kind = kind or default_kind(base)
    target = build_comonad(base, kind, k, with_I=False)
    plays = set(target.plays)
    alpha = {}
    for e in base.universe:
        play = play_join(t.branch(e))
        if play not in plays:
            raise ValueError(f"branch of {e!r} is not a play of the carrier")
        alpha[e] = play
    return Coalgebra(target, alpha)


def coalgebra_to_cover(c: Coalgebra) -> TreeCover:
    """Recover the cover: the parent of an element is the next-to-last entry
    of its play."""
    report = check_coalgebra_laws(c)
    if not report.all_pass:
        raise ValueError(f"coalgebra laws fail: {report.failures[0]}")
    parent = {}
    for e, play in c.alpha.items():
        parts = play_parts(play)
        if len(parts) > 1:
            parent[e] = parts[-2]
    return TreeCover(c.base, parent)


@dataclass(frozen=True)
class CoalgebraLawReport:
    membership: bool  # every branch is a play of the carrier
    counit_law: bool  # last element of the branch is the element itself
    comultiplication_law: bool  # prefixes of a branch are the branches of its entries
    homomorphism: bool  # the assignment preserves relations and basepoints
    failures: tuple[str, ...]

    @property
    def all_pass(self) -> bool:
        return (
            self.membership
            and self.counit_law
            and self.comultiplication_law
            and self.homomorphism
        )


def check_coalgebra_laws(c: Coalgebra) -> CoalgebraLawReport:
    base = c.base
    carrier = c.target.carrier
    failures: list[str] = []
    plays = set(carrier.universe)

    membership = True
    for e in base.universe:
        if e not in c.alpha:
            failures.append(f"no play assigned to {e!r}")
            membership = False
            break
        if c.alpha[e] not in plays:
            failures.append(f"branch of {e!r} is not a play of the carrier")
            membership = False
            break

    counit_law = membership
    if membership:
        for e in base.universe:
            if play_parts(c.alpha[e])[-1] != e:
                failures.append(f"counit law fails at {e!r}")
                counit_law = False
                break

    comult_law = membership
    if membership:
        for e in base.universe:
            parts = play_parts(c.alpha[e])
            for i, entry in enumerate(parts, start=1):
                if c.alpha.get(entry) != play_join(parts[:i]):
                    failures.append(
                        f"comultiplication law fails at {e!r} (entry {entry!r})"
                    )
                    comult_law = False
                    break
            if not comult_law:
                break

    hom = membership
    if membership:
        hom = is_homomorphism(c.alpha, base, carrier)
        if not hom:
            failures.append("assignment is not a homomorphism into the carrier")

    return CoalgebraLawReport(membership, counit_law, comult_law, hom, tuple(failures))


# -- enumeration -----------------------------------------------------------------


def enumerate_generated_covers(
    s: Structure, k_bound: int | None = None
) -> Iterator[TreeCover]:
    """All generated tree covers (within the height bound), by exhaustive
    choice of parents in universe order."""
    m = s.signature.num_basepoints
    if m < 1 or len(set(s.basepoints)) != m:
        return
    fixed = {s.basepoints[i]: s.basepoints[i - 1] for i in range(1, m)}
    rest = [e for e in s.universe if e not in s.basepoints]
    choices = [[p for p in s.universe if p != e] for e in rest]
    for combo in product(*choices) if rest else [()]:
        parent = dict(fixed)
        parent.update(zip(rest, combo))
        cover = TreeCover(s, parent)
        try:
            if is_generated_tree_cover(cover, k_bound):
                yield cover
        except ValueError:
            continue  # cyclic parent choice


def enumerate_coalgebras(
    s: Structure, kind: ComonadKind | None = None, k: int = 1
) -> Iterator[Coalgebra]:
    """All law-abiding coalgebras into the resource-k carrier, by assigning
    each element a play ending in it and pruning on branch consistency.
    Independent of the cover enumeration."""
    kind = kind or default_kind(s)
    target = build_comonad(s, kind, k, with_I=False)
    ends_with: dict[str, list[str]] = {e: [] for e in s.universe}
    for play in target.plays:
        ends_with[play_parts(play)[-1]].append(play)

    order = list(s.universe)
    seed = {
        s.basepoints[i]: play_join(s.basepoints[: i + 1])
        for i in range(s.signature.num_basepoints)
    }

    def consistent(alpha: dict[str, str], e: str, play: str) -> bool:
        parts = play_parts(play)
        for i, entry in enumerate(parts, start=1):
            want = play_join(parts[:i])
            got = alpha.get(entry)
            if got is not None and got != want:
                return False
            if entry == e and want != play:
                return False
        return True

    def assign(i: int, alpha: dict[str, str]) -> Iterator[dict[str, str]]:
        if i == len(order):
            yield dict(alpha)
            return
        e = order[i]
        if e in alpha:
            yield from assign(i + 1, alpha)
            return
        for play in ends_with[e]:
            if not consistent(alpha, e, play):
                continue
            added = []
            parts = play_parts(play)
            ok = True
            for j, entry in enumerate(parts, start=1):
                want = play_join(parts[:j])
                if entry in alpha:
                    if alpha[entry] != want:
                        ok = False
                        break
                else:
                    alpha[entry] = want
                    added.append(entry)
            if ok:
                yield from assign(i + 1, alpha)
            for entry in added:
                del alpha[entry]
        return

    for alpha in assign(0, dict(seed)):
        cand = Coalgebra(target, alpha)
        if check_coalgebra_laws(cand).all_pass:
            yield cand


def generated_tree_depth(s: Structure) -> float:
    """Minimum height over all generated tree covers; INF when none exists."""
    best = INF
    for cover in enumerate_generated_covers(s):
        h = cover.height()
        if h < best:
            best = h
    return best


def coalgebra_number(s: Structure, kind: ComonadKind | None = None) -> float:
    """Least resource k admitting a coalgebra; INF when there is none for any
    k.  Computed by direct coalgebra search so it can be checked against the
    tree-depth route independently."""
    kind = kind or default_kind(s)
    if not s.universe:
        return INF
    for k in range(1, len(s.universe) + 1):
        for _ in enumerate_coalgebras(s, kind, k):
            return k
    return INF


def carrier_tree_cover(c: ComonadStructure) -> TreeCover:
    """The prefix order on a carrier, as a cover of the carrier structure."""
    parent = {}
    for play in c.plays:
        parts = play_parts(play)
        if len(parts) > 1:
            parent[play] = play_join(parts[:-1])
    return TreeCover(c.carrier, parent)


# -- paths, embeddings, open maps ----------------------------------------------------


DEFAULT_EMBEDDING_SIZE_GUARD = 64


def check_open_pathwise_embedding(
    f: Mapping[str, str],
    t: TreeCover,
    u: TreeCover,
    size_guard: int = DEFAULT_EMBEDDING_SIZE_GUARD,
) -> bool:
    """Whether a cover morphism is an open pathwise embedding.

    Path embeddings into a cover correspond to its branches, so the pathwise
    condition asks every branch to map injectively preserving and reflecting
    relations, and openness asks every branch extension of an image to lift.
    Inputs are deliberately small; a size guard refuses big ones.
    """
    if len(t.base) > size_guard or len(u.base) > size_guard:
        raise ResourceLimitError(
            f"open-map check limited to structures of size {size_guard}"
        )
    for e in t.base.universe:
        if e not in f:
            raise ValueError(f"map is not total: no image for {e!r}")
    if not is_homomorphism(f, t.base, u.base):
        raise ValueError("not a basepoint-preserving homomorphism")
    for child, par in t.parent.items():
        if u.parent.get(f[child]) != f[par]:
            raise ValueError("map does not preserve the covering relation")

    for x in t.base.universe:
        pairs = tuple((e, f[e]) for e in t.branch(x))
        if not is_partial_isomorphism(pairs, t.base, u.base):
            return False

    for x in t.base.universe:
        fx = f[x]
        for z in u.base.universe:
            if not u.le(fx, z):
                continue
            target = u.branch(z)
            lifted = False
            for w in t.base.universe:
                if not t.le(x, w):
                    continue
                branch = t.branch(w)
                if len(branch) == len(target) and all(
                    f[branch[i]] == target[i] for i in range(len(branch))
                ):
                    lifted = True
                    break
            if not lifted:
                return False
    return True


# -- cover files ------------------------------------------------------------------------


def cover_from_data(base: Structure, data: object) -> TreeCover:
    if not isinstance(data, dict) or not isinstance(data.get("parent"), dict):
        raise InvalidStructureError('parent: cover files look like {"parent": {...}}')
    return TreeCover(base, data["parent"])


def cover_to_data(t: TreeCover) -> dict:
    return {"parent": dict(sorted(t.parent.items()))}


def load_cover(base: Structure, path: str) -> TreeCover:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidStructureError(f"{path}: not valid JSON: {exc}") from exc
    return cover_from_data(base, data)

"""Canonical type descriptors and formula-producing constructions: rank-k
characteristic formulas (Hintikka style, over transition guards), Scott type
descriptors with exact successor counts, their formula emission, and the
rewriting of disjunctively-guarded counting quantifiers into single-guard
form.
"""
from __future__ import annotations

from collections import Counter
from itertools import product

from .structures import Structure, Signature
from . import syntax as sx
from .syntax import (
    Acc,
    And,
    BoundedExists,
    BoundedForall,
    Const,
    CountExists,
    Eq,
    Exists,
    FOFormula,
    Forall,
    Not,
    Or,
    Rel,
    Term,
    Var,
)

# -- shared helpers ---------------------------------------------------------------


def _position_term(i: int, m: int) -> Term:
    """Term for position ``i`` (0-based) of an extension tuple: the first m
    positions are the constants, later ones the variables ``y1, y2, ...``."""
    if i < m:
        return Const(i + 1)
    return Var(f"y{i - m + 1}")


def _atomic_type_key(s: Structure, tup: tuple[str, ...]):
    """Canonical atomic type of a tuple: which relation atoms and equalities
    hold between its components."""
    atoms = []
    for name in sorted(s.signature.relations):
        arity = s.signature.relations[name]
        hits = frozenset(
            idx
            for idx in product(range(len(tup)), repeat=arity)
            if s.has_tuple(name, tuple(tup[i] for i in idx))
        )
        atoms.append((name, tuple(sorted(hits))))
    eqs = tuple(
        sorted(
            (i, j)
            for i in range(len(tup))
            for j in range(i + 1, len(tup))
            if tup[i] == tup[j]
        )
    )
    return (tuple(atoms), eqs)


def _atomic_type_formula(s: Structure, tup: tuple[str, ...], m: int) -> FOFormula:
    """Conjunction fixing every relation atom and equality over the tuple."""
    parts: list[FOFormula] = []
    for name in sorted(s.signature.relations):
        arity = s.signature.relations[name]
        for idx in product(range(len(tup)), repeat=arity):
            atom = Rel(name, tuple(_position_term(i, m) for i in idx))
            holds = s.has_tuple(name, tuple(tup[i] for i in idx))
            parts.append(atom if holds else Not(atom))
    for i in range(len(tup)):
        for j in range(i + 1, len(tup)):
            eq = Eq(_position_term(i, m), _position_term(j, m))
            parts.append(eq if tup[i] == tup[j] else Not(eq))
    return sx.conj_all(parts)


def _accessible(s: Structure, tup: tuple[str, ...]) -> tuple[str, ...]:
    """Elements one transition step from some component, in universe order."""
    seen: set[str] = set()
    for name in s.signature.transitions:
        edges = set(s.relations[name])
        for src in tup:
            for e in s.universe:
                if (src, e) in edges:
                    seen.add(e)
    return tuple(e for e in s.universe if e in seen)


# -- characteristic formulas ---------------------------------------------------------


def characteristic_formula(s: Structure, k: int, temporal: bool = False) -> FOFormula:
    """The rank-k bounded sentence defining the class of structures
    equivalent to ``s`` for rank-k bounded sentences.

    Built by recursion on k over transition successors of the current
    extension tuple: the atomic type, one guarded existential per realized
    successor type, and a guarded universal covering them.  With ``temporal``
    the backward guards are included as well.  Memoized per extension tuple;
    conjuncts are deduplicated syntactically.
    """
    m = s.signature.num_basepoints
    if m < 1:
        raise ValueError("characteristic formulas need at least one basepoint")
    memo: dict[tuple[tuple[str, ...], int], FOFormula] = {}

    def chi(tup: tuple[str, ...], rank: int) -> FOFormula:
        key = (tup, rank)
        got = memo.get(key)
        if got is not None:
            return got
        parts: list[FOFormula] = [_atomic_type_formula(s, tup, m)]
        if rank > 0:
            y = f"y{len(tup) - m + 1}"
            directions = [True, False] if temporal else [True]
            for name in sorted(s.signature.transitions):
                edges = set(s.relations[name])
                for i in range(len(tup)):
                    for forward in directions:
                        if forward:
                            succs = [b for b in s.universe if (tup[i], b) in edges]
                            guard = Rel(name, (_position_term(i, m), Var(y)))
                        else:
                            succs = [b for b in s.universe if (b, tup[i]) in edges]
                            guard = Rel(name, (Var(y), _position_term(i, m)))
                        child_fms = list(
                            dict.fromkeys(chi(tup + (b,), rank - 1) for b in succs)
                        )
                        for cf in child_fms:
                            parts.append(BoundedExists(y, guard, cf))
                        parts.append(BoundedForall(y, guard, sx.disj_all(child_fms)))
        out = sx.conj_all(list(dict.fromkeys(parts)))
        memo[key] = out
        return out

    return chi(s.basepoints, k)


# -- Scott types -----------------------------------------------------------------------


def scott_type(s: Structure, k: int):
    """Canonical recursive descriptor of the rank-k counting type of the
    basepoint tuple: the atomic type at rank 0; at positive rank either a
    stuck marker with the atomic type, or the exact multiset of rank-(k-1)
    extension types over the accessible elements.

    Two structures get equal descriptors exactly when they satisfy the same
    rank-k Scott sentence.
    """
    memo: dict[tuple[tuple[str, ...], int], object] = {}

    def ty(tup: tuple[str, ...], rank: int):
        key = (tup, rank)
        got = memo.get(key)
        if got is not None:
            return got
        if rank == 0:
            out = ("atomic", _atomic_type_key(s, tup))
        else:
            acc = _accessible(s, tup)
            if not acc:
                out = ("stuck", _atomic_type_key(s, tup))
            else:
                counts = Counter(ty(tup + (b,), rank - 1) for b in acc)
                out = ("counts", tuple(sorted(counts.items())))
        memo[key] = out
        return out

    return ty(s.basepoints, k)


def scott_formula(s: Structure, k: int) -> FOFormula:
    """The rank-k Scott sentence of ``s``: a counting-logic sentence with
    accessibility guards whose models are exactly the structures with the
    same rank-k descriptor.

    Successor classes are grouped by descriptor (not by emitted formula) so
    counts cover each class once, and they are ordered canonically so the
    output is deterministic.
    """
    m = s.signature.num_basepoints
    ty_memo: dict[tuple[tuple[str, ...], int], object] = {}
    fm_memo: dict[tuple[tuple[str, ...], int], FOFormula] = {}

    def ty(tup: tuple[str, ...], rank: int):
        key = (tup, rank)
        got = ty_memo.get(key)
        if got is None:
            if rank == 0:
                got = ("atomic", _atomic_type_key(s, tup))
            else:
                acc = _accessible(s, tup)
                if not acc:
                    got = ("stuck", _atomic_type_key(s, tup))
                else:
                    counts = Counter(ty(tup + (b,), rank - 1) for b in acc)
                    got = ("counts", tuple(sorted(counts.items())))
            ty_memo[key] = got
        return got

    def fm(tup: tuple[str, ...], rank: int) -> FOFormula:
        key = (tup, rank)
        got = fm_memo.get(key)
        if got is not None:
            return got
        if rank == 0:
            out = _atomic_type_formula(s, tup, m)
        else:
            acc = _accessible(s, tup)
            sources = tuple(_position_term(i, m) for i in range(len(tup)))
            y = f"y{len(tup) - m + 1}"
            guard = Acc(sources, y)
            if not acc:
                out = And(
                    Not(Exists(y, guard)), _atomic_type_formula(s, tup, m)
                )
            else:
                classes: dict[object, tuple[int, str]] = {}
                for b in acc:
                    descr = ty(tup + (b,), rank - 1)
                    count, representative = classes.get(descr, (0, b))
                    classes[descr] = (count + 1, representative)
                ordered = sorted(classes.items(), key=lambda item: item[0])
                class_fms = [
                    fm(tup + (representative,), rank - 1)
                    for _, (_, representative) in ordered
                ]
                parts: list[FOFormula] = [
                    sx.exact_count(count, y, guard, class_fm)
                    for ((_, (count, _)), class_fm) in zip(ordered, class_fms)
                ]
                parts.append(Forall(y, Or(Not(guard), sx.disj_all(class_fms))))
                out = sx.conj_all(parts)
        fm_memo[key] = out
        return out

    return fm(s.basepoints, k)


# -- counting-guard normalization ----------------------------------------------------


def _guard_disjuncts(guard: FOFormula, var: str, signature: Signature) -> list[Rel]:
    if isinstance(guard, Acc):
        expanded = sx.expand_acc(guard, signature)
        return _guard_disjuncts(expanded, var, signature)
    if isinstance(guard, Or):
        return _guard_disjuncts(guard.left, var, signature) + _guard_disjuncts(
            guard.right, var, signature
        )
    if isinstance(guard, Rel) and sx.is_transition_guard(guard, var, signature):
        return [guard]
    raise ValueError(f"not a disjunction of transition guards for {var!r}: {guard!r}")


def normalize_counting(f: FOFormula, signature: Signature) -> FOFormula:
    """Rewrite counting quantifiers whose guard is a disjunction of transition
    atoms (or an ``Acc`` node) into Boolean combinations of single-guard
    counting quantifiers, avoiding double counting and preserving quantifier
    rank.  Other nodes are rebuilt with normalized subformulas."""
    memo: dict[int, FOFormula] = {}

    def split(count: int, var: str, guards: list[Rel], body: FOFormula) -> FOFormula:
        if count == 0:
            return sx.TRUE
        if len(guards) == 1:
            return CountExists(count, var, guards[0], body)
        init, last = guards[:-1], guards[-1]
        options: list[FOFormula] = []
        for first in range(count + 1):
            rest = count - first
            factors: list[FOFormula] = []
            if first > 0:
                factors.append(split(first, var, init, And(Not(last), body)))
            if rest > 0:
                factors.append(CountExists(rest, var, last, body))
            options.append(sx.conj_all(factors))
        return sx.disj_all(options)

    def walk(g: FOFormula) -> FOFormula:
        got = memo.get(id(g))
        if got is not None:
            return got
        if isinstance(g, (Rel, Eq, sx.Top, sx.Bottom, Acc)):
            out: FOFormula = g
        elif isinstance(g, Not):
            out = Not(walk(g.sub))
        elif isinstance(g, And):
            out = And(walk(g.left), walk(g.right))
        elif isinstance(g, Or):
            out = Or(walk(g.left), walk(g.right))
        elif isinstance(g, Forall):
            out = Forall(g.var, walk(g.body))
        elif isinstance(g, Exists):
            out = Exists(g.var, walk(g.body))
        elif isinstance(g, BoundedForall):
            out = BoundedForall(g.var, g.guard, walk(g.body))
        elif isinstance(g, BoundedExists):
            out = BoundedExists(g.var, g.guard, walk(g.body))
        elif isinstance(g, CountExists):
            body = walk(g.body)
            if isinstance(g.guard, Rel) and sx.is_transition_guard(
                g.guard, g.var, signature
            ):
                out = CountExists(g.count, g.var, g.guard, body)
            else:
                guards = _guard_disjuncts(g.guard, g.var, signature)
                out = split(g.count, g.var, guards, body)
        else:
            raise TypeError(f"not a first-order formula: {g!r}")
        memo[id(g)] = out
        return out

    return walk(f)

"""Evaluation of first-order and hybrid formulas over structures, the standard
translation from hybrid to first-order syntax, and Gaifman ball relativization.

Constants ``c_i`` denote the structure's basepoints.  Hybrid formulas are
evaluated by translating and evaluating the translation, which keeps the two
semantics definitionally aligned.
"""
from __future__ import annotations

from itertools import product
from typing import Mapping

from .errors import ScopeError
from .structures import Structure, Signature
from . import syntax as sx
from .syntax import (
    Acc,
    And,
    Atom,
    At,
    Bind,
    Bottom,
    BoundedExists,
    BoundedForall,
    Box,
    BoxInv,
    Conj,
    Const,
    CountExists,
    Dia,
    DiaInv,
    Disj,
    Eq,
    Exists,
    FOFormula,
    Forall,
    HybridFormula,
    Neg,
    Nom,
    Not,
    Or,
    Rel,
    Term,
    Top,
    Var,
    WVar,
)


def atom_relation(name: str) -> str:
    """Relation symbol for a propositional atom: ``p`` is interpreted by ``P``."""
    return name[:1].upper() + name[1:]


class _Evaluator:
    """Single-call evaluator with DAG-aware caching.

    Characteristic and Scott formulas share subformulas heavily; caching on
    (node identity, restriction of the environment to the node's free
    variables) keeps evaluation linear in the number of distinct
    subformula/environment pairs.
    """

    def __init__(self, s: Structure):
        self.s = s
        self._free: dict[int, frozenset[str]] = {}
        self._cache: dict[tuple[int, tuple], bool] = {}

    def term(self, t: Term, env: Mapping[str, str]) -> str:
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise ScopeError(f"unbound variable {t.name!r}") from None
        if isinstance(t, Const):
            if not 1 <= t.index <= len(self.s.basepoints):
                raise ScopeError(
                    f"constant c{t.index} out of range: structure has "
                    f"{len(self.s.basepoints)} basepoints"
                )
            return self.s.basepoints[t.index - 1]
        raise TypeError(f"not a term: {t!r}")

    def free(self, f: FOFormula) -> frozenset[str]:
        key = id(f)
        got = self._free.get(key)
        if got is None:
            got = sx.free_vars(f)
            self._free[key] = got
        return got

    def eval(self, f: FOFormula, env: Mapping[str, str]) -> bool:
        key = (id(f), tuple(sorted((v, env[v]) for v in self.free(f) if v in env)))
        got = self._cache.get(key)
        if got is None:
            got = self._eval(f, env)
            self._cache[key] = got
        return got

    def _eval(self, f: FOFormula, env: Mapping[str, str]) -> bool:
        s = self.s
        if isinstance(f, Rel):
            if f.name not in s.signature.relations:
                raise ScopeError(f"unknown relation symbol {f.name!r}")
            tup = tuple(self.term(t, env) for t in f.args)
            return s.has_tuple(f.name, tup)
        if isinstance(f, Eq):
            return self.term(f.left, env) == self.term(f.right, env)
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Acc):
            target = env.get(f.var)
            if target is None:
                raise ScopeError(f"unbound variable {f.var!r}")
            sources = [self.term(t, env) for t in f.sources]
            return any(
                (src, target) in set(s.relations[name])
                for name in s.signature.transitions
                for src in sources
            )
        if isinstance(f, Not):
            return not self.eval(f.sub, env)
        if isinstance(f, And):
            return self.eval(f.left, env) and self.eval(f.right, env)
        if isinstance(f, Or):
            return self.eval(f.left, env) or self.eval(f.right, env)
        if isinstance(f, Forall):
            return all(
                self.eval(f.body, {**env, f.var: e}) for e in s.universe
            )
        if isinstance(f, Exists):
            return any(
                self.eval(f.body, {**env, f.var: e}) for e in s.universe
            )
        if isinstance(f, BoundedForall):
            return all(
                self.eval(f.body, {**env, f.var: e})
                for e in s.universe
                if self.eval(f.guard, {**env, f.var: e})
            )
        if isinstance(f, BoundedExists):
            return any(
                self.eval(f.guard, {**env, f.var: e})
                and self.eval(f.body, {**env, f.var: e})
                for e in s.universe
            )
        if isinstance(f, CountExists):
            hits = 0
            for e in s.universe:
                inner = {**env, f.var: e}
                if self.eval(f.guard, inner) and self.eval(f.body, inner):
                    hits += 1
                    if hits >= f.count:
                        return True
            return False
        raise TypeError(f"not a first-order formula: {f!r}")


def eval_fo(
    f: FOFormula, s: Structure, env: Mapping[str, str] | None = None
) -> bool:
    """Tarskian evaluation; constants read from the basepoints.  Counting
    quantifiers hold when at least ``count`` distinct witnesses satisfy
    guard and body."""
    return _Evaluator(s).eval(f, dict(env or {}))


# -- standard translation --------------------------------------------------------


def standard_translation(
    f: HybridFormula, anchor: str | Term = "x", transition: str = "E"
) -> FOFormula:
    """Compositional translation into the bounded fragment, parameterised on
    the anchor (the world where the formula is evaluated).

    World variables bound by the binder are tracked in an environment mapping
    them to the anchor term current at binding time, which realizes the
    substitution clauses without textual substitution.  Fresh first-order
    variables are drawn deterministically from ``y, y1, y2, ...``.
    """
    anchor_term: Term = Var(anchor) if isinstance(anchor, str) else anchor
    used: set[str] = set()
    if isinstance(anchor_term, Var):
        used.add(anchor_term.name)

    def collect(g: HybridFormula):
        if isinstance(g, Bind):
            used.add(g.var)
            collect(g.sub)
        elif isinstance(g, (Neg, Box, Dia, BoxInv, DiaInv)):
            collect(g.sub)
        elif isinstance(g, (Conj, Disj)):
            collect(g.left)
            collect(g.right)
        elif isinstance(g, At):
            collect(g.sub)

    collect(f)

    def st(g: HybridFormula, a: Term, env: dict[str, Term]) -> FOFormula:
        if isinstance(g, Atom):
            return Rel(atom_relation(g.name), (a,))
        if isinstance(g, WVar):
            if g.name not in env:
                raise ScopeError(f"unbound world variable {g.name!r}")
            return Eq(a, env[g.name])
        if isinstance(g, Nom):
            return Eq(a, Const(g.index))
        if isinstance(g, Neg):
            return Not(st(g.sub, a, env))
        if isinstance(g, Conj):
            return And(st(g.left, a, env), st(g.right, a, env))
        if isinstance(g, Disj):
            return Or(st(g.left, a, env), st(g.right, a, env))
        if isinstance(g, (Box, Dia, BoxInv, DiaInv)):
            y = sx.fresh_var(used)
            used.add(y)
            forward = isinstance(g, (Box, Dia))
            guard = Rel(transition, (a, Var(y)) if forward else (Var(y), a))
            body = st(g.sub, Var(y), env)
            if isinstance(g, (Dia, DiaInv)):
                return BoundedExists(y, guard, body)
            return BoundedForall(y, guard, body)
        if isinstance(g, Bind):
            return st(g.sub, a, {**env, g.var: a})
        if isinstance(g, At):
            if isinstance(g.anchor, WVar):
                if g.anchor.name not in env:
                    raise ScopeError(f"unbound world variable {g.anchor.name!r}")
                return st(g.sub, env[g.anchor.name], env)
            if isinstance(g.anchor, Nom):
                return st(g.sub, Const(g.anchor.index), env)
            raise TypeError(f"@ anchor must be a world variable or nominal: {g.anchor!r}")
        raise TypeError(f"not a hybrid formula: {g!r}")

    return st(f, anchor_term, {})


def eval_hybrid(f: HybridFormula, s: Structure) -> bool:
    """Truth at the first basepoint, via the standard translation."""
    if s.signature.num_basepoints < 1:
        raise ValueError("hybrid evaluation needs at least one basepoint")
    if len(s.signature.transitions) != 1:
        raise ValueError("hybrid evaluation requires a single transition relation")
    (transition,) = s.signature.transitions
    translated = standard_translation(f, "x", transition)
    return eval_fo(translated, s, {"x": s.basepoints[0]})


# -- Gaifman relativization --------------------------------------------------------


def adjacency_formula(u: Term, v: Term, signature: Signature, used: set[str]) -> FOFormula:
    """First-order definition of Gaifman adjacency of two distinct elements:
    they co-occur in some tuple of some relation."""
    parts: list[FOFormula] = []
    for name in sorted(signature.relations):
        arity = signature.relations[name]
        if arity < 2:
            continue
        for i, j in product(range(arity), repeat=2):
            if i == j:
                continue
            fresh: list[str] = []
            args: list[Term] = []
            for p in range(arity):
                if p == i:
                    args.append(u)
                elif p == j:
                    args.append(v)
                else:
                    z = sx.fresh_var(used | set(fresh), "z")
                    fresh.append(z)
                    args.append(Var(z))
            atom: FOFormula = Rel(name, tuple(args))
            for z in reversed(fresh):
                atom = Exists(z, atom)
            parts.append(atom)
    return And(Not(Eq(u, v)), sx.disj_all(parts))


def distance_at_most(
    anchors: tuple[Term, ...], var: str, k: int, signature: Signature
) -> FOFormula:
    """Formula expressing that ``var`` lies within Gaifman distance ``k`` of
    some anchor."""
    used = {var} | {t.name for t in anchors if isinstance(t, Var)}
    at_zero = sx.disj_all([Eq(Var(var), a) for a in anchors])
    fm = at_zero
    for _ in range(k):
        z = sx.fresh_var(used, "z")
        used.add(z)
        prev = _rename_free_var(fm, var, z)
        step = Exists(z, And(prev, adjacency_formula(Var(z), Var(var), signature, used)))
        fm = Or(at_zero, step)
    return fm


def _rename_free_var(f: FOFormula, old: str, new: str) -> FOFormula:
    """Rename a free variable; quantifiers in generated distance formulas
    never capture because fresh names are drawn from a shared pool."""

    def rt(t: Term) -> Term:
        return Var(new) if t == Var(old) else t

    if isinstance(f, Rel):
        return Rel(f.name, tuple(rt(t) for t in f.args))
    if isinstance(f, Eq):
        return Eq(rt(f.left), rt(f.right))
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Acc):
        return Acc(tuple(rt(t) for t in f.sources), new if f.var == old else f.var)
    if isinstance(f, Not):
        return Not(_rename_free_var(f.sub, old, new))
    if isinstance(f, And):
        return And(_rename_free_var(f.left, old, new), _rename_free_var(f.right, old, new))
    if isinstance(f, Or):
        return Or(_rename_free_var(f.left, old, new), _rename_free_var(f.right, old, new))
    if isinstance(f, (Forall, Exists)):
        if f.var == old:
            return f
        ctor = type(f)
        return ctor(f.var, _rename_free_var(f.body, old, new))
    if isinstance(f, (BoundedForall, BoundedExists)):
        if f.var == old:
            return f
        ctor = type(f)
        return ctor(f.var, _rename_free_var(f.guard, old, new), _rename_free_var(f.body, old, new))
    if isinstance(f, CountExists):
        if f.var == old:
            return f
        return CountExists(
            f.count, f.var, _rename_free_var(f.guard, old, new), _rename_free_var(f.body, old, new)
        )
    raise TypeError(f"not a first-order formula: {f!r}")


def gaifman_relativize(
    f: FOFormula,
    k: int,
    signature: Signature,
    anchors: tuple[Term, ...] | None = None,
) -> FOFormula:
    """Relativize every quantifier of ``f`` to the Gaifman k-ball around the
    anchors (the constants ``c1..cm`` by default).  The anchors stay fixed
    through the recursion, so the result holds in a structure exactly when
    ``f`` holds in its ball part."""
    if anchors is None:
        anchors = tuple(Const(i) for i in range(1, signature.num_basepoints + 1))
    dist_cache: dict[str, FOFormula] = {}

    def dist(var: str) -> FOFormula:
        got = dist_cache.get(var)
        if got is None:
            got = distance_at_most(anchors, var, k, signature)
            dist_cache[var] = got
        return got

    def rel(g: FOFormula) -> FOFormula:
        if isinstance(g, (Rel, Eq, Top, Bottom, Acc)):
            return g
        if isinstance(g, Not):
            return Not(rel(g.sub))
        if isinstance(g, And):
            return And(rel(g.left), rel(g.right))
        if isinstance(g, Or):
            return Or(rel(g.left), rel(g.right))
        if isinstance(g, Forall):
            return Forall(g.var, Or(Not(dist(g.var)), rel(g.body)))
        if isinstance(g, Exists):
            return Exists(g.var, And(dist(g.var), rel(g.body)))
        if isinstance(g, BoundedForall):
            return Forall(g.var, Or(Not(dist(g.var)), Or(Not(g.guard), rel(g.body))))
        if isinstance(g, BoundedExists):
            return Exists(g.var, And(dist(g.var), And(g.guard, rel(g.body))))
        if isinstance(g, CountExists):
            return CountExists(g.count, g.var, g.guard, And(dist(g.var), rel(g.body)))
        raise TypeError(f"not a first-order formula: {g!r}")

    return rel(f)

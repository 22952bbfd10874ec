"""Formula ASTs for the two languages: hybrid modal logic and first-order logic
with bounded and counting quantifiers.

All nodes are frozen dataclasses, so formulas are hashable and equality is
syntactic.  The first-order language has terms (variables and the constants
``c1..cm`` read off the basepoints), guarded quantifier nodes whose guard is a
single transition atom, and a dedicated one-step accessibility guard ``Acc``
that abbreviates the disjunction of all transition atoms from a tuple of
sources.
"""
from __future__ import annotations

from dataclasses import dataclass

from .structures import Signature

# -- hybrid logic --------------------------------------------------------------


class HybridFormula:
    __slots__ = ()


@dataclass(frozen=True)
class Atom(HybridFormula):
    name: str


@dataclass(frozen=True)
class WVar(HybridFormula):
    name: str


@dataclass(frozen=True)
class Nom(HybridFormula):
    index: int  # nominal c_i, 1-based


@dataclass(frozen=True)
class Neg(HybridFormula):
    sub: HybridFormula


@dataclass(frozen=True)
class Conj(HybridFormula):
    left: HybridFormula
    right: HybridFormula


@dataclass(frozen=True)
class Disj(HybridFormula):
    left: HybridFormula
    right: HybridFormula


@dataclass(frozen=True)
class Box(HybridFormula):
    sub: HybridFormula


@dataclass(frozen=True)
class Dia(HybridFormula):
    sub: HybridFormula


@dataclass(frozen=True)
class BoxInv(HybridFormula):
    sub: HybridFormula


@dataclass(frozen=True)
class DiaInv(HybridFormula):
    sub: HybridFormula


@dataclass(frozen=True)
class Bind(HybridFormula):
    var: str
    sub: HybridFormula


@dataclass(frozen=True)
class At(HybridFormula):
    anchor: HybridFormula  # WVar or Nom
    sub: HybridFormula


def free_world_vars(f: HybridFormula) -> frozenset[str]:
    if isinstance(f, (Atom, Nom)):
        return frozenset()
    if isinstance(f, WVar):
        return frozenset({f.name})
    if isinstance(f, (Neg, Box, Dia, BoxInv, DiaInv)):
        return free_world_vars(f.sub)
    if isinstance(f, (Conj, Disj)):
        return free_world_vars(f.left) | free_world_vars(f.right)
    if isinstance(f, Bind):
        return free_world_vars(f.sub) - {f.var}
    if isinstance(f, At):
        return free_world_vars(f.anchor) | free_world_vars(f.sub)
    raise TypeError(f"not a hybrid formula: {f!r}")


def max_nominal(f: HybridFormula) -> int:
    """Largest nominal index used, 0 if none."""
    if isinstance(f, Nom):
        return f.index
    if isinstance(f, (Atom, WVar)):
        return 0
    if isinstance(f, (Neg, Box, Dia, BoxInv, DiaInv, Bind)):
        return max_nominal(f.sub)
    if isinstance(f, (Conj, Disj)):
        return max(max_nominal(f.left), max_nominal(f.right))
    if isinstance(f, At):
        return max(max_nominal(f.anchor), max_nominal(f.sub))
    raise TypeError(f"not a hybrid formula: {f!r}")


def hybrid_depth(f: HybridFormula) -> int:
    """Modal depth, with the adjustment that a diamond applied directly to a
    world variable has depth zero (it only tests an edge between worlds
    already reached)."""
    if isinstance(f, (Atom, WVar, Nom)):
        return 0
    if isinstance(f, Neg):
        return hybrid_depth(f.sub)
    if isinstance(f, (Conj, Disj)):
        return max(hybrid_depth(f.left), hybrid_depth(f.right))
    if isinstance(f, Dia) and isinstance(f.sub, WVar):
        return 0
    if isinstance(f, (Box, Dia, BoxInv, DiaInv)):
        return 1 + hybrid_depth(f.sub)
    if isinstance(f, Bind):
        return hybrid_depth(f.sub)
    if isinstance(f, At):
        return hybrid_depth(f.sub)
    raise TypeError(f"not a hybrid formula: {f!r}")


# -- first-order logic ----------------------------------------------------------


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    index: int  # constant c_i, 1-based; denotes basepoint i


class FOFormula:
    __slots__ = ()


@dataclass(frozen=True)
class Rel(FOFormula):
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Eq(FOFormula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Top(FOFormula):
    pass


@dataclass(frozen=True)
class Bottom(FOFormula):
    pass


@dataclass(frozen=True)
class Not(FOFormula):
    sub: FOFormula


@dataclass(frozen=True)
class And(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class Or(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class Forall(FOFormula):
    var: str
    body: FOFormula


@dataclass(frozen=True)
class Exists(FOFormula):
    var: str
    body: FOFormula


@dataclass(frozen=True)
class BoundedForall(FOFormula):
    var: str
    guard: FOFormula  # transition atom mentioning var exactly once
    body: FOFormula


@dataclass(frozen=True)
class BoundedExists(FOFormula):
    var: str
    guard: FOFormula
    body: FOFormula


@dataclass(frozen=True)
class CountExists(FOFormula):
    count: int  # at least `count` witnesses, count >= 1
    var: str
    guard: FOFormula
    body: FOFormula


@dataclass(frozen=True)
class Acc(FOFormula):
    """One-step accessibility of ``var`` from ``sources`` through any
    transition relation; abbreviates a disjunction of transition atoms."""

    sources: tuple[Term, ...]
    var: str


TRUE = Top()
FALSE = Bottom()

_QUANTIFIERS = (Forall, Exists, BoundedForall, BoundedExists, CountExists)


def term_vars(t: Term) -> frozenset[str]:
    return frozenset({t.name}) if isinstance(t, Var) else frozenset()


def free_vars(f: FOFormula) -> frozenset[str]:
    if isinstance(f, Rel):
        out: frozenset[str] = frozenset()
        for t in f.args:
            out |= term_vars(t)
        return out
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, (Top, Bottom)):
        return frozenset()
    if isinstance(f, Not):
        return free_vars(f.sub)
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, (BoundedForall, BoundedExists, CountExists)):
        return (free_vars(f.guard) | free_vars(f.body)) - {f.var}
    if isinstance(f, Acc):
        out = frozenset({f.var})
        for t in f.sources:
            out |= term_vars(t)
        return out
    raise TypeError(f"not a first-order formula: {f!r}")


def max_constant(f: FOFormula) -> int:
    """Largest constant index used, 0 if none."""

    def of_term(t: Term) -> int:
        return t.index if isinstance(t, Const) else 0

    if isinstance(f, Rel):
        return max((of_term(t) for t in f.args), default=0)
    if isinstance(f, Eq):
        return max(of_term(f.left), of_term(f.right))
    if isinstance(f, (Top, Bottom)):
        return 0
    if isinstance(f, Not):
        return max_constant(f.sub)
    if isinstance(f, (And, Or)):
        return max(max_constant(f.left), max_constant(f.right))
    if isinstance(f, (Forall, Exists)):
        return max_constant(f.body)
    if isinstance(f, (BoundedForall, BoundedExists, CountExists)):
        return max(max_constant(f.guard), max_constant(f.body))
    if isinstance(f, Acc):
        return max((of_term(t) for t in f.sources), default=0)
    raise TypeError(f"not a first-order formula: {f!r}")


def quantifier_rank(f: FOFormula) -> int:
    """Standard quantifier rank; bounded and counting quantifiers count one each."""
    if isinstance(f, (Rel, Eq, Top, Bottom, Acc)):
        return 0
    if isinstance(f, Not):
        return quantifier_rank(f.sub)
    if isinstance(f, (And, Or)):
        return max(quantifier_rank(f.left), quantifier_rank(f.right))
    if isinstance(f, (Forall, Exists)):
        return 1 + quantifier_rank(f.body)
    if isinstance(f, (BoundedForall, BoundedExists, CountExists)):
        return 1 + max(quantifier_rank(f.guard), quantifier_rank(f.body))
    raise TypeError(f"not a first-order formula: {f!r}")


def is_transition_guard(guard: FOFormula, var: str, signature: Signature) -> bool:
    """A single transition atom mentioning ``var`` in exactly one argument
    position, the other term distinct from ``var``.  Both the forward form
    E(t, x) and the backward form E(x, t) qualify."""
    if not isinstance(guard, Rel) or len(guard.args) != 2:
        return False
    if guard.name not in signature.transitions:
        return False
    left, right = guard.args
    left_is_var = left == Var(var)
    right_is_var = right == Var(var)
    return left_is_var != right_is_var


def is_bounded(f: FOFormula, signature: Signature) -> bool:
    """True iff every quantifier is guarded by a transition atom over a
    transition symbol of the signature, with the bound variable distinct
    from the source term."""
    if isinstance(f, (Rel, Eq, Top, Bottom, Acc)):
        return True
    if isinstance(f, Not):
        return is_bounded(f.sub, signature)
    if isinstance(f, (And, Or)):
        return is_bounded(f.left, signature) and is_bounded(f.right, signature)
    if isinstance(f, (Forall, Exists)):
        return False
    if isinstance(f, (BoundedForall, BoundedExists, CountExists)):
        return is_transition_guard(f.guard, f.var, signature) and is_bounded(
            f.body, signature
        )
    raise TypeError(f"not a first-order formula: {f!r}")


def conj_all(parts: list[FOFormula]) -> FOFormula:
    """Right-nested conjunction; TRUE when empty."""
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj_all(parts: list[FOFormula]) -> FOFormula:
    """Right-nested disjunction; FALSE when empty."""
    if not parts:
        return FALSE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def exact_count(count: int, var: str, guard: FOFormula, body: FOFormula) -> FOFormula:
    """Exactly ``count`` witnesses: at least ``count`` and not at least ``count+1``.

    ``count`` may be 0, expressing that no witness exists.
    """
    at_least_next = CountExists(count + 1, var, guard, body)
    if count == 0:
        return Not(at_least_next)
    return And(CountExists(count, var, guard, body), Not(at_least_next))


def expand_acc(acc: Acc, signature: Signature) -> FOFormula:
    """The disjunction of transition atoms the ``Acc`` node abbreviates."""
    parts = [
        Rel(name, (src, Var(acc.var)))
        for name in sorted(signature.transitions)
        for src in acc.sources
    ]
    return disj_all(parts)


def fresh_var(used: set[str], base: str = "y") -> str:
    if base not in used:
        return base
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"

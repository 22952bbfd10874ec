"""Concrete syntax for both formula languages.

Hybrid:   ``p``, ``x``, ``c1``, ``!f``, ``f & g``, ``f | g``, ``box f``,
          ``dia f``, ``boxinv f``, ``diainv f``, ``down x. f``, ``@x f``, ``@c1 f``.

First-order: ``R(t1,..,tn)``, ``t = u``, ``true``, ``false``, ``!``, ``&``, ``|``,
          ``->`` (sugar for ``!a | b``), ``forall y (E(t,y) -> f)``,
          ``exists y (E(t,y) & f)``, ``exists>=3 y (E(t,y) & f)``, and the
          accessibility guard ``acc(t1,..,tn; y)``.

Identifier classification: ``c``+digits is a nominal/constant; a single letter
from ``x y z u v w`` (optionally digit-suffixed) is a world/first-order
variable in hybrid syntax; anything else is a propositional atom.  In
first-order syntax every non-constant identifier is a variable.  Quantifiers
whose body starts with a transition-atom guard over the bound variable are
classified as bounded quantifier nodes; the printer reverses this, so ASTs
round-trip.
"""
from __future__ import annotations

import re

from .errors import ParseError, ScopeError
from . import syntax as sx

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>[0-9]+)"
    r"|(?P<op>->|>=|[().,;=&|!@]))"
)

_HYBRID_KEYWORDS = {"box", "dia", "boxinv", "diainv", "down"}
_FO_KEYWORDS = {"forall", "exists", "true", "false", "acc"}

_WORLD_VAR_RE = re.compile(r"^[xyzuvw][0-9]*$")
_NOMINAL_RE = re.compile(r"^c([0-9]+)$")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            break
        if m.group("id"):
            tokens.append(("id", m.group("id"), m.start("id")))
        elif m.group("num"):
            tokens.append(("num", m.group("num"), m.start("num")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, value: str | None = None):
        tok = self.next()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2])

    def at_op(self, op: str) -> bool:
        tok = self.peek()
        return tok[0] == "op" and tok[1] == op

    def eat_op(self, op: str) -> bool:
        if self.at_op(op):
            self.i += 1
            return True
        return False

    def done(self):
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])


# -- hybrid --------------------------------------------------------------------


class _HybridParser(_Parser):
    def formula(self) -> sx.HybridFormula:
        f = self.or_expr()
        self.done()
        return f

    def or_expr(self) -> sx.HybridFormula:
        f = self.and_expr()
        while self.eat_op("|"):
            f = sx.Disj(f, self.and_expr())
        return f

    def and_expr(self) -> sx.HybridFormula:
        f = self.unary()
        while self.eat_op("&"):
            f = sx.Conj(f, self.unary())
        return f

    def unary(self) -> sx.HybridFormula:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "!":
            self.next()
            return sx.Neg(self.unary())
        if tok[0] == "op" and tok[1] == "@":
            self.next()
            anchor = self.name_ref()
            return sx.At(anchor, self.unary())
        if tok[0] == "id" and tok[1] in ("box", "dia", "boxinv", "diainv"):
            self.next()
            ctor = {"box": sx.Box, "dia": sx.Dia, "boxinv": sx.BoxInv, "diainv": sx.DiaInv}[tok[1]]
            return ctor(self.unary())
        if tok[0] == "id" and tok[1] == "down":
            self.next()
            var_tok = self.next()
            if var_tok[0] != "id" or not _WORLD_VAR_RE.match(var_tok[1]):
                raise ParseError(f"expected a world variable after 'down', found {var_tok[1]!r}", var_tok[2])
            self.expect("op", ".")
            return sx.Bind(var_tok[1], self.or_expr())
        return self.primary()

    def name_ref(self) -> sx.HybridFormula:
        tok = self.next()
        if tok[0] != "id":
            raise ParseError(f"expected a world variable or nominal, found {tok[1]!r}", tok[2])
        m = _NOMINAL_RE.match(tok[1])
        if m:
            return sx.Nom(int(m.group(1)))
        if _WORLD_VAR_RE.match(tok[1]):
            return sx.WVar(tok[1])
        raise ParseError(f"{tok[1]!r} is neither a world variable nor a nominal", tok[2])

    def primary(self) -> sx.HybridFormula:
        tok = self.next()
        if tok[0] == "op" and tok[1] == "(":
            f = self.or_expr()
            self.expect("op", ")")
            return f
        if tok[0] == "id":
            if tok[1] in _HYBRID_KEYWORDS:
                raise ParseError(f"unexpected keyword {tok[1]!r}", tok[2])
            m = _NOMINAL_RE.match(tok[1])
            if m:
                return sx.Nom(int(m.group(1)))
            if _WORLD_VAR_RE.match(tok[1]):
                return sx.WVar(tok[1])
            return sx.Atom(tok[1])
        raise ParseError(f"expected a formula, found {tok[1] or 'end of input'!r}", tok[2])


def parse_hybrid(
    text: str, closed: bool = True, num_nominals: int | None = None
) -> sx.HybridFormula:
    """Parse a hybrid formula.  With ``closed`` (the default), unbound world
    variables are a scope error; ``num_nominals`` bounds the nominal indices."""
    f = _HybridParser(text).formula()
    if closed:
        free = free_world_vars_sorted(f)
        if free:
            raise ScopeError(f"unbound world variable {free[0]!r} in a closed formula")
    if num_nominals is not None:
        top = sx.max_nominal(f)
        if top > num_nominals:
            raise ScopeError(
                f"nominal c{top} out of range: structure has {num_nominals} basepoints"
            )
    return f


def free_world_vars_sorted(f: sx.HybridFormula) -> list[str]:
    return sorted(sx.free_world_vars(f))


# -- first-order ------------------------------------------------------------------


def _term_of(name: str) -> sx.Term:
    m = _NOMINAL_RE.match(name)
    if m:
        return sx.Const(int(m.group(1)))
    return sx.Var(name)


def _guard_shape(guard: sx.FOFormula, var: str) -> bool:
    # Syntactic guard test; transition membership is checked by is_bounded.
    if not isinstance(guard, sx.Rel) or len(guard.args) != 2:
        return False
    v = sx.Var(var)
    return (guard.args[0] == v) != (guard.args[1] == v)


class _FOParser(_Parser):
    def formula(self) -> sx.FOFormula:
        f = self.impl_expr()
        self.done()
        return f

    def impl_expr(self) -> sx.FOFormula:
        f = self.or_expr()
        if self.eat_op("->"):
            return sx.Or(sx.Not(f), self.impl_expr())
        return f

    def or_expr(self) -> sx.FOFormula:
        f = self.and_expr()
        while self.eat_op("|"):
            f = sx.Or(f, self.and_expr())
        return f

    def and_expr(self) -> sx.FOFormula:
        f = self.unary()
        while self.eat_op("&"):
            f = sx.And(f, self.unary())
        return f

    def unary(self) -> sx.FOFormula:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "!":
            self.next()
            return sx.Not(self.unary())
        if tok[0] == "id" and tok[1] in ("forall", "exists"):
            return self.quantifier()
        return self.primary()

    def quantifier(self) -> sx.FOFormula:
        kw = self.next()
        count = None
        if kw[1] == "exists" and self.eat_op(">="):
            num = self.next()
            if num[0] != "num":
                raise ParseError(f"expected a count after '>=', found {num[1]!r}", num[2])
            count = int(num[1])
            if count < 1:
                raise ParseError("counting threshold must be at least 1", num[2])
        var_tok = self.next()
        if var_tok[0] != "id" or _NOMINAL_RE.match(var_tok[1]):
            raise ParseError(f"expected a variable, found {var_tok[1]!r}", var_tok[2])
        var = var_tok[1]
        body = self.unary()
        if count is not None:
            if isinstance(body, sx.And) and _guard_shape(body.left, var):
                return sx.CountExists(count, var, body.left, body.right)
            raise ParseError(
                "counting quantifier requires a guarded body of the form (E(t,y) & f)",
                var_tok[2],
            )
        if kw[1] == "exists":
            if isinstance(body, sx.And) and _guard_shape(body.left, var):
                return sx.BoundedExists(var, body.left, body.right)
            return sx.Exists(var, body)
        if (
            isinstance(body, sx.Or)
            and isinstance(body.left, sx.Not)
            and _guard_shape(body.left.sub, var)
        ):
            return sx.BoundedForall(var, body.left.sub, body.right)
        return sx.Forall(var, body)

    def primary(self) -> sx.FOFormula:
        tok = self.next()
        if tok[0] == "op" and tok[1] == "(":
            f = self.impl_expr()
            self.expect("op", ")")
            return f
        if tok[0] == "id" and tok[1] == "true":
            return sx.TRUE
        if tok[0] == "id" and tok[1] == "false":
            return sx.FALSE
        if tok[0] == "id" and tok[1] == "acc":
            self.expect("op", "(")
            sources = [self.term()]
            while self.eat_op(","):
                sources.append(self.term())
            self.expect("op", ";")
            var_tok = self.next()
            if var_tok[0] != "id" or _NOMINAL_RE.match(var_tok[1]):
                raise ParseError(f"expected a variable, found {var_tok[1]!r}", var_tok[2])
            self.expect("op", ")")
            return sx.Acc(tuple(sources), var_tok[1])
        if tok[0] == "id":
            if tok[1] in _FO_KEYWORDS:
                raise ParseError(f"unexpected keyword {tok[1]!r}", tok[2])
            if self.at_op("("):
                self.next()
                args = [self.term()]
                while self.eat_op(","):
                    args.append(self.term())
                self.expect("op", ")")
                return sx.Rel(tok[1], tuple(args))
            left = _term_of(tok[1])
            self.expect("op", "=")
            return sx.Eq(left, self.term())
        raise ParseError(f"expected a formula, found {tok[1] or 'end of input'!r}", tok[2])

    def term(self) -> sx.Term:
        tok = self.next()
        if tok[0] != "id" or tok[1] in _FO_KEYWORDS:
            raise ParseError(f"expected a term, found {tok[1] or 'end of input'!r}", tok[2])
        return _term_of(tok[1])


def parse_fo(text: str) -> sx.FOFormula:
    return _FOParser(text).formula()


# -- printers ----------------------------------------------------------------------

# gaps leave room for the +1 "right operand" levels without colliding with
# the unary level, where equality atoms need wrapping
_PREC_OR = 10
_PREC_AND = 20
_PREC_UNARY = 30


def print_hybrid(f: sx.HybridFormula) -> str:
    return _ph(f, 0)


def _ph(f: sx.HybridFormula, prec: int) -> str:
    if isinstance(f, sx.Atom):
        return f.name
    if isinstance(f, sx.WVar):
        return f.name
    if isinstance(f, sx.Nom):
        return f"c{f.index}"
    if isinstance(f, sx.Neg):
        return f"!{_ph(f.sub, _PREC_UNARY)}"
    if isinstance(f, sx.Conj):
        # the right operand is printed one level tighter so that nesting
        # direction survives the left-associative reparse
        body = f"{_ph(f.left, _PREC_AND)} & {_ph(f.right, _PREC_AND + 1)}"
        return f"({body})" if prec > _PREC_AND else body
    if isinstance(f, sx.Disj):
        body = f"{_ph(f.left, _PREC_OR)} | {_ph(f.right, _PREC_OR + 1)}"
        return f"({body})" if prec > _PREC_OR else body
    if isinstance(f, sx.Box):
        return f"box {_ph(f.sub, _PREC_UNARY)}"
    if isinstance(f, sx.Dia):
        return f"dia {_ph(f.sub, _PREC_UNARY)}"
    if isinstance(f, sx.BoxInv):
        return f"boxinv {_ph(f.sub, _PREC_UNARY)}"
    if isinstance(f, sx.DiaInv):
        return f"diainv {_ph(f.sub, _PREC_UNARY)}"
    if isinstance(f, sx.Bind):
        body = f"down {f.var}. {_ph(f.sub, 0)}"
        return f"({body})" if prec > 0 else body
    if isinstance(f, sx.At):
        return f"@{_ph(f.anchor, _PREC_UNARY)} {_ph(f.sub, _PREC_UNARY)}"
    raise TypeError(f"not a hybrid formula: {f!r}")


def print_term(t: sx.Term) -> str:
    if isinstance(t, sx.Var):
        return t.name
    if isinstance(t, sx.Const):
        return f"c{t.index}"
    raise TypeError(f"not a term: {t!r}")


def print_fo(f: sx.FOFormula) -> str:
    return _pf(f, 0)


def _pf(f: sx.FOFormula, prec: int) -> str:
    if isinstance(f, sx.Rel):
        return f"{f.name}({','.join(print_term(t) for t in f.args)})"
    if isinstance(f, sx.Eq):
        body = f"{print_term(f.left)} = {print_term(f.right)}"
        return f"({body})" if prec >= _PREC_UNARY else body
    if isinstance(f, sx.Top):
        return "true"
    if isinstance(f, sx.Bottom):
        return "false"
    if isinstance(f, sx.Acc):
        return f"acc({','.join(print_term(t) for t in f.sources)}; {f.var})"
    if isinstance(f, sx.Not):
        return f"!{_pf(f.sub, _PREC_UNARY)}"
    if isinstance(f, sx.And):
        # right operands print one level tighter so nesting direction
        # survives the left-associative reparse; guarded-quantifier bodies
        # likewise, so the guard classification sees the same split
        body = f"{_pf(f.left, _PREC_AND)} & {_pf(f.right, _PREC_AND + 1)}"
        return f"({body})" if prec > _PREC_AND else body
    if isinstance(f, sx.Or):
        body = f"{_pf(f.left, _PREC_OR)} | {_pf(f.right, _PREC_OR + 1)}"
        return f"({body})" if prec > _PREC_OR else body
    if isinstance(f, sx.Forall):
        return f"forall {f.var} ({_pf(f.body, 0)})"
    if isinstance(f, sx.Exists):
        return f"exists {f.var} ({_pf(f.body, 0)})"
    if isinstance(f, sx.BoundedForall):
        return f"forall {f.var} ({_pf(f.guard, _PREC_OR)} -> {_pf(f.body, _PREC_OR + 1)})"
    if isinstance(f, sx.BoundedExists):
        return f"exists {f.var} ({_pf(f.guard, _PREC_AND)} & {_pf(f.body, _PREC_AND + 1)})"
    if isinstance(f, sx.CountExists):
        return (
            f"exists>={f.count} {f.var} "
            f"({_pf(f.guard, _PREC_AND)} & {_pf(f.body, _PREC_AND + 1)})"
        )
    raise TypeError(f"not a first-order formula: {f!r}")

"""Parsers for series literals, map expressions and polynomial specs.

Series grammar (whitespace-insensitive, ASCII only)::

    series := ['-'] term (('+'|'-') term)* ['+' 'O(' 't^' exp ')'] | 'O(' 't^' exp ')'
    term   := rat ['*' 't^' exp] | 't^' exp | 't'
    exp    := int | '(' int '/' posint ')'
    rat    := int ['/' posint]

Map grammar: usual precedence (^ above unary minus above * and / above + and -),
parentheses, a declared variable list, exponents only as integers or
parenthesized integer fractions, and top-level tuples ``(e1, e2, ...)`` for
vector maps.

Every rejection is a ParseError carrying the byte span of the offending
token; arbitrary input never escapes as anything else.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import (
    DuplicateExponent,
    NonRationalExponent,
    ParseError,
    UnknownVariable,
)
from .mapexpr import (
    Add,
    Const,
    Div,
    Expr,
    MapExpr,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    render_expr,
    render_map,
)
from .newton import PolyOverSeries
from .puiseux import PuiseuxSeries, render_series


class _Scanner:
    """Byte-position tokenizer shared by both grammars."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def error(self, expected: str, span_from: Optional[int] = None) -> ParseError:
        self.skip_ws()
        start = self.pos if span_from is None else span_from
        end = min(len(self.text), max(start + 1, self.pos))
        found = self.text[start:end] if start < len(self.text) else "end of input"
        return ParseError(start, end, expected, repr(found), self.text)

    def take(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str):
        if not self.take(literal):
            raise self.error(f"{literal!r}")

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            self.pos = start
            raise self.error("an integer")
        return int(self.text[start : self.pos])

    def ident(self) -> Optional[str]:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalpha() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        return self.text[start : self.pos] or None


def _exp_value(sc: _Scanner) -> Fraction:
    """exp := int | '(' int '/' posint ')'"""
    if sc.take("("):
        num = sc.integer()
        sc.expect("/")
        start = sc.pos
        den = sc.integer()
        if den <= 0:
            raise ParseError(start, sc.pos, "a positive denominator", str(den), sc.text)
        sc.expect(")")
        return Fraction(num, den)
    return Fraction(sc.integer())


# -- series literals -------------------------------------------------------------


def parse_series(text: str) -> PuiseuxSeries:
    """Parse the canonical series grammar into a truncated series."""
    sc = _Scanner(text)
    terms: List[Tuple[Fraction, Fraction]] = []
    seen = {}
    trunc = None
    sign = -1 if sc.take("-") else 1
    first = True
    while True:
        if sc.peek() == "O":
            trunc = _parse_o_marker(sc)
            break
        start = sc.pos
        exp, coeff = _parse_term(sc)
        if exp in seen:
            raise DuplicateExponent(
                start, sc.pos, "a fresh exponent", f"t^{exp} repeated", text
            )
        seen[exp] = True
        terms.append((exp, sign * coeff))
        first = False
        if sc.take("+"):
            sign = 1
        elif sc.take("-"):
            sign = -1
        else:
            break
    if first and trunc is None:
        raise sc.error("a series term")
    if not sc.at_end():
        raise sc.error("end of series")
    return PuiseuxSeries(terms, trunc=trunc)


def _parse_o_marker(sc: _Scanner) -> Fraction:
    sc.expect("O")
    sc.expect("(")
    sc.expect("t")
    sc.expect("^")
    e = _exp_value(sc)
    sc.expect(")")
    return e


def _parse_term(sc: _Scanner) -> Tuple[Fraction, Fraction]:
    """term := rat ['*' 't^' exp] | 't^' exp | 't'"""
    sc.skip_ws()
    ch = sc.peek()
    if ch == "t":
        sc.expect("t")
        if sc.take("^"):
            return _exp_value(sc), Fraction(1)
        return Fraction(1), Fraction(1)
    if not (ch.isdigit() or ch in "+-"):
        raise sc.error("a coefficient or 't'")
    num = sc.integer()
    coeff = Fraction(num)
    if sc.take("/"):
        start = sc.pos
        den = sc.integer()
        if den <= 0:
            raise ParseError(start, sc.pos, "a positive denominator", str(den), sc.text)
        coeff = Fraction(num, den)
    save = sc.pos
    if sc.take("*"):
        if sc.peek() == "t":
            sc.expect("t")
            if sc.take("^"):
                return _exp_value(sc), coeff
            return Fraction(1), coeff
        sc.pos = save  # the '*' belongs to an enclosing grammar (e.g. 2*X)
    return Fraction(0), coeff


# -- map expressions --------------------------------------------------------------


def parse_map(text: str, var_names=("x", "y")) -> MapExpr:
    """Parse a scalar expression or a top-level tuple into a MapExpr."""
    sc = _Scanner(text)
    exprs = _parse_tuple_or_expr(sc, tuple(var_names))
    if not sc.at_end():
        raise sc.error("end of expression")
    return MapExpr(tuple(exprs), tuple(var_names))


def _parse_tuple_or_expr(sc: _Scanner, names) -> List[Expr]:
    # a leading '(' opens a tuple only if a depth-one comma follows
    save = sc.pos
    if sc.take("("):
        first = _parse_sum(sc, names)
        if sc.take(","):
            exprs = [first]
            while True:
                exprs.append(_parse_sum(sc, names))
                if sc.take(","):
                    continue
                sc.expect(")")
                return exprs
        sc.expect(")")
        # plain parenthesized scalar: keep parsing operators after it
        sc.pos = save
    return [_parse_sum(sc, names)]


def _parse_sum(sc: _Scanner, names) -> Expr:
    left = _parse_product(sc, names)
    while True:
        if sc.take("+"):
            left = Add(left, _parse_product(sc, names))
        elif sc.take("-"):
            left = Sub(left, _parse_product(sc, names))
        else:
            return left


def _parse_product(sc: _Scanner, names) -> Expr:
    left = _parse_unary(sc, names)
    while True:
        if sc.take("*"):
            left = Mul(left, _parse_unary(sc, names))
        elif sc.take("/"):
            left = Div(left, _parse_unary(sc, names))
        else:
            return left


def _parse_unary(sc: _Scanner, names) -> Expr:
    if sc.take("-"):
        return Neg(_parse_unary(sc, names))
    return _parse_power(sc, names)


def _parse_power(sc: _Scanner, names) -> Expr:
    base = _parse_atom(sc, names)
    while sc.take("^"):
        start = sc.pos
        ch = sc.peek()
        if ch == "(":
            sc.expect("(")
            num = sc.integer()
            sc.expect("/")
            den_start = sc.pos
            den = sc.integer()
            if den <= 0:
                raise NonRationalExponent(
                    den_start, sc.pos, "a positive denominator", str(den), sc.text
                )
            sc.expect(")")
            base = Pow(base, Fraction(num, den))
        elif ch.isdigit() or ch in "+-":
            base = Pow(base, Fraction(sc.integer()))
        else:
            raise NonRationalExponent(
                start, sc.pos + 1, "an integer or (p/q) exponent", repr(ch), sc.text
            )
    return base


def _parse_atom(sc: _Scanner, names) -> Expr:
    ch = sc.peek()
    if ch == "(":
        sc.expect("(")
        inner = _parse_sum(sc, names)
        sc.expect(")")
        return inner
    if ch.isdigit():
        # integer constants only; "3/2" is ordinary division, which keeps
        # literal and operator readings from colliding in chains like a/1/4
        return Const(Fraction(sc.integer()))
    start = sc.pos
    name = sc.ident()
    if name is None:
        raise sc.error("a variable, constant or '('")
    if name not in names:
        raise UnknownVariable(
            start, sc.pos, f"one of {', '.join(names)}", name, sc.text
        )
    return Var(names.index(name), name)


# -- polynomial specs --------------------------------------------------------------


def parse_poly(text: str) -> PolyOverSeries:
    """Polynomial in X with series coefficients.

    Two surface forms: a semicolon-separated list of series literals by
    ascending degree (``"-t - t^2; 0; 1"``), or polynomial text such as
    ``"X^2 - (t + t^2)"`` where coefficients are series atoms, constants, or
    parenthesized series literals.
    """
    if ";" in text:
        parts = text.split(";")
        return PolyOverSeries(tuple(_series_or_zero(p) for p in parts))
    sc = _Scanner(text)
    acc: dict = {}
    sign = -1 if sc.take("-") else 1
    while True:
        deg, coeff = _parse_poly_term(sc)
        acc[deg] = acc.get(deg, PuiseuxSeries.zero()) + coeff.scale(sign)
        if sc.take("+"):
            sign = 1
        elif sc.take("-"):
            sign = -1
        else:
            break
    if not sc.at_end():
        raise sc.error("end of polynomial")
    top = max(acc)
    coeffs = [acc.get(d, PuiseuxSeries.zero()) for d in range(top + 1)]
    return PolyOverSeries(tuple(coeffs))


def _series_or_zero(chunk: str) -> PuiseuxSeries:
    body = chunk.strip()
    if body == "0":
        return PuiseuxSeries.zero()
    return parse_series(body)


def _parse_poly_term(sc: _Scanner):
    """polyterm := coef ['*' Xpow] | Xpow; coef := rat | 't'-term | '(' series ')'"""
    ch = sc.peek()
    if ch == "X":
        return _parse_x_power(sc), PuiseuxSeries.one()
    if ch == "(":
        start = sc.pos
        depth = 0
        i = sc.pos
        while i < len(sc.text):
            if sc.text[i] == "(":
                depth += 1
            elif sc.text[i] == ")":
                depth -= 1
                if depth == 0:
                    break
            i += 1
        if depth != 0:
            raise ParseError(start, len(sc.text), "a closing ')'", "end of input", sc.text)
        inner = sc.text[start + 1 : i]
        series = parse_series(inner)
        sc.pos = i + 1
    else:
        exp, coeff = _parse_term(sc)
        series = PuiseuxSeries(((exp, coeff),))
    if sc.take("*"):
        return _parse_x_power(sc), series
    return 0, series


def _parse_x_power(sc: _Scanner) -> int:
    sc.expect("X")
    if sc.take("^"):
        start = sc.pos
        deg = sc.integer()
        if deg < 0:
            raise ParseError(start, sc.pos, "a nonnegative degree", str(deg), sc.text)
        return deg
    return 1


# -- rendering ----------------------------------------------------------------------

render = render_series  # canonical series text form


def render_value(value) -> str:
    """Render any of the parseable values back to its grammar."""
    if isinstance(value, PuiseuxSeries):
        return render_series(value)
    if isinstance(value, MapExpr):
        return render_map(value)
    if isinstance(value, Expr):
        return render_expr(value, ("x", "y", "z", "w"))
    from .param_series import ParamSeries, render_param_series

    if isinstance(value, ParamSeries):
        return render_param_series(value)
    raise TypeError(f"cannot render {type(value).__name__}")

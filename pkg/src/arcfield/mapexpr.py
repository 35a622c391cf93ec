"""Expression trees for semialgebraic maps, with three evaluators.

Nodes are frozen dataclasses supporting operator syntax, so catalog maps can
be written as ordinary arithmetic on variables.  A ``MapExpr`` bundles the
component expressions of a vector map with its input variable names.

Evaluation targets:

* floats (grids and numeric probes), with division and even-root guards;
* series rings (PuiseuxSeries or ParamSeries components, via duck typing),
  where guards are decided by leading-sign analysis: a series is positive
  near 0+ exactly when its leading coefficient is positive;
* symbolic differentiation, producing new expression trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from .errors import GuardViolation, IrrationalLeadingRoot
from .qarith import float_pow, render_rat


class Expr:
    """Base node; arithmetic operators build larger trees."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, _coerce(other))

    def __radd__(self, other):
        return Add(_coerce(other), self)

    def __sub__(self, other):
        return Sub(self, _coerce(other))

    def __rsub__(self, other):
        return Sub(_coerce(other), self)

    def __mul__(self, other):
        return Mul(self, _coerce(other))

    def __rmul__(self, other):
        return Mul(_coerce(other), self)

    def __truediv__(self, other):
        return Div(self, _coerce(other))

    def __rtruediv__(self, other):
        return Div(_coerce(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, e):
        return Pow(self, Fraction(e))


@dataclass(frozen=True)
class Var(Expr):
    index: int
    name: str = ""


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction

    def __post_init__(self):
        if not isinstance(self.exponent, Fraction):
            object.__setattr__(self, "exponent", Fraction(self.exponent))


def _coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    raise TypeError(f"cannot use {type(x).__name__} in an expression")


@dataclass(frozen=True)
class MapExpr:
    """A vector-valued semialgebraic map: component expressions and arity."""

    exprs: Tuple[Expr, ...]
    var_names: Tuple[str, ...]

    def __post_init__(self):
        for expr in self.exprs:
            for v in free_vars(expr):
                if v >= len(self.var_names):
                    raise ValueError(f"variable index {v} out of range")

    @property
    def arity(self) -> int:
        return len(self.var_names)

    @property
    def out_dim(self) -> int:
        return len(self.exprs)


def map_expr(exprs, var_names=("x", "y")) -> MapExpr:
    if isinstance(exprs, Expr):
        exprs = (exprs,)
    return MapExpr(tuple(exprs), tuple(var_names))


def variables(*names: str):
    """Declare input variables; returns Var nodes in order."""
    return tuple(Var(i, n) for i, n in enumerate(names))


def free_vars(expr: Expr) -> set:
    if isinstance(expr, Var):
        return {expr.index}
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, (Add, Sub, Mul, Div)):
        return free_vars(expr.left) | free_vars(expr.right)
    if isinstance(expr, Neg):
        return free_vars(expr.arg)
    if isinstance(expr, Pow):
        return free_vars(expr.base)
    raise TypeError(f"unknown node {type(expr).__name__}")


# -- float evaluation ---------------------------------------------------------


def eval_float(expr: Expr, point) -> float:
    """Evaluate at a float point, enforcing division and even-root guards."""
    if isinstance(expr, Var):
        return float(point[expr.index])
    if isinstance(expr, Const):
        return float(expr.value)
    if isinstance(expr, Add):
        return eval_float(expr.left, point) + eval_float(expr.right, point)
    if isinstance(expr, Sub):
        return eval_float(expr.left, point) - eval_float(expr.right, point)
    if isinstance(expr, Mul):
        return eval_float(expr.left, point) * eval_float(expr.right, point)
    if isinstance(expr, Div):
        den = eval_float(expr.right, point)
        if den == 0.0:
            raise GuardViolation("division by zero at sample point")
        return eval_float(expr.left, point) / den
    if isinstance(expr, Neg):
        return -eval_float(expr.arg, point)
    if isinstance(expr, Pow):
        base = eval_float(expr.base, point)
        e = expr.exponent
        if base == 0.0 and e < 0:
            raise GuardViolation("zero base with negative exponent")
        if base < 0.0 and e.denominator % 2 == 0:
            raise GuardViolation("even root of a negative value")
        return float_pow(base, e)
    raise TypeError(f"unknown node {type(expr).__name__}")


def eval_map_float(m: MapExpr, point) -> tuple:
    if len(point) != m.arity:
        raise ValueError("point dimension does not match map arity")
    return tuple(eval_float(e, point) for e in m.exprs)


# -- series evaluation --------------------------------------------------------


def eval_series(expr: Expr, comps, order=None):
    """Evaluate on series components (PuiseuxSeries or ParamSeries alike).

    ``order`` caps truncations wherever an inverse or a fractional power
    opens an infinite expansion.  Guards: denominators need a decidable
    leading term; even-denominator powers need a positive leading sign.
    """
    ring = type(comps[0])
    if isinstance(expr, Var):
        return comps[expr.index]
    if isinstance(expr, Const):
        return ring.constant(expr.value)
    if isinstance(expr, Add):
        return eval_series(expr.left, comps, order) + eval_series(expr.right, comps, order)
    if isinstance(expr, Sub):
        return eval_series(expr.left, comps, order) - eval_series(expr.right, comps, order)
    if isinstance(expr, Mul):
        # an exactly-zero factor annihilates values that are real but not
        # exactly representable (irrational leading roots); genuine guard
        # violations still surface
        try:
            left = eval_series(expr.left, comps, order)
        except IrrationalLeadingRoot:
            right = eval_series(expr.right, comps, order)
            if right.is_zero():
                return right
            raise
        if left.is_zero():
            try:
                eval_series(expr.right, comps, order)
            except IrrationalLeadingRoot:
                return left
            return left
        return left * eval_series(expr.right, comps, order)
    if isinstance(expr, Div):
        den = eval_series(expr.right, comps, order)
        if den.is_zero():
            raise GuardViolation("division by the zero series")
        return eval_series(expr.left, comps, order) * den.inv(order=order)
    if isinstance(expr, Neg):
        return -eval_series(expr.arg, comps, order)
    if isinstance(expr, Pow):
        base = eval_series(expr.base, comps, order)
        e = expr.exponent
        if e.denominator % 2 == 0 and not _lead_positive(base):
            raise GuardViolation("even root of a series not positive near 0+")
        return base.pow_rational(e, order=order)
    raise TypeError(f"unknown node {type(expr).__name__}")


def _lead_positive(series) -> bool:
    if hasattr(series, "is_lead_positive"):
        return series.is_lead_positive()
    lead = series.lead()
    return lead is not None and lead[1] > 0


def eval_map_series(m: MapExpr, comps, order=None) -> tuple:
    if len(comps) != m.arity:
        raise ValueError("arc dimension does not match map arity")
    return tuple(eval_series(e, comps, order) for e in m.exprs)


# -- symbolic differentiation -------------------------------------------------


def diff(expr: Expr, var: int) -> Expr:
    """Partial derivative as a new tree, lightly simplified."""
    if isinstance(expr, Var):
        return Const(Fraction(1 if expr.index == var else 0))
    if isinstance(expr, Const):
        return Const(Fraction(0))
    if isinstance(expr, Add):
        return _add(diff(expr.left, var), diff(expr.right, var))
    if isinstance(expr, Sub):
        return _sub(diff(expr.left, var), diff(expr.right, var))
    if isinstance(expr, Mul):
        return _add(
            _mul(diff(expr.left, var), expr.right),
            _mul(expr.left, diff(expr.right, var)),
        )
    if isinstance(expr, Div):
        num = _sub(
            _mul(diff(expr.left, var), expr.right),
            _mul(expr.left, diff(expr.right, var)),
        )
        return Div(num, _mul(expr.right, expr.right))
    if isinstance(expr, Neg):
        return _neg(diff(expr.arg, var))
    if isinstance(expr, Pow):
        e = expr.exponent
        inner = diff(expr.base, var)
        scaled = _mul(Const(e), Pow(expr.base, e - 1))
        return _mul(scaled, inner)
    raise TypeError(f"unknown node {type(expr).__name__}")


def _is_const(expr: Expr, value=None) -> bool:
    return isinstance(expr, Const) and (value is None or expr.value == value)


def _add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    return Sub(a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0) or _is_const(b, 0):
        return Const(Fraction(0))
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    return Mul(a, b)


def _neg(a: Expr) -> Expr:
    if _is_const(a):
        return Const(-a.value)
    return Neg(a)


def jacobian(m: MapExpr) -> tuple:
    """Matrix of partial derivatives (rows: outputs, cols: inputs)."""
    return tuple(tuple(diff(e, j) for j in range(m.arity)) for e in m.exprs)


def jacobian_det_at(m: MapExpr, point) -> float:
    """Determinant of the Jacobian at a float point (square maps, n <= 3)."""
    if m.out_dim != m.arity:
        raise ValueError("Jacobian determinant needs a square map")
    rows = [[eval_float(d, point) for d in row] for row in jacobian(m)]
    return _det(rows)


def _det(rows) -> float:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = 0.0
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        total += (-1.0) ** j * rows[0][j] * _det(minor)
    return total


# -- rendering ----------------------------------------------------------------

_PREC = {"add": 1, "mul": 2, "neg": 3, "pow": 4, "atom": 5}


def _render(expr: Expr, names, prec: int) -> str:
    if isinstance(expr, Var):
        return names[expr.index]
    if isinstance(expr, Const):
        text = render_rat(expr.value)
        mine = _PREC["atom"] if expr.value >= 0 and expr.value.denominator == 1 else _PREC["mul"]
        return text if mine >= prec else f"({text})"
    if isinstance(expr, (Add, Sub)):
        op = " + " if isinstance(expr, Add) else " - "
        text = (
            _render(expr.left, names, _PREC["add"])
            + op
            + _render(expr.right, names, _PREC["add"] + 1)
        )
        return text if _PREC["add"] >= prec else f"({text})"
    if isinstance(expr, (Mul, Div)):
        op = "*" if isinstance(expr, Mul) else "/"
        left = _render(expr.left, names, _PREC["mul"])
        right = _render(expr.right, names, _PREC["mul"] + 1)
        text = left + op + right
        return text if _PREC["mul"] >= prec else f"({text})"
    if isinstance(expr, Neg):
        text = "-" + _render(expr.arg, names, _PREC["neg"] + 1)
        return text if _PREC["neg"] >= prec else f"({text})"
    if isinstance(expr, Pow):
        e = expr.exponent
        etext = str(e.numerator) if e.denominator == 1 else f"({e.numerator}/{e.denominator})"
        text = _render(expr.base, names, _PREC["pow"] + 1) + "^" + etext
        return text if _PREC["pow"] >= prec else f"({text})"
    raise TypeError(f"unknown node {type(expr).__name__}")


def render_expr(expr: Expr, names) -> str:
    return _render(expr, names, 0)


def render_map(m: MapExpr) -> str:
    bodies = [render_expr(e, m.var_names) for e in m.exprs]
    if len(bodies) == 1:
        return bodies[0]
    return "(" + ", ".join(bodies) + ")"

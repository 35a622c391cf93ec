"""Truncated real Puiseux series: the working model of arc germs at 0+.

A series is a finite, strictly increasing list of ``(exponent, coefficient)``
terms on the lattice (1/ram)Z together with an exclusive knowledge bound
``trunc``: coefficients at exponents >= trunc are *unknown*, not zero.
``trunc = None`` marks an exact element (a polynomial in t^(1/ram), possibly
with negative exponents).

Zero is three-valued and the distinction is load-bearing:

* exactly zero: no terms, ``trunc`` None;
* zero up to truncation: no terms, finite ``trunc`` (nothing is known below
  the bound, so order, inversion and comparison are undecidable);
* nonzero: a known leading term exists.

Every operation computes the tightest sound truncation bound, so an unknown
coefficient is never silently reported as zero.  Coefficients are exact
``Fraction`` values by default; numeric mode stores 64-bit floats in the same
structure (modes are never mixed inside one computation).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Union

from .errors import (
    IndistinguishableAtTruncation,
    IrrationalLeadingRoot,
    NegativeBaseForEvenRoot,
    NonPositiveValuationSubstitution,
    RamificationOverflow,
    TruncationExhausted,
    UnboundedExpansion,
    ZeroUpToTruncationError,
)
from .qarith import Exp, Rat, float_pow, lcm, rational_pow, render_rat

DEFAULT_RAM_CAP = 64
_ram_cap = DEFAULT_RAM_CAP


def set_ram_cap(cap: int) -> None:
    """Set the global bound on ramification indices (memory guard)."""
    global _ram_cap
    if cap < 1:
        raise ValueError("ramification cap must be >= 1")
    _ram_cap = cap


def get_ram_cap() -> int:
    return _ram_cap


class ZeroUpToTruncation:
    """Sentinel order: no nonzero coefficient is known below ``trunc``.

    ``trunc`` None means the series is exactly zero (order +infinity).
    """

    __slots__ = ("trunc",)

    def __init__(self, trunc: Optional[Exp] = None):
        self.trunc = trunc

    def __eq__(self, other):
        return isinstance(other, ZeroUpToTruncation) and self.trunc == other.trunc

    def __hash__(self):
        return hash(("ZeroUpToTruncation", self.trunc))

    def __repr__(self):
        if self.trunc is None:
            return "ZeroUpToTruncation(exact)"
        return f"ZeroUpToTruncation({self.trunc})"


class Diverges:
    """Sentinel returned by ``limit0`` when the series blows up at 0+."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Diverges"


DIVERGES = Diverges()

OrdResult = Union[Exp, ZeroUpToTruncation]


def _min_bound(a: Optional[Exp], b: Optional[Exp]) -> Optional[Exp]:
    """Min of two truncation bounds where None is +infinity."""
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add_bound(a: Optional[Exp], b: Optional[Exp]) -> Optional[Exp]:
    """Sum of bounds where None is +infinity."""
    if a is None or b is None:
        return None
    return a + b


def _below(e: Exp, bound: Optional[Exp]) -> bool:
    return bound is None or e < bound


class PuiseuxSeries:
    """One truncated Puiseux series; immutable value semantics."""

    __slots__ = ("ram", "terms", "trunc")

    def __init__(self, terms=(), trunc: Optional[Exp] = None, ram: int = 1):
        if trunc is not None and not isinstance(trunc, Fraction):
            trunc = Fraction(trunc)
        pairs = []
        r = ram
        for e, c in terms:
            if not isinstance(e, Fraction):
                e = Fraction(e)
            if isinstance(c, int):
                c = Fraction(c)
            if r % e.denominator:
                r = lcm(r, e.denominator)
            pairs.append((e, c))
        if r > _ram_cap:
            raise RamificationOverflow(f"ramification {r} exceeds cap {_ram_cap}")
        # accumulate on the integer lattice: int keys hash far cheaper than
        # Fraction keys, and the truncation test becomes one int compare
        if trunc is None:
            bound_num = bound_den = None
        else:
            scaled = trunc * r
            bound_num, bound_den = scaled.numerator, scaled.denominator
        acc = {}
        for e, c in pairs:
            i = e.numerator * (r // e.denominator)
            if bound_num is not None and i * bound_den >= bound_num:
                continue
            acc[i] = acc.get(i, 0) + c
        clean = tuple(
            (Fraction(i, r), c) for i, c in sorted(acc.items()) if c != 0
        )
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "ram", r)

    def __setattr__(self, *_args):
        raise AttributeError("PuiseuxSeries is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> PuiseuxSeries:
        return cls()

    @classmethod
    def one(cls) -> PuiseuxSeries:
        return cls(((Fraction(0), Fraction(1)),))

    @classmethod
    def constant(cls, c) -> PuiseuxSeries:
        return cls(((Fraction(0), c),))

    @classmethod
    def t_power(cls, e, coeff=Fraction(1)) -> PuiseuxSeries:
        return cls(((Fraction(e), coeff),))

    @classmethod
    def unknown(cls, trunc) -> PuiseuxSeries:
        """Zero up to ``trunc``: nothing known below the bound."""
        return cls((), trunc=Fraction(trunc))

    # -- basic structure ---------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.trunc is None

    def is_zero(self) -> bool:
        """Exactly zero (not merely zero up to truncation)."""
        return not self.terms and self.trunc is None

    def is_indeterminate_zero(self) -> bool:
        return not self.terms and self.trunc is not None

    def lead(self):
        """Leading ``(exponent, coefficient)`` pair, or None."""
        return self.terms[0] if self.terms else None

    def ord(self) -> OrdResult:
        """t-adic valuation: least exponent carrying a nonzero coefficient."""
        if self.terms:
            return self.terms[0][0]
        return ZeroUpToTruncation(self.trunc)

    def ord_lower_bound(self) -> Optional[Exp]:
        """A sound lower bound for the order (None = +infinity, exact zero)."""
        if self.terms:
            return self.terms[0][0]
        return self.trunc

    def coeff(self, e) -> Rat:
        """Known coefficient at exponent e; raises if e is beyond the bound."""
        e = Fraction(e)
        if not _below(e, self.trunc):
            raise ZeroUpToTruncationError(self.trunc, f"coefficient at {e} unknown")
        for exp, c in self.terms:
            if exp == e:
                return c
        return Fraction(0)

    def truncate(self, order) -> PuiseuxSeries:
        """Forget all knowledge at exponents >= order (None: keep everything)."""
        t = _min_bound(self.trunc, None if order is None else Fraction(order))
        if t == self.trunc:
            return self
        return PuiseuxSeries(self.terms, trunc=t, ram=self.ram)

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self.terms == other.terms and self.trunc == other.trunc

    def __hash__(self):
        return hash((self.terms, self.trunc))

    def __repr__(self):
        return f"PuiseuxSeries({self})"

    def __str__(self):
        return render_series(self)

    # -- ring operations ---------------------------------------------------

    def __neg__(self) -> PuiseuxSeries:
        return PuiseuxSeries(
            tuple((e, -c) for e, c in self.terms), trunc=self.trunc, ram=self.ram
        )

    def __add__(self, other) -> PuiseuxSeries:
        other = _coerce(other)
        trunc = _min_bound(self.trunc, other.trunc)
        return PuiseuxSeries(
            self.terms + other.terms, trunc=trunc, ram=lcm(self.ram, other.ram)
        )

    __radd__ = __add__

    def __sub__(self, other) -> PuiseuxSeries:
        return self + (-_coerce(other))

    def __rsub__(self, other) -> PuiseuxSeries:
        return _coerce(other) + (-self)

    def __mul__(self, other) -> PuiseuxSeries:
        other = _coerce(other)
        # trunc = min(ord f + trunc g, ord g + trunc f); for a series with no
        # known terms its own trunc stands in for the (unknown, larger) order
        b1 = _add_bound(self.ord_lower_bound(), other.trunc)
        b2 = _add_bound(other.ord_lower_bound(), self.trunc)
        trunc = _min_bound(b1, b2)
        ram = lcm(self.ram, other.ram)
        fa = ram // self.ram
        fb = ram // other.ram
        a = [(e.numerator * (self.ram // e.denominator) * fa, c) for e, c in self.terms]
        b = [(e.numerator * (other.ram // e.denominator) * fb, c) for e, c in other.terms]
        if trunc is None:
            bound_num = bound_den = None
        else:
            scaled = trunc * ram
            bound_num, bound_den = scaled.numerator, scaled.denominator
        acc = {}
        for i1, c1 in a:
            for i2, c2 in b:
                i = i1 + i2
                if bound_num is not None and i * bound_den >= bound_num:
                    continue
                acc[i] = acc.get(i, 0) + c1 * c2
        terms = tuple((Fraction(i, ram), c) for i, c in sorted(acc.items()) if c != 0)
        out = PuiseuxSeries.__new__(PuiseuxSeries)
        object.__setattr__(out, "terms", terms)
        object.__setattr__(out, "trunc", trunc)
        object.__setattr__(out, "ram", ram)
        return out

    __rmul__ = __mul__

    def scale(self, c) -> PuiseuxSeries:
        """Multiply by a scalar (exact, truncation unchanged)."""
        if c == 0:
            return PuiseuxSeries((), trunc=self.trunc)
        return PuiseuxSeries(
            tuple((e, c * k) for e, k in self.terms), trunc=self.trunc, ram=self.ram
        )

    def shift(self, e) -> PuiseuxSeries:
        """Multiply by the exact monomial t^e."""
        e = Fraction(e)
        return PuiseuxSeries(
            tuple((k + e, c) for k, c in self.terms),
            trunc=_add_bound(self.trunc, e),
            ram=lcm(self.ram, e.denominator),
        )

    def __truediv__(self, other) -> PuiseuxSeries:
        other = _coerce(other)
        return self * other.inv()

    # -- leading-term decomposition ---------------------------------------

    def _unit_part(self):
        """Write self = c t^v (1 + u) with ord u > 0; returns (v, c, u)."""
        v, c = self.terms[0]
        rest = PuiseuxSeries(self.terms[1:], trunc=self.trunc, ram=self.ram)
        recip = Fraction(1) / c if isinstance(c, Fraction) else 1.0 / c
        return v, c, rest.shift(-v).scale(recip)

    def inv(self, order=None) -> PuiseuxSeries:
        """Multiplicative inverse; relative precision is preserved.

        ``order`` is required when the input is exact but not a monomial
        (the inverse is then an infinite series).
        """
        return self.pow_rational(Fraction(-1), order=order)

    def pow_rational(self, e, order=None) -> PuiseuxSeries:
        """Raise to a rational power via the binomial series.

        In exact mode the leading coefficient must admit an exact rational
        e-th power; even denominators additionally require it positive.
        ``order`` caps the absolute truncation of the result and is mandatory
        whenever the expansion does not terminate and no truncation is
        inherited from the operand.
        """
        e = Fraction(e)
        if not self.terms:
            if self.is_zero():
                if e > 0:
                    return PuiseuxSeries.zero()
                raise ZeroDivisionError("zero series with nonpositive exponent")
            raise ZeroUpToTruncationError(self.trunc)
        if e == 0:
            return PuiseuxSeries.one()
        v, c, u = self._unit_part()
        lead_pow = _coeff_pow(c, e)
        head_exp = e * v
        if u.is_zero():
            return PuiseuxSeries(((head_exp, lead_pow),))
        # relative precision available for the binomial expansion; ``order``
        # only caps expansions that would otherwise be infinite
        rel = None if self.trunc is None else self.trunc - v
        terminates = e.denominator == 1 and e >= 0
        if not terminates:
            if order is not None:
                rel = _min_bound(rel, Fraction(order) - head_exp)
            if rel is None:
                raise UnboundedExpansion(
                    "rational power of an exact non-monomial series needs an order"
                )
        body = _binomial_sum(u, e, rel)
        return body.scale(lead_pow).shift(head_exp)

    def __pow__(self, e) -> PuiseuxSeries:
        return self.pow_rational(Fraction(e))

    def compose(self, inner: PuiseuxSeries, order=None) -> PuiseuxSeries:
        """Substitute ``inner`` for t; requires ord(inner) > 0.

        Fractional or negative exponents of the outer series turn into
        rational powers of ``inner`` and inherit its guards.
        """
        if inner.is_zero():
            if any(e < 0 for e, _ in self.terms):
                raise ZeroDivisionError("pole at 0")
            if self.trunc is not None and self.trunc <= 0:
                raise ZeroUpToTruncationError(self.trunc, "constant term unknown")
            return PuiseuxSeries.constant(self.coeff(0))
        w = inner.ord()
        if isinstance(w, ZeroUpToTruncation):
            raise ZeroUpToTruncationError(inner.trunc, "inner series order unknown")
        if w <= 0:
            raise NonPositiveValuationSubstitution(
                f"substitution needs positive order, got {w}"
            )
        tail = None if self.trunc is None else w * self.trunc
        cap = _min_bound(tail, None if order is None else Fraction(order))
        out = PuiseuxSeries((), trunc=cap)
        for e, c in self.terms:
            out = out + inner.pow_rational(e, order=cap).scale(c)
        return out.truncate(cap)

    # -- order structure ---------------------------------------------------

    def compare(self, other) -> int:
        """Sign of self - other in the unique field order (lead coefficient)."""
        diff = self - _coerce(other)
        if diff.terms:
            return 1 if diff.terms[0][1] > 0 else -1
        if diff.is_zero():
            return 0
        raise IndistinguishableAtTruncation(
            f"difference is zero up to truncation {diff.trunc}"
        )

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def is_positive(self) -> bool:
        return self.compare(PuiseuxSeries.zero()) > 0

    def limit0(self):
        """Limit at t -> 0+: the constant coefficient, or DIVERGES.

        Raises IndistinguishableAtTruncation when the truncation bound sits
        at or below 0, i.e. negative exponents cannot be ruled out.
        """
        if self.terms and self.terms[0][0] < 0:
            return DIVERGES
        if self.trunc is not None and self.trunc <= 0:
            raise IndistinguishableAtTruncation(
                "behaviour at 0+ unknown at this truncation"
            )
        for e, c in self.terms:
            if e == 0:
                return c
            if e > 0:
                break
        return Fraction(0)


def _coerce(x) -> PuiseuxSeries:
    if isinstance(x, PuiseuxSeries):
        return x
    if isinstance(x, (int, Fraction, float)):
        return PuiseuxSeries.constant(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to PuiseuxSeries")


def _coeff_pow(c, e: Fraction):
    """e-th power of a coefficient, exact or float depending on mode."""
    if isinstance(c, Fraction):
        if c < 0 and e.denominator % 2 == 0:
            raise NegativeBaseForEvenRoot(f"({c})^{e}")
        p = rational_pow(c, e)
        if p is None:
            raise IrrationalLeadingRoot(f"({c})^{e} is irrational")
        return p
    if c < 0 and e.denominator % 2 == 0:
        raise NegativeBaseForEvenRoot(f"({c})^{e}")
    return float_pow(c, e)


def _binomial_sum(u: PuiseuxSeries, e: Fraction, rel: Optional[Exp]) -> PuiseuxSeries:
    """(1 + u)^e truncated at the relative order ``rel`` (None: exact).

    The truncated case runs the first-order recurrence obtained from
    (1 + u) h' = e u' h on the dense ramification lattice, which is
    quadratic in the number of kept lattice points.
    """
    if u.is_zero():
        one = PuiseuxSeries.one()
        return one if rel is None else one + PuiseuxSeries.unknown(rel)
    if rel is None:
        # terminating exact case: e is a nonnegative integer
        out = PuiseuxSeries.one()
        term = PuiseuxSeries.one()
        coeff = Fraction(1)
        for k in range(1, int(e) + 1):
            coeff = coeff * (e - (k - 1)) / k
            if coeff == 0:
                break
            term = term * u
            out = out + term.scale(coeff)
        return out
    ram = u.ram
    n_max = math.ceil(rel * ram) - 1
    if n_max < 0:
        return PuiseuxSeries((), trunc=rel)
    ua = {}
    for exp, c in u.terms:
        idx = int(exp * ram)
        if 0 < idx <= n_max:
            ua[idx] = c
    support = sorted(ua)
    h = [0] * (n_max + 1)
    h[0] = Fraction(1)
    e1 = e + 1
    for n in range(1, n_max + 1):
        acc = 0
        for j in support:
            if j > n:
                break
            prev = h[n - j]
            if prev:
                acc += (e1 * j - n) * ua[j] * prev
        h[n] = acc / n if acc else 0
    terms = [(Fraction(n, ram), h[n]) for n in range(n_max + 1) if h[n]]
    return PuiseuxSeries(terms, trunc=rel, ram=ram)


def formal_derivative(f: PuiseuxSeries) -> PuiseuxSeries:
    """Termwise d/dt; the truncation bound drops by one."""
    trunc = None if f.trunc is None else f.trunc - 1
    return PuiseuxSeries(
        tuple((e - 1, c * e) for e, c in f.terms if e != 0), trunc=trunc, ram=f.ram
    )


def reparam_inverse(f: PuiseuxSeries, target) -> PuiseuxSeries:
    """Compositional inverse: a series d with f(d(t)) = t + O(t^target).

    Requires ord f = r > 0 and a leading coefficient with an exact r-th root
    (in exact mode).  Newton iteration on series; d has order 1/r.  The
    residual certificate is recomputed on the returned, truncated d.
    """
    target = Fraction(target)
    if not f.terms:
        raise ZeroUpToTruncationError(f.trunc)
    r, c = f.terms[0]
    if r <= 0:
        raise NonPositiveValuationSubstitution(f"order {r} is not positive")
    if f.trunc is not None and f.trunc < r * (target + 1):
        # composing with d (order 1/r) caps residual knowledge at trunc/r
        raise TruncationExhausted(
            f"inverting to order {target} needs f known below {r * (target + 1)}"
        )
    # d must be kept beyond `target` when ord f < 1, because composing then
    # amplifies the truncation error by t^((r-1)/r) with negative exponent
    pad = max(Fraction(0), (1 - r) / r)
    tau = target + pad
    res_goal = target + 1
    work = res_goal + pad  # delta truncation that lets the residual reach res_goal
    inv_r = Fraction(1) / r
    delta = PuiseuxSeries.t_power(inv_r, _coeff_pow(c, -inv_r))
    t = PuiseuxSeries.t_power(1)
    fprime = formal_derivative(f)
    for _ in range(256):
        res = f.compose(delta, order=res_goal) - t
        ro = res.ord_lower_bound()
        if ro is not None and ro >= res_goal:
            break
        slope = fprime.compose(delta, order=work)
        delta = (delta - res * slope.inv(order=work)).truncate(work)
    else:
        raise RuntimeError("series reparametrization did not converge")
    delta = delta.truncate(tau)
    res = f.compose(delta, order=target) - t
    ro = res.ord_lower_bound()
    if ro is None or ro < target:
        raise RuntimeError("reparametrization residual certificate failed")
    return delta


# -- rendering (canonical grammar, shared with the parser) -----------------


def _render_exp(e: Exp) -> str:
    if e.denominator == 1:
        return str(e.numerator)
    return f"({e.numerator}/{e.denominator})"


def _render_coeff(c) -> str:
    if isinstance(c, Fraction):
        return render_rat(c)
    return repr(c)


def render_series(f: PuiseuxSeries, var: str = "t") -> str:
    """Canonical text form, e.g. ``3/2*t^(5/2) - t^3 + O(t^4)``."""
    parts = []
    for e, c in f.terms:
        neg = c < 0
        mag = -c if neg else c
        if e == 0:
            body = _render_coeff(mag)
        elif mag == 1:
            body = var if e == 1 else f"{var}^{_render_exp(e)}"
        else:
            pw = var if e == 1 else f"{var}^{_render_exp(e)}"
            body = f"{_render_coeff(mag)}*{pw}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    if f.trunc is not None:
        o = f"O({var}^{_render_exp(f.trunc)})"
        parts.append(f"+ {o}" if parts else o)
    if not parts:
        return "0"
    return " ".join(parts)


# -- arcs -------------------------------------------------------------------

Arc = tuple  # n-tuple of PuiseuxSeries


def arc(*components) -> Arc:
    """Bundle series into an arc (tuple of components)."""
    return tuple(_coerce(c) for c in components)


def arc_sub(a: Arc, b: Arc) -> Arc:
    if len(a) != len(b):
        raise ValueError("arc dimensions differ")
    return tuple(x - y for x, y in zip(a, b))


def arc_limit0(a: Arc):
    """Componentwise limit at 0+; DIVERGES if any component diverges."""
    out = []
    for comp in a:
        v = comp.limit0()
        if v is DIVERGES:
            return DIVERGES
        out.append(v)
    return tuple(out)


def arc_based_at_zero(a: Arc) -> bool:
    lim = arc_limit0(a)
    return lim is not DIVERGES and all(v == 0 for v in lim)

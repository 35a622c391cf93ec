"""Exact rational scalars and the exponent lattice under every series type.

``Rat`` is the stdlib ``fractions.Fraction``: arbitrary-precision, always in
reduced form with positive denominator, so the representation invariants
(gcd = 1, den > 0, zero = 0/1) hold by construction.  ``Exp`` is the same
type used in exponent position; series constructors enforce that exponents
attached to a series of ramification q land on the lattice (1/q)Z.
"""

from __future__ import annotations

import math
from fractions import Fraction

Rat = Fraction
Exp = Fraction

LESS, EQUAL, GREATER = -1, 0, 1


def rat(num: int, den: int = 1) -> Rat:
    """Reduced rational from an integer pair."""
    return Fraction(num, den)


def rat_cmp(a: Rat, b: Rat) -> int:
    """Total order on rationals: -1, 0 or 1."""
    if a < b:
        return LESS
    if a > b:
        return GREATER
    return EQUAL


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "neg": lambda a, _b: -a,
    "cmp": rat_cmp,
}


def rat_arith(op: str, a: Rat, b: Rat = Fraction(0)):
    """Dispatch arithmetic by name; ``div`` raises ZeroDivisionError on b = 0."""
    if op == "div":
        if b == 0:
            raise ZeroDivisionError("rational division by zero")
        return a / b
    try:
        return _OPS[op](a, b)
    except KeyError:
        raise ValueError(f"unknown rational op {op!r}") from None


def render_rat(a: Rat) -> str:
    """Textual form ``p/q``, denominator omitted when 1."""
    if a.denominator == 1:
        return str(a.numerator)
    return f"{a.numerator}/{a.denominator}"


def parse_rat(text: str) -> Rat:
    """Inverse of :func:`render_rat` (strict: integers or ``p/q``)."""
    body = text.strip()
    if "/" in body:
        num, den = body.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(body))


def lcm(a: int, b: int) -> int:
    return abs(a * b) // math.gcd(a, b) if a and b else 0


def int_nth_root(n: int, k: int):
    """Exact k-th root of a nonnegative integer, or None if not a perfect power."""
    if n < 0:
        raise ValueError("negative radicand")
    if n in (0, 1) or k == 1:
        return n
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    # float guess can be off for big integers; fall back to integer bisection
    lo, hi = 0, 1 << (n.bit_length() // k + 1)
    while lo <= hi:
        mid = (lo + hi) // 2
        p = mid**k
        if p == n:
            return mid
        if p < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def rational_nth_root(c: Rat, k: int):
    """Exact k-th root of a rational, or None.

    Negative radicands are allowed for odd k (the root is negative).
    """
    if k <= 0:
        raise ValueError("root index must be positive")
    if c < 0:
        if k % 2 == 0:
            return None
        r = rational_nth_root(-c, k)
        return None if r is None else -r
    num = int_nth_root(c.numerator, k)
    if num is None:
        return None
    den = int_nth_root(c.denominator, k)
    if den is None:
        return None
    return Fraction(num, den)


def rational_pow(c: Rat, e: Rat):
    """Exact c**e for rational e, or None when the result is irrational.

    Requires c != 0 for negative e; even-denominator e requires c > 0.
    """
    if c == 0:
        if e > 0:
            return Fraction(0)
        raise ZeroDivisionError("zero base with nonpositive exponent")
    root = rational_nth_root(c, e.denominator)
    if root is None:
        return None
    return root ** e.numerator


def float_pow(c: float, e: Rat) -> float:
    """Sign-aware float power used in numeric mode (odd roots of negatives)."""
    if c < 0:
        if e.denominator % 2 == 0:
            raise ValueError("even root of a negative number")
        mag = (-c) ** float(e)
        return -mag if e.numerator % 2 else mag
    return c ** float(e)

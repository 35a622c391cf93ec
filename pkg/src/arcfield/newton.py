"""Root branches of polynomials over Puiseux series, via the Newton polygon.

The classical recursive method: each lower-hull edge of the coefficient
valuations picks a candidate leading exponent, the edge polynomial picks the
leading coefficients, and substituting X = t^mu (c + Y) reduces to the same
problem one term deeper.  Exact mode admits only edge equations whose real
roots are all rational (checked by a Sturm count against the rational roots
found by divisor search) and raises IrrationalBranch otherwise; numeric mode
reruns the same recursion on 64-bit floats.

Only real branches are produced.  Every returned branch carries a residual
certificate: substituting it back and measuring the valuation of what is
left, in exact arithmetic (or a float residual probe at t = 1e-3 in numeric
mode).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import List, Optional, Tuple

from .errors import (
    IrrationalBranch,
    NoRealBranch,
    NotPositive,
    TruncationExhausted,
)
from .puiseux import PuiseuxSeries
from .qarith import Exp

NUMERIC_PROBE_T = 1e-3
NUMERIC_RESIDUAL_TOL = 1e-9

_ROOT_SEARCH_LIMIT = 10**14  # divisor enumeration beyond this is hopeless


@dataclass(frozen=True)
class PolyOverSeries:
    """Polynomial in X with PuiseuxSeries coefficients, low degree first."""

    coeffs: Tuple[PuiseuxSeries, ...]

    def __post_init__(self):
        cs = list(self.coeffs)
        while len(cs) > 1 and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval(self, x: PuiseuxSeries, order=None) -> PuiseuxSeries:
        """Horner evaluation with sound truncation propagation."""
        acc = PuiseuxSeries.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
            if order is not None:
                acc = acc.truncate(order)
        return acc

    def eval_float(self, t0: float, x0: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x0 + _series_at(c, t0)
        return acc

    def to_float(self) -> PolyOverSeries:
        return PolyOverSeries(tuple(_float_series(c) for c in self.coeffs))


def poly_from_roots(roots, extra=()) -> PolyOverSeries:
    """Expand prod (X - r) times optional extra factors given as coeff lists."""
    coeffs = [PuiseuxSeries.one()]
    for r in roots:
        coeffs = _poly_mul_series(coeffs, [-r, PuiseuxSeries.one()])
    for factor in extra:
        coeffs = _poly_mul_series(coeffs, list(factor))
    return PolyOverSeries(tuple(coeffs))


def _poly_mul_series(a, b):
    out = [PuiseuxSeries.zero() for _ in range(len(a) + len(b) - 1)]
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] = out[i + j] + ca * cb
    return out


@dataclass(frozen=True)
class RootBranch:
    """One real series branch with its residual certificate."""

    series: PuiseuxSeries
    multiplicity: int
    certified_order: Optional[Exp]  # None: residual exactly zero
    exactness: str  # "exact" | "numeric"

    def sort_key(self):
        lead = self.series.lead()
        return (
            lead[0] if lead else Fraction(10**9),
            self.series.terms,
        )


@dataclass(frozen=True)
class _Branch:
    terms: tuple  # ((exp, coeff), ...)
    mult: int
    trunc: Optional[Exp]  # None: exact root


def np_roots(P: PolyOverSeries, target, mode: str = "exact") -> List[RootBranch]:
    """All real Puiseux root branches of P up to order ``target``.

    Exact mode raises IrrationalBranch when a real branch exists whose edge
    equation has no rational root; numeric mode computes float branches and
    certifies them with a residual probe instead of a valuation bound.
    """
    target = Fraction(target)
    if mode == "numeric":
        P = P.to_float()
    if P.degree < 1:
        return []
    if P.coeffs[-1].is_indeterminate_zero():
        raise TruncationExhausted("leading coefficient has no known term")
    recs = _solve(list(P.coeffs), target, positive_only=False, mode=mode, depth=0)
    out = []
    for rec in recs:
        series = PuiseuxSeries(rec.terms, trunc=rec.trunc)
        branch = _certify(P, series, rec.mult, target, mode)
        out.append(branch)
    out.sort(key=RootBranch.sort_key)
    return out


def _certify(P, series, mult, target, mode) -> RootBranch:
    if mode == "numeric":
        res = abs(P.eval_float(NUMERIC_PROBE_T, _series_at(series, NUMERIC_PROBE_T)))
        if res > NUMERIC_RESIDUAL_TOL:
            raise RuntimeError(
                f"numeric branch residual {res:.3e} exceeds {NUMERIC_RESIDUAL_TOL}"
            )
        return RootBranch(series, mult, series.trunc, "numeric")
    residual = P.eval(series)
    if residual.is_zero():
        return RootBranch(series, mult, None, "exact")
    certified = residual.ord_lower_bound()
    if certified is None or certified < target:
        raise RuntimeError("branch failed its residual certificate")
    return RootBranch(series, mult, certified, "exact")


NUMERIC_CHOP = 1e-10


def _chop(coeffs):
    """Drop float round-off relative to the largest coefficient magnitude.

    Numeric-mode transforms leave machine-epsilon residue where exact
    arithmetic would cancel; the final residual probe remains the authority.
    """
    scale = 1.0
    for c in coeffs:
        for _e, v in c.terms:
            scale = max(scale, abs(v))
    tol = NUMERIC_CHOP * scale
    out = []
    for c in coeffs:
        kept = tuple((e, v) for e, v in c.terms if abs(v) > tol)
        out.append(PuiseuxSeries(kept, trunc=c.trunc, ram=c.ram) if kept != c.terms else c)
    return out


def _solve(coeffs, target, positive_only, mode, depth) -> List[_Branch]:
    """Branches of sum coeffs[j] Y^j = 0 known below ``target`` (t-exponent).

    ``positive_only`` restricts to branches with ord Y > 0, which is the
    invariant inside the recursion.
    """
    if depth > 4096:
        raise RuntimeError("Newton polygon recursion did not terminate")
    if mode == "numeric":
        coeffs = _chop(coeffs)
    out: List[_Branch] = []

    # Y = 0 as an exact root (multiplicity = lowest index with nonzero coeff)
    m = 0
    while m < len(coeffs) and coeffs[m].is_zero():
        m += 1
    if m == len(coeffs):
        raise ValueError("zero polynomial has every series as a root")
    if m > 0:
        out.append(_Branch((), m, None))
        coeffs = coeffs[m:]

    if len(coeffs) == 1:
        return out

    if len(coeffs) == 2:
        # linear stage: solve by one division at full available precision
        branch = _solve_linear(coeffs[0], coeffs[1], target, positive_only)
        if branch is not None:
            out.append(branch)
        return out

    # Newton polygon over the known coefficient valuations
    pts = []
    unknown = []
    for j, c in enumerate(coeffs):
        lead = c.lead()
        if lead is not None:
            pts.append((j, lead[0]))
        elif not c.is_zero():
            unknown.append((j, c.trunc))
    if not pts:
        raise TruncationExhausted("no coefficient has a known leading term")
    hull = _lower_hull(pts)
    for j, bound in unknown:
        if j == 0:
            # the constant term ran out of known digits: every root passing
            # through it agrees with 0 below (bound - v1)/j1, so it is still
            # representable when that clears the target
            j1, v1 = hull[0]
            beta = Fraction(bound - v1, j1)
            if beta < target or _cuts_hull_from_left(hull, bound):
                raise TruncationExhausted(
                    "constant coefficient is unknown below the Newton polygon"
                )
            out.append(_Branch((), j1, target))
            continue
        # a coefficient known only above the hull cannot change the polygon;
        # anything to the left of it or below it could
        if j < hull[0][0] or bound is None or _below_hull(hull, j, bound):
            raise TruncationExhausted(
                f"coefficient of Y^{j} is unknown below the Newton polygon"
            )

    for (j0, v0), (j1, v1) in zip(hull, hull[1:]):
        mu = Fraction(v0 - v1, j1 - j0)
        if positive_only and mu <= 0:
            continue
        level = v0 + j0 * mu
        edge = [
            (j - j0, coeffs[j].lead()[1])
            for j, v in pts
            if v + j * mu == level
        ]
        for c, mult in _edge_roots(edge, mode):
            if mu >= target:
                # next correction would start at or beyond the bound
                out.append(_Branch((), mult, target))
                continue
            shifted = _transform(coeffs, mu, c, level)
            subs = _solve(shifted, target - mu, True, mode, depth + 1)
            for s in subs:
                terms = ((mu, c),) + tuple((mu + e, a) for e, a in s.terms)
                trunc = None if s.trunc is None else mu + s.trunc
                out.append(_Branch(terms, s.mult, trunc))
    return out


def _solve_linear(c0, c1, target, positive_only) -> Optional[_Branch]:
    """Root of c1 Y + c0: division keeps all precision the inputs carry."""
    if c1.lead() is None:
        raise TruncationExhausted("linear coefficient has no known term")
    v1 = c1.lead()[0]
    if c0.lead() is None:
        # constant known only as O(t^T): the root is pinned below T - v1
        bound = c0.trunc - v1
        if bound <= 0:
            raise TruncationExhausted("root order undecidable at this truncation")
        return _Branch((), 1, bound)
    v0 = c0.lead()[0]
    inv_order = max(Fraction(1), target - v0 + 1)
    root = (-c0) * c1.inv(order=inv_order)
    lead = root.lead()
    if lead is None and not root.is_zero() and root.trunc <= 0:
        raise TruncationExhausted("root order undecidable at this truncation")
    if positive_only:
        if lead is not None and lead[0] <= 0:
            return None
        if lead is None and not root.is_zero() and root.trunc <= 0:
            return None
    return _Branch(root.terms, 1, root.trunc)


def _cuts_hull_from_left(hull, bound) -> bool:
    """Could a point (0, v) with v >= bound change hull edges at j >= hull[0]?

    Only when (0, bound) lies strictly below the extension of the first edge;
    above it, the extra edge stays left of the known hull.
    """
    if len(hull) < 2:
        return False
    (j1, v1), (j2, v2) = hull[0], hull[1]
    line_at_zero = v1 - j1 * Fraction(v2 - v1, j2 - j1)
    return bound < line_at_zero


def _below_hull(hull, j, v) -> bool:
    """Is the point (j, v) strictly below the lower hull?"""
    for (j0, v0), (j1, v1) in zip(hull, hull[1:]):
        if j0 <= j <= j1:
            line = v0 + (v1 - v0) * Fraction(j - j0, j1 - j0) if j1 != j0 else v0
            if v < line:
                return True
    if hull and j > hull[-1][0]:
        return False
    if hull and j < hull[0][0]:
        return False
    return False


def _lower_hull(pts):
    pts = sorted(pts)
    hull = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _transform(coeffs, mu, c, level):
    """Coefficients of P(t, t^mu (c + Y)) / t^level as a polynomial in Y."""
    d = len(coeffs) - 1
    out = [PuiseuxSeries.zero() for _ in range(d + 1)]
    one = Fraction(1) if isinstance(c, Fraction) else 1.0
    for j, f in enumerate(coeffs):
        if f.is_zero():
            continue
        shifted = f.shift(j * mu - level)
        # (c + Y)^j contributes C(j, i) c^(j-i) to Y^i
        for i in range(j + 1):
            factor = comb(j, i) * (c ** (j - i) if j > i else one)
            out[i] = out[i] + shifted.scale(factor)
    return out


# -- edge polynomial roots ----------------------------------------------------


def _edge_roots(edge, mode):
    """Real nonzero roots (value, multiplicity) of sum a_k z^k from edge data."""
    deg = max(k for k, _ in edge)
    poly = [Fraction(0) if mode == "exact" else 0.0] * (deg + 1)
    for k, a in edge:
        poly[k] = poly[k] + a
    if mode == "exact":
        return _rational_roots(poly)
    return [(r, 1) for r in _float_roots(poly)]


def _rational_roots(poly):
    """All real roots of a rational polynomial, or IrrationalBranch.

    Rational candidates come from divisor search on the primitive integer
    form of the squarefree part; a Sturm count certifies that no irrational
    real root was missed.
    """
    sf = _squarefree(poly)
    cands = set(_candidates(_to_primitive_int(sf)))
    if sf[0] == 0:
        cands.add(Fraction(0))
    found = [cand for cand in sorted(cands) if _poly_eval_q(sf, cand) == 0]
    real_count = _sturm_count(sf)
    if real_count > len(found):
        raise IrrationalBranch(
            "edge equation has an irrational real root; rerun in numeric mode"
        )
    out = []
    for r in sorted(found):
        mult = 0
        rem = poly
        while True:
            q, ok = _poly_divide_linear(rem, r)
            if not ok:
                break
            mult += 1
            rem = q
        out.append((r, mult))
    return out


def _squarefree(poly):
    d = _poly_derivative(poly)
    g = _poly_gcd(poly, d)
    if len(g) == 1:
        return poly
    q, _r = _poly_divmod(poly, g)
    return q


def _poly_derivative(p):
    return [c * k for k, c in enumerate(p)][1:] or [Fraction(0)]


def _poly_norm(p):
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _poly_divmod(a, b):
    a = list(a)
    b = _poly_norm(list(b))
    if b == [0]:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and _poly_norm(a) != [0]:
        a = _poly_norm(a)
        if len(a) < len(b):
            break
        shift = len(a) - len(b)
        factor = a[-1] / b[-1]
        q[shift] = factor
        for i, c in enumerate(b):
            a[shift + i] -= factor * c
        a = a[:-1]
    return _poly_norm(q), _poly_norm(a if a else [Fraction(0)])

def _poly_gcd(a, b):
    a, b = _poly_norm(list(a)), _poly_norm(list(b))
    while b != [0]:
        _q, r = _poly_divmod(a, b)
        a, b = b, r
    if a[-1] != 0:
        a = [c / a[-1] for c in a]
    return a


def _poly_eval_q(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_divide_linear(p, r):
    """Synthetic division by (z - r); returns (quotient, divides_exactly)."""
    q = [Fraction(0)] * (len(p) - 1)
    acc = Fraction(0)
    for k in range(len(p) - 1, 0, -1):
        acc = acc * r + p[k]
        q[k - 1] = acc
    rem = acc * r + p[0]
    if rem != 0:
        return p, False
    return q, True


def _to_primitive_int(p):
    den = 1
    for c in p:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, abs(c))
    if g > 1:
        ints = [c // g for c in ints]
    return ints


def _candidates(ints):
    ints = [c for c in ints]
    while ints and ints[0] == 0:
        ints.pop(0)
    if not ints or len(ints) == 1:
        return []
    a0, ad = abs(ints[0]), abs(ints[-1])
    if a0 > _ROOT_SEARCH_LIMIT or ad > _ROOT_SEARCH_LIMIT:
        raise IrrationalBranch("edge equation coefficients too large for exact search")
    nums = _divisors(a0)
    dens = _divisors(ad)
    seen = set()
    for p in nums:
        for q in dens:
            for s in (1, -1):
                c = Fraction(s * p, q)
                if c not in seen:
                    seen.add(c)
    return sorted(seen)


def _divisors(n):
    if n == 0:
        return [1]
    out = set()
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.add(i)
            out.add(n // i)
        i += 1
    return sorted(out)


def _sturm_count(p):
    """Number of distinct real roots of a squarefree rational polynomial."""
    p = _poly_norm([Fraction(c) for c in p])
    if len(p) <= 1:
        return 0
    chain = [p, _poly_norm(_poly_derivative(p))]
    while chain[-1] != [0] and len(chain[-1]) > 1:
        _q, r = _poly_divmod(chain[-2], chain[-1])
        chain.append([-c for c in r])
    if chain[-1] == [0]:
        chain.pop()

    def signs_at_inf(sign):
        # sign of the polynomial at +/- infinity from its leading term
        out = []
        for q in chain:
            lead = q[-1]
            parity = 1 if (len(q) - 1) % 2 == 0 else sign
            s = lead * parity
            out.append(1 if s > 0 else (-1 if s < 0 else 0))
        return out

    def variations(seq):
        seq = [s for s in seq if s != 0]
        return sum(1 for a, b in zip(seq, seq[1:]) if a * b < 0)

    return variations(signs_at_inf(-1)) - variations(signs_at_inf(1))


def _float_roots(poly):
    """Real roots of a float polynomial: sign-change scan plus bisection."""
    p = [float(c) for c in poly]
    while len(p) > 1 and p[-1] == 0.0:
        p.pop()
    if len(p) <= 1:
        return []

    def ev(x):
        acc = 0.0
        for c in reversed(p):
            acc = acc * x + c
        return acc

    bound = 1.0 + max(abs(c) for c in p[:-1]) / abs(p[-1])
    n = 4096
    xs = [-bound + 2 * bound * i / n for i in range(n + 1)]
    roots = []
    prev = ev(xs[0])
    for x0, x1 in zip(xs, xs[1:]):
        cur = ev(x1)
        if prev == 0.0:
            roots.append(x0)
        elif prev * cur < 0:
            lo, hi = x0, x1
            flo = prev
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                fm = ev(mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if flo * fm < 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            roots.append(0.5 * (lo + hi))
        prev = cur
    if prev == 0.0:
        roots.append(xs[-1])
    return [r for r in roots if r != 0.0]


# -- helpers shared with numeric mode ------------------------------------------


def _float_series(f: PuiseuxSeries) -> PuiseuxSeries:
    return PuiseuxSeries(
        tuple((e, float(c)) for e, c in f.terms), trunc=f.trunc, ram=f.ram
    )


def _series_at(f: PuiseuxSeries, t0: float) -> float:
    return sum(float(c) * t0 ** float(e) for e, c in f.terms)


# -- the real-closedness witnesses ---------------------------------------------


def rc_witness_odd(P: PolyOverSeries, target, mode: str = "exact") -> RootBranch:
    """One real root branch of an odd-degree polynomial.

    Prefers a branch of odd multiplicity (a genuine sign crossing).
    """
    if P.degree % 2 == 0:
        raise ValueError(f"degree {P.degree} is not odd")
    branches = np_roots(P, target, mode=mode)
    for b in branches:
        if b.multiplicity % 2 == 1:
            return b
    if branches:
        return branches[0]
    raise NoRealBranch("odd-degree polynomial yielded no real branch")


def sqrt_positive(f: PuiseuxSeries, target, mode: str = "exact") -> PuiseuxSeries:
    """Square root of a positive series; result is the positive branch.

    Positivity in the field order means a positive leading coefficient.
    """
    lead = f.lead()
    if lead is None or lead[1] <= 0:
        raise NotPositive("series is not positive in the field order")
    g = _float_series(f) if mode == "numeric" else f
    return g.pow_rational(Fraction(1, 2), order=Fraction(target))

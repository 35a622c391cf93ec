"""Two topologies on arc space, with continuity and modulus probes.

t-adic closeness of two arcs is the valuation of their difference (bigger is
closer); it is reported on the exponent lattice, never converted to a real
number.  Product-topology convergence of a parametric family is
coefficientwise and is decided exactly on ParamSeries data.

The probes are sampled, seeded and deterministic: trial i draws from a
generator seeded with seed XOR i, so runs are reproducible and trials could
be distributed without changing the report.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import (
    ArcFieldError,
    CounterexampleFound,
    DegenerateData,
    GuardViolation,
)
from .mapexpr import MapExpr, eval_map_float, eval_map_series
from .param_series import DivergenceWitness, ParamSeries, divergence_witness
from .puiseux import (
    DIVERGES,
    PuiseuxSeries,
    ZeroUpToTruncation,
    arc_sub,
    render_series,
)
from .transport import solve_preimage_arc


def tadic_ord_dist(gamma: Sequence, delta: Sequence):
    """Valuation of gamma - delta: min over components of ord(difference).

    Returns an exponent, or ZeroUpToTruncation(None) when the arcs agree
    exactly, or ZeroUpToTruncation(bound) when they agree on all known
    coefficients below ``bound``.
    """
    diffs = arc_sub(tuple(gamma), tuple(delta))
    known = []
    bounds = []
    exact = True
    for d in diffs:
        lead = d.lead()
        if lead is not None:
            known.append(lead[0])
            exact = False
        elif not d.is_zero():
            bounds.append(d.trunc)
            exact = False
    if exact:
        return ZeroUpToTruncation(None)
    if known and (not bounds or min(known) <= min(bounds)):
        return min(known)
    return ZeroUpToTruncation(min(bounds) if bounds else None)


@dataclass(frozen=True)
class ProductLimit:
    """Outcome of the coefficientwise limit of a parametric family."""

    converged: bool
    limit: Optional[tuple]  # arc of PuiseuxSeries when converged
    component: Optional[int] = None
    witness: Optional[DivergenceWitness] = None


def product_topology_limit(family: Sequence[ParamSeries]) -> ProductLimit:
    """Limit of an arc family as the parameter goes to 0, or its divergence.

    Divergence means some finite t-order coefficient is unbounded, i.e.
    carries a negative parameter power; the witness records the lowest one.
    """
    for i, comp in enumerate(family):
        w = divergence_witness(comp)
        if w is not None:
            return ProductLimit(False, None, component=i, witness=w)
    return ProductLimit(True, tuple(comp.eps_limit() for comp in family))


# -- arc sampling ---------------------------------------------------------------


@dataclass(frozen=True)
class ArcSamplerSpec:
    """Distribution of random Puiseux polynomial arcs based at 0.

    Exponents live in {k/q : k <= max_exp_num * q, q <= max_den}, coefficients
    are small rationals of height at most coeff_height; ``min_lead_exp`` sets
    a per-component floor on the leading exponent (default 1 everywhere) and
    ``unit_lead``/``positive_lead`` tame the leading coefficient for maps that
    take exact roots of it.
    """

    dim: int = 1
    max_exp_num: int = 8
    max_den: int = 4
    coeff_height: int = 10
    max_terms: int = 3
    unit_lead: bool = False
    positive_lead: bool = False
    min_lead_exp: tuple = ()

    def floor_exp(self, i: int) -> Fraction:
        if self.min_lead_exp and i < len(self.min_lead_exp):
            return Fraction(self.min_lead_exp[i])
        return Fraction(1)


def sample_series(rng: random.Random, spec: ArcSamplerSpec, comp: int) -> PuiseuxSeries:
    q = rng.randint(1, spec.max_den)
    lo = spec.floor_exp(comp)
    start = max(math.ceil(lo * q), 0 if lo <= 0 else 1)
    lattice = [
        Fraction(k, q)
        for k in range(start, spec.max_exp_num * q + 1)
        if Fraction(k, q) >= lo
    ]
    if not lattice:
        lattice = [lo]
    count = min(rng.randint(1, spec.max_terms), len(lattice))
    exps = sorted(rng.sample(lattice, count))
    terms = []
    for j, e in enumerate(exps):
        if j == 0 and spec.unit_lead:
            c = Fraction(1 if spec.positive_lead else rng.choice((1, -1)))
        else:
            num = 0
            while num == 0:
                num = rng.randint(-spec.coeff_height, spec.coeff_height)
            c = Fraction(num, rng.randint(1, 4))
            if j == 0 and spec.positive_lead:
                c = abs(c)
        terms.append((e, c))
    return PuiseuxSeries(terms)


def sample_arc(rng: random.Random, spec: ArcSamplerSpec) -> tuple:
    return tuple(sample_series(rng, spec, i) for i in range(spec.dim))


def canonical_pair(spec: ArcSamplerSpec) -> tuple:
    """The fixed first pair: plain monomial arc and its sign flip."""
    gamma = tuple(
        PuiseuxSeries.t_power(spec.floor_exp(i)) for i in range(spec.dim)
    )
    delta = tuple(-s for s in gamma)
    return gamma, delta


def sample_pair(rng: random.Random, spec: ArcSamplerSpec) -> tuple:
    """A pair of nearby-or-not arcs: sign flip, small perturbation, or fresh."""
    gamma = sample_arc(rng, spec)
    mode = rng.randrange(3)
    if mode == 0:
        delta = tuple(-s for s in gamma)
    elif mode == 1:
        comp = rng.randrange(spec.dim)
        bump_exp = Fraction(spec.max_exp_num + rng.randint(1, 4))
        num = 0
        while num == 0:
            num = rng.randint(-spec.coeff_height, spec.coeff_height)
        bump = PuiseuxSeries.t_power(bump_exp, Fraction(num))
        delta = tuple(
            s + bump if i == comp else s for i, s in enumerate(gamma)
        )
    else:
        delta = sample_arc(rng, spec)
    return gamma, delta


# -- Hoelder probe ----------------------------------------------------------------


@dataclass(frozen=True)
class HolderEstimate:
    """Largest feasible exponent for ord(h(g) - h(d)) >= alpha ord(g - d) + offset."""

    alpha: Fraction
    constant_offset: Fraction
    sample_count: int
    discarded: int
    worst_pair: Tuple[str, str]


def best_rational_below(x: Fraction, max_den: int) -> Fraction:
    """Largest rational with denominator <= max_den that is <= x."""
    best = None
    for q in range(1, max_den + 1):
        cand = Fraction(math.floor(x * q), q)
        if best is None or cand > best:
            best = cand
    return best


def holder_probe(
    h: MapExpr,
    spec: ArcSamplerSpec,
    trials: int = 100,
    seed: int = 0,
    order=None,
    alpha_max_den: int = 24,
) -> HolderEstimate:
    """Fit the largest ord-inequality exponent over seeded arc pairs.

    Pairs whose images cannot be evaluated (root guards) or whose image
    difference does not resolve at the working order are discarded and
    counted, not fatal.  alpha is searched over rationals in (0, 1] with
    bounded denominator; the offset is the worst slack at that alpha, so it
    is nonnegative by construction.
    """
    if order is None:
        order = Fraction(spec.max_exp_num + 8)
    ratios = []  # (D/d, d, D, pair)
    discarded = 0
    produced = 0
    i = 0
    max_attempts = 50 * trials + 10
    attempts = 0
    while produced < trials and attempts < max_attempts:
        attempts += 1
        if i == 0:
            gamma, delta = canonical_pair(spec)
        else:
            rng = random.Random(seed ^ i)
            gamma, delta = sample_pair(rng, spec)
        i += 1
        d = tadic_ord_dist(gamma, delta)
        if isinstance(d, ZeroUpToTruncation):
            continue  # identical arcs carry no constraint
        try:
            hg = eval_map_series(h, gamma, order=order)
            hd = eval_map_series(h, delta, order=order)
        except ArcFieldError:
            discarded += 1
            continue
        img = tadic_ord_dist(hg, hd)
        if isinstance(img, ZeroUpToTruncation):
            if img.trunc is None:
                produced += 1  # equal images: no constraint, infinite ratio
                continue
            discarded += 1
            continue
        produced += 1
        ratios.append((Fraction(img) / d, d, img, (gamma, delta)))
    if produced < trials:
        raise DegenerateData(
            f"could only evaluate {produced} of {trials} pairs (discarded {discarded})"
        )
    if not ratios:
        return HolderEstimate(Fraction(1), Fraction(0), produced, discarded, ("", ""))
    worst = min(ratios, key=lambda r: r[0])
    cap = min(Fraction(1), worst[0])
    alpha = max(Fraction(0), best_rational_below(cap, alpha_max_den))
    offset = min(D - alpha * d for _r, d, D, _p in ratios)
    g, dta = worst[3]
    rendered = (
        "(" + ", ".join(render_series(s) for s in g) + ")",
        "(" + ", ".join(render_series(s) for s in dta) + ")",
    )
    return HolderEstimate(alpha, offset, produced, discarded, rendered)


# -- power-law lower bound fitting -------------------------------------------------


@dataclass(frozen=True)
class LojaFit:
    """Fitted c, r with phi2 >= c * phi1^r - max_violation on samples."""

    c: float
    r: float
    max_violation: float
    fit_samples: int
    validation_samples: int


def _sample_box(rng: random.Random, box: Sequence[Tuple[float, float]]):
    return tuple(rng.uniform(lo, hi) for lo, hi in box)


def loja_fit(
    phi1: MapExpr,
    phi2: MapExpr,
    box: Sequence[Tuple[float, float]],
    samples: int = 200,
    seed: int = 0,
    tolerance: float = 1e-9,
) -> LojaFit:
    """Least-squares power law phi2 >= c phi1^r on a box, then shrink c.

    Map outputs are taken in absolute value (the probes compare magnitudes).
    The fit uses samples with phi1 > 0 and phi2 > 0; c is then shrunk so no
    fitted sample violates the bound, and the fit is re-validated on a fresh
    seeded sample set, whose worst violation is reported.
    """
    rng = random.Random(seed)
    pts = [_sample_box(rng, box) for _ in range(samples)]

    def values(points):
        out = []
        for p in points:
            try:
                a = abs(eval_map_float(phi1, p)[0])
                b = abs(eval_map_float(phi2, p)[0])
            except GuardViolation:
                continue
            if a > 0.0:
                out.append((a, b))
        return out

    fit_vals = [(a, b) for a, b in values(pts) if b > 0.0]
    if len(fit_vals) < 2:
        raise DegenerateData("not enough samples with phi1 > 0 for a power-law fit")
    logs = [(math.log(a), math.log(b)) for a, b in fit_vals]
    n = len(logs)
    sx = sum(x for x, _ in logs)
    sy = sum(y for _, y in logs)
    sxx = sum(x * x for x, _ in logs)
    sxy = sum(x * y for x, y in logs)
    denom = n * sxx - sx * sx
    if denom == 0.0:
        raise DegenerateData("degenerate sample spread for the power-law fit")
    r = (n * sxy - sx * sy) / denom
    intercept = (sy - r * sx) / n
    c = math.exp(intercept)
    # shrink c until no fitted sample violates the lower bound
    for a, b in fit_vals:
        bound = b / a**r if a**r > 0 else c
        if c > bound:
            c = bound
    rng2 = random.Random(seed + 1)
    fresh = values(_sample_box(rng2, box) for _ in range(samples))
    worst = 0.0
    for a, b in list(fit_vals) + fresh:
        v = c * a**r - b
        if v > worst:
            worst = v
    return LojaFit(c, r, worst, len(fit_vals), len(fresh))


# -- uniform modulus -----------------------------------------------------------------


def uniform_modulus_probe(
    h: MapExpr,
    box: Sequence[Tuple[float, float]],
    epsilon: float,
    grid_step: float,
) -> float:
    """Grid estimate of inf over x of the pointwise modulus of continuity.

    For each grid point x, the modulus is the smallest distance to a grid
    point a with |h(x) - h(a)| >= epsilon (capped at 1).  Continuity on the
    closed box makes the infimum positive.
    """
    grids = []
    for lo, hi in box:
        n = max(1, round((hi - lo) / grid_step))
        grids.append([lo + (hi - lo) * i / n for i in range(n + 1)])
    points: List[tuple] = [()]
    for axis in grids:
        points = [p + (x,) for p in points for x in axis]
    values = [eval_map_float(h, p) for p in points]
    order = sorted(range(len(points)), key=lambda k: points[k])
    best = 1.0
    if len(box) == 1:
        # sorted sweep: stop scanning past the current best distance
        for a in range(len(order)):
            ia = order[a]
            for b in range(a + 1, len(order)):
                ib = order[b]
                dx = abs(points[ib][0] - points[ia][0])
                if dx >= best:
                    break
                dv = _norm_diff(values[ia], values[ib])
                if dv >= epsilon:
                    best = dx
                    break
        return best
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            dx = _dist(points[a], points[b])
            if dx >= best:
                continue
            if _norm_diff(values[a], values[b]) >= epsilon:
                best = dx
    return best


def _norm_diff(u, v) -> float:
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(u, v)))


def _dist(p, q) -> float:
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))


# -- transfer checks -------------------------------------------------------------------


@dataclass(frozen=True)
class TransferReport:
    kind: str
    trials: int
    status: str  # "pass"
    detail: str = ""


def transfer_check(
    kind: str,
    h: Optional[MapExpr],
    spec: ArcSamplerSpec,
    trials: int = 100,
    seed: int = 0,
    target=None,
    order=None,
    mode: str = "exact",
) -> TransferReport:
    """Sampled transfer of injectivity / surjectivity / limit additivity.

    ``injective``: distinct sampled arcs must have distinguishable images;
    a pair with equal images raises CounterexampleFound carrying it.
    ``surjective``: sampled arcs of the image (pushforwards of random source
    arcs) must admit certified preimage arcs.  ``limit_additive``: arc limits
    at 0+ add, whenever both exist.
    """
    if order is None:
        order = Fraction(spec.max_exp_num + 8)
    if target is None:
        target = Fraction(spec.max_exp_num + 2)
    if kind == "injective":
        return _check_injective(h, spec, trials, seed, order)
    if kind == "surjective":
        return _check_surjective(h, spec, trials, seed, target, mode)
    if kind == "limit_additive":
        return _check_limit_additive(spec, trials, seed)
    raise ValueError(f"unknown transfer kind {kind!r}")


def _check_injective(h, spec, trials, seed, order):
    produced = 0
    i = 0
    attempts = 0
    while produced < trials and attempts < 50 * trials + 10:
        attempts += 1
        if i == 0:
            gamma, delta = canonical_pair(spec)
        else:
            rng = random.Random(seed ^ i)
            gamma, delta = sample_pair(rng, spec)
        i += 1
        d = tadic_ord_dist(gamma, delta)
        if isinstance(d, ZeroUpToTruncation):
            continue  # not distinguishably distinct
        try:
            hg = eval_map_series(h, gamma, order=order)
            hd = eval_map_series(h, delta, order=order)
        except ArcFieldError:
            continue
        produced += 1
        img = tadic_ord_dist(hg, hd)
        if isinstance(img, ZeroUpToTruncation) and img.trunc is None:
            witness = (
                tuple(render_series(s) for s in gamma),
                tuple(render_series(s) for s in delta),
            )
            raise CounterexampleFound("injective", witness)
    return TransferReport("injective", produced, "pass")


def _check_surjective(h, spec, trials, seed, target, mode):
    produced = 0
    i = 0
    attempts = 0
    while produced < trials and attempts < 50 * trials + 10:
        attempts += 1
        rng = random.Random(seed ^ i)
        i += 1
        source = sample_arc(rng, spec)
        try:
            gamma = eval_map_series(h, source, order=Fraction(target) + 2)
        except ArcFieldError:
            continue
        delta = solve_preimage_arc(h, gamma, target, mode=mode)
        image = eval_map_series(h, delta, order=Fraction(target) + 2)
        for got, want in zip(image, gamma):
            lb = (got - want).ord_lower_bound()
            if lb is not None and lb < target:
                raise CounterexampleFound(
                    "surjective", tuple(render_series(s) for s in gamma)
                )
        produced += 1
    return TransferReport("surjective", produced, "pass")


def bounded_image_spot_check(
    h: MapExpr,
    box: Sequence[Tuple[float, float]],
    bound: float,
    spec: ArcSamplerSpec,
    trials: int = 50,
    seed: int = 0,
) -> TransferReport:
    """Bounded maps send arcs based in the box to arcs with bounded limits.

    Samples arcs whose components have order >= 0 and limits inside the box,
    pushes them forward, and asserts every image component again has order
    >= 0 with its limit within ``bound``.  A violating arc raises
    CounterexampleFound.
    """
    import dataclasses

    based = dataclasses.replace(
        spec, min_lead_exp=tuple(Fraction(0) for _ in range(spec.dim))
    )
    produced = 0
    i = 0
    while produced < trials and i < 50 * trials + 10:
        rng = random.Random(seed ^ i)
        i += 1
        gamma = sample_arc(rng, based)
        limits = [c.limit0() for c in gamma]
        if any(lim is DIVERGES for lim in limits):
            continue
        if any(not (lo <= float(lim) <= hi) for lim, (lo, hi) in zip(limits, box)):
            continue
        try:
            image = eval_map_series(h, gamma, order=Fraction(spec.max_exp_num + 4))
        except ArcFieldError:
            continue
        produced += 1
        for comp in image:
            lead = comp.lead()
            if lead is not None and lead[0] < 0:
                raise CounterexampleFound(
                    "bounded", tuple(render_series(s) for s in gamma)
                )
            value = comp.limit0()
            if value is DIVERGES or abs(float(value)) > bound:
                raise CounterexampleFound(
                    "bounded", tuple(render_series(s) for s in gamma)
                )
    return TransferReport("bounded", produced, "pass")


def _check_limit_additive(spec, trials, seed):
    zero_floor = ArcSamplerSpec(
        dim=spec.dim,
        max_exp_num=spec.max_exp_num,
        max_den=spec.max_den,
        coeff_height=spec.coeff_height,
        max_terms=spec.max_terms,
        min_lead_exp=tuple(Fraction(0) for _ in range(spec.dim)),
    )
    for i in range(trials):
        rng = random.Random(seed ^ i)
        gamma = sample_arc(rng, zero_floor)
        delta = sample_arc(rng, zero_floor)
        for a, b in zip(gamma, delta):
            la, lb = a.limit0(), b.limit0()
            if la is DIVERGES or lb is DIVERGES:
                continue
            ls = (a + b).limit0()
            if ls is DIVERGES or ls != la + lb:
                raise CounterexampleFound(
                    "limit_additive", (render_series(a), render_series(b))
                )
    return TransferReport("limit_additive", trials, "pass")

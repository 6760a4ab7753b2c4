"""Limiting cumulant function of weighted spacing sums and its transform.

For a weight w with bounded ratio h(x) = w(x)/(1-x) and rate lam,

    L(theta) = int_0^1 log(lam / (lam - theta h(x))) dx

is finite on [theta_min, theta_max] with theta_max = lam / sup h (when
sup h > 0) and theta_min = lam / inf h (when inf h < 0).  This module
computes L, its first two derivatives, the Legendre transform L*, the
asymptotic mean/variance, a relative-entropy upper bound for L* and the
Jensen lower bound for the asymptotic variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ._optim import bisect_increasing
from .errors import (
    ConditionError,
    DivergenceError,
    DomainError,
    PositivityError,
    QuadratureError,
    ValidationError,
)
from .integrate import grid_points, quad_or_inf, quad_tol
from .weights import WeightFunction, check_condition2

__all__ = [
    "RateEngine",
    "MomentSummary",
    "SteepnessReport",
    "build_engine",
    "lambda_w",
    "lambda_w_prime",
    "lambda_w_second",
    "check_steepness",
    "mu_w",
    "sigma2_w",
    "gamma_w",
    "lyapunov_integral",
    "moment_summary",
    "legendre",
    "legendre_solve",
    "relative_entropy_exp",
    "m_upper_bound",
    "m_minimizer",
    "jensen_lower_bound",
]


@dataclass(frozen=True)
class RateEngine:
    """Weight + rate with cached domain endpoints and h extrema."""

    wf: WeightFunction
    lam: float
    sup_h: float
    inf_h: float
    theta_min: float
    theta_max: float
    argmax_h: Optional[float]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)


@dataclass(frozen=True)
class MomentSummary:
    mu: float
    sigma2: float
    gamma: float
    lyapunov: float


@dataclass(frozen=True)
class SteepnessReport:
    steep: bool
    boundary_slope: float
    thetas: List[float]
    slopes: List[float]


def build_engine(wf: WeightFunction, lam: float) -> RateEngine:
    if lam <= 0.0:
        raise ValidationError(f"lambda must be positive, got {lam}")
    rec = check_condition2(wf, lam)
    if not rec.holds:
        raise ConditionError(
            f"weight {wf.name!r} has unbounded spacing ratio h; the limiting "
            "cumulant function is infinite off the origin"
        )
    theta_max = lam / rec.sup_h if rec.sup_h > 0.0 else math.inf
    theta_min = lam / rec.inf_h if rec.inf_h < 0.0 else -math.inf
    return RateEngine(
        wf=wf,
        lam=lam,
        sup_h=rec.sup_h,
        inf_h=rec.inf_h,
        theta_min=theta_min,
        theta_max=theta_max,
        argmax_h=rec.argmax,
    )


def _h_scalar(engine: RateEngine):
    # direct family evaluator, skipping the domain checks of eval_h;
    # quadrature nodes are strictly interior to [0, 1]
    hf = engine.wf._h
    return lambda x: float(hf(x))


def _singular_points(engine: RateEngine, theta: float):
    # at the upper domain endpoint the integrand can be singular where h
    # attains its sup; tell QUADPACK when that point is interior
    if theta == engine.theta_max and engine.argmax_h is not None:
        x = engine.argmax_h
        if 1e-12 < x < 1.0 - 1e-12:
            return [x]
    return None


def lambda_w(engine: RateEngine, theta: float) -> float:
    """L(theta); +inf outside the domain or when the boundary integral
    diverges."""
    if theta == 0.0:
        return 0.0
    if theta > engine.theta_max or theta < engine.theta_min:
        return math.inf
    lam = engine.lam
    h = _h_scalar(engine)

    def f(x):
        den = lam - theta * h(x)
        if den <= 0.0:
            return math.inf
        return math.log(lam / den)

    return quad_or_inf(f, points=_singular_points(engine, theta))


def lambda_w_prime(engine: RateEngine, theta: float) -> float:
    """L'(theta) = int h / (lam - theta h) dx; +inf when divergent."""
    if theta > engine.theta_max or theta < engine.theta_min:
        return math.inf
    lam = engine.lam
    h = _h_scalar(engine)

    def f(x):
        hv = h(x)
        den = lam - theta * hv
        if den <= 0.0:
            return math.inf
        return hv / den

    return quad_or_inf(f, points=_singular_points(engine, theta))


def lambda_w_second(engine: RateEngine, theta: float) -> float:
    """L''(theta) = int h^2 / (lam - theta h)^2 dx; +inf when divergent."""
    if theta > engine.theta_max or theta < engine.theta_min:
        return math.inf
    lam = engine.lam
    h = _h_scalar(engine)

    def f(x):
        hv = h(x)
        den = lam - theta * hv
        if den <= 0.0:
            return math.inf
        return (hv / den) ** 2

    return quad_or_inf(f, points=_singular_points(engine, theta), nonnegative=True)


def check_steepness(engine: RateEngine) -> SteepnessReport:
    """Probe L' along a geometric approach to theta_max.

    Steep means L' diverges at the boundary (needed for the smoothness
    hypothesis of the deviation principle); otherwise the finite boundary
    slope is reported.  The probe sequence is logged in the report.
    """
    if "steepness" in engine._cache:
        return engine._cache["steepness"]
    if not math.isfinite(engine.theta_max):
        rep = SteepnessReport(True, math.inf, [], [])
        engine._cache["steepness"] = rep
        return rep
    tmax = engine.theta_max
    thetas: List[float] = []
    slopes: List[float] = []
    rep = None
    for j in range(1, 46):
        th = tmax * (1.0 - 2.0 ** -j)
        v = lambda_w_prime(engine, th)
        thetas.append(th)
        slopes.append(v)
        if not math.isfinite(v) or v > 1e6:
            rep = SteepnessReport(True, math.inf, thetas, slopes)
            break
        if j >= 3 and abs(slopes[-1] - slopes[-2]) <= max(1e-9, 1e-6 * abs(v)):
            rep = SteepnessReport(False, v, thetas, slopes)
            break
    if rep is None:
        # still drifting after 45 halvings: divergence slower than geometric
        rep = SteepnessReport(True, math.inf, thetas, slopes)
    engine._cache["steepness"] = rep
    return rep


def mu_w(engine: RateEngine) -> float:
    """Asymptotic mean (1/lam) int h dx."""
    if "mu" not in engine._cache:
        h = _h_scalar(engine)
        val, _ = quad_tol(h)
        engine._cache["mu"] = val / engine.lam
    return engine._cache["mu"]


def gamma_w(engine: RateEngine) -> float:
    return engine.lam * mu_w(engine)


def sigma2_w(engine: RateEngine) -> float:
    """Asymptotic variance (1/lam^2) int h^2 dx."""
    if "sigma2" not in engine._cache:
        h = _h_scalar(engine)
        val, _ = quad_tol(lambda x: h(x) ** 2)
        engine._cache["sigma2"] = val / engine.lam**2
    return engine._cache["sigma2"]


def lyapunov_integral(wf: WeightFunction) -> float:
    """int |w|^3 / (1-x)^3 dx; finite iff the regularity exponent beats 2/3.

    Computable without the bounded-ratio condition, so it can reject weights
    before any engine is built.
    """

    def f(x):
        if x >= 1.0:
            return math.inf
        return (abs(float(wf.w(x))) / (1.0 - x)) ** 3

    return quad_or_inf(f, nonnegative=True)


def moment_summary(engine: RateEngine) -> MomentSummary:
    return MomentSummary(
        mu=mu_w(engine),
        sigma2=sigma2_w(engine),
        gamma=gamma_w(engine),
        lyapunov=lyapunov_integral(engine.wf),
    )


def legendre_solve(engine: RateEngine, y: float):
    """Legendre transform L*(y) = sup_theta {theta y - L(theta)}.

    Returns (value, theta_star, at_boundary).  theta_star is the interior
    maximizer when the sup is attained inside the domain; at the boundary
    of a non-steep domain the sup sits at the endpoint itself.
    """
    mu = mu_w(engine)
    if engine.inf_h >= 0.0 and y <= 0.0:
        return math.inf, None, False

    def slope(th):
        return lambda_w_prime(engine, th)

    if y >= mu:
        lo, hi = 0.0, None
        if math.isfinite(engine.theta_max):
            tmax = engine.theta_max
            prev = 0.0
            for j in range(1, 46):
                th = tmax * (1.0 - 2.0 ** -j)
                v = slope(th)
                if v >= y:
                    lo, hi = prev, th
                    break
                prev = th
            if hi is None:
                # beyond the (finite) boundary slope: sup attained at tmax
                val = tmax * y - lambda_w(engine, tmax)
                return val, tmax, True
        else:
            th = 1.0
            for _ in range(80):
                if slope(th) >= y:
                    hi = th
                    break
                lo = th
                th *= 2.0
            if hi is None:
                return math.inf, None, False
    else:
        lo, hi = None, 0.0
        if math.isfinite(engine.theta_min):
            tmin = engine.theta_min
            prev = 0.0
            for j in range(1, 46):
                th = tmin * (1.0 - 2.0 ** -j)
                v = slope(th)
                if v <= y:
                    lo, hi = th, prev
                    break
                prev = th
            if lo is None:
                val = tmin * y - lambda_w(engine, tmin)
                return val, tmin, True
        else:
            th = -1.0
            for _ in range(80):
                if slope(th) <= y:
                    lo = th
                    break
                hi = th
                th *= 2.0
            if lo is None:
                return math.inf, None, False
    theta_star = bisect_increasing(slope, lo, hi, y, xtol=1e-12)
    val = theta_star * y - lambda_w(engine, theta_star)
    return max(val, 0.0), theta_star, False


def legendre(engine: RateEngine, y: float) -> float:
    return legendre_solve(engine, y)[0]


def relative_entropy_exp(lam1: float, lam2: float) -> float:
    """Relative entropy of an exponential at rate lam1 with respect to one
    at rate lam2: lam2/lam1 - 1 - log(lam2/lam1)."""
    if lam1 <= 0.0 or lam2 <= 0.0:
        raise DomainError(f"rates must be positive, got ({lam1}, {lam2})")
    r = lam2 / lam1
    return r - 1.0 - math.log(r)


def _check_h_positive(engine: RateEngine):
    xs = grid_points()
    hv = np.asarray(engine.wf._h(xs), dtype=np.float64)
    if not np.all(hv > 0.0):
        bad = float(xs[int(np.argmin(hv))])
        raise PositivityError(
            f"h of weight {engine.wf.name!r} is not positive on the grid "
            f"(e.g. at x = {bad:.6g})"
        )


def _reciprocal_integrals(engine: RateEngine):
    if "recip" not in engine._cache:
        _check_h_positive(engine)
        h = _h_scalar(engine)

        def recip(x):
            hv = h(x)
            return math.inf if hv <= 0.0 else 1.0 / hv

        def log_h(x):
            hv = h(x)
            return -math.inf if hv <= 0.0 else math.log(hv)

        i1 = quad_or_inf(recip, nonnegative=True)
        i2 = quad_or_inf(log_h, sign=-1.0)
        engine._cache["recip"] = (i1, i2)
    return engine._cache["recip"]


def m_upper_bound(engine: RateEngine, y: float) -> float:
    """Entropy upper bound for L*: the integral over x of the relative
    entropy of an exponential with mean y with respect to one at rate
    lam / h(x).

    Infinite whenever int 1/h dx diverges (h decaying at x = 1), which is
    the case for every built-in family except those with h bounded away
    from zero.
    """
    if y <= 0.0:
        raise DomainError(f"entropy bound needs y > 0, got {y}")
    i1, i2 = _reciprocal_integrals(engine)
    if not math.isfinite(i1):
        return math.inf
    lam = engine.lam
    h = _h_scalar(engine)
    direct, _ = quad_tol(lambda x: relative_entropy_exp(1.0 / y, lam / h(x)))
    reduced = lam * y * i1 - 1.0 - math.log(lam * y) + i2
    if abs(direct - reduced) > 1e-8 * max(1.0, abs(direct)):
        raise QuadratureError(
            f"entropy bound cross-check failed: direct={direct!r} "
            f"reduced={reduced!r}"
        )
    return direct


def m_minimizer(engine: RateEngine) -> float:
    """Minimizing y of the entropy bound: 1 / (lam int 1/h dx)."""
    i1, _ = _reciprocal_integrals(engine)
    if not math.isfinite(i1):
        raise DivergenceError(
            f"int 1/h dx diverges for weight {engine.wf.name!r}; the entropy "
            "bound is identically infinite and has no minimizer"
        )
    return 1.0 / (engine.lam * i1)


def jensen_lower_bound(engine: RateEngine) -> float:
    """(gamma/lam)^2 lower bound for the asymptotic variance."""
    g = gamma_w(engine)
    return (g / engine.lam) ** 2

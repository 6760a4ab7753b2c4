"""Monte Carlo verification harnesses for the deviation theory.

verify_ldp estimates tail probabilities P(C_n >= y) by exponentially
tilted importance sampling at the Legendre maximizer theta* and compares
the empirical decay rate -(1/n) log p against the analytic rate L*(y).

verify_mdp does the same for the moderately scaled statistic
sqrt(n a_n)(C_n - E[C_n]) with a_n = n^{-rho}, whose decay at speed 1/a_n
has the quadratic rate y^2 / (2 sigma^2).

clt_check standardizes sqrt(n)(C_n - E[C_n]) and reports sample variance
and the Kolmogorov-Smirnov distance to the standard normal.

gz_mean / gz_variance evaluate the L-statistic mean and variance of a
score function J at the exponential parent through the reduced integrals
on (0, 1), and gz_equivalence_check compares them against the asymptotic
moments of the induced weight w(J; x) = int_x^1 J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy import stats as sp_stats

from ._optim import bisect_increasing
from .errors import ConditionError, QuadratureError, ValidationError
from .rate import (
    RateEngine,
    build_engine,
    legendre_solve,
    lyapunov_integral,
    mu_w,
    sigma2_w,
)
from .sampler import SimConfig, exact_mean_var, sample_cn, sample_cn_tilted, weight_vector
from .weights import ScoreFunction, WeightFunction, from_score

__all__ = [
    "MdpConfig",
    "LdpRow",
    "LdpReport",
    "MdpRow",
    "MdpReport",
    "CltReport",
    "BridgeReport",
    "verify_ldp",
    "verify_mdp",
    "clt_check",
    "gz_mean",
    "gz_variance",
    "gz_equivalence_check",
]

ESS_WARN_THRESHOLD = 50.0


@dataclass(frozen=True)
class MdpConfig:
    """Moderate-deviation scaling a_n = n^{-rho} with rho strictly in (0, 1),
    so a_n -> 0 and n a_n -> infinity."""

    rho: float
    n_list: Sequence[int]
    y_grid: Sequence[float]
    replicates: int
    seed: int

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValidationError(f"rho must lie strictly in (0, 1), got {self.rho}")
        if not self.n_list or any(int(n) < 1 for n in self.n_list):
            raise ValidationError("n_list must be nonempty positive integers")
        if self.replicates < 1:
            raise ValidationError("replicates must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class LdpRow:
    n: int
    y: float
    p_hat: float
    std_error: float
    emp_rate: float
    analytic_rate: float
    theta: float
    ess: float
    low_ess: bool


@dataclass(frozen=True)
class LdpReport:
    rows: List[LdpRow]


@dataclass(frozen=True)
class MdpRow:
    n: int
    y: float
    a_n: float
    p_hat: float
    std_error: float
    emp_rate: float  # -a_n log p_hat; +inf with zero_count when unseen
    analytic_rate: float  # y^2 / (2 sigma^2)
    theta: float
    ess: float
    zero_count: bool


@dataclass(frozen=True)
class MdpReport:
    rho: float
    sigma2: float
    rows: List[MdpRow]


@dataclass(frozen=True)
class CltReport:
    n: int
    replicates: int
    sample_var: float
    target_sigma2: float
    ks_distance: float


@dataclass(frozen=True)
class BridgeReport:
    m_gz: float
    mu_weight: float
    sigma2_gz: float
    sigma2_weight: float
    max_abs_gap: float


def _is_estimate(values: np.ndarray, log_weights: np.ndarray, hits: np.ndarray):
    """Importance-sampling mean of indicator * exp(log_weight), with its
    standard error and effective sample size, accumulated in a shifted
    log scale so extreme likelihood ratios never overflow."""
    m = values.size
    if not np.any(hits):
        return 0.0, 0.0, 0.0
    lw = log_weights[hits]
    shift = float(np.max(lw))
    scaled = np.zeros(m)
    scaled[hits] = np.exp(lw - shift)
    mean_scaled = float(np.sum(scaled)) / m
    var_scaled = float(np.sum((scaled - mean_scaled) ** 2)) / m
    p_hat = mean_scaled * math.exp(shift)
    se = math.sqrt(var_scaled / m) * math.exp(shift)
    total = float(np.sum(scaled))
    ess = total**2 / float(np.sum(scaled**2))
    return p_hat, se, ess


def _plain_estimate(hits: np.ndarray):
    m = hits.size
    p_hat = float(np.count_nonzero(hits)) / m
    se = math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / m)
    return p_hat, se, float(m)


def _ldp_tilt(engine: RateEngine, y: float):
    """Tilt parameter for the event {C_n >= y} (or <= y below the mean):
    the Legendre maximizer, pulled just inside the domain when the
    supremum sits on the boundary of a non-steep domain."""
    value, theta, at_boundary = legendre_solve(engine, y)
    if theta is None:
        raise ConditionError(
            f"rate function is infinite at y={y}; the event is not reachable "
            "by exponential tilting"
        )
    if at_boundary:
        theta = theta * (1.0 - 1e-6) if theta > 0 else theta * (1.0 + 1e-6)
    return value, float(theta), at_boundary


def verify_ldp(
    wf: WeightFunction,
    lam: float,
    y_grid: Sequence[float],
    n_list: Sequence[int],
    replicates: int,
    seed: int,
    backend: Optional[str] = None,
) -> LdpReport:
    """Tilted-IS estimates of half-line tail probabilities versus the
    Legendre rate, per (n, y)."""
    engine = build_engine(wf, lam)
    mu = mu_w(engine)
    rows: List[LdpRow] = []
    for n in n_list:
        n = int(n)
        for y in y_grid:
            y = float(y)
            analytic, theta, _ = _ldp_tilt(engine, y)
            upper = y >= mu
            if theta == 0.0:
                cfg = SimConfig(n=n, lam=lam, seed=seed, replicates=replicates)
                values = sample_cn(wf, cfg, backend=backend)
                hits = values >= y if upper else values <= y
                p_hat, se, ess = _plain_estimate(hits)
            else:
                cfg = SimConfig(
                    n=n, lam=lam, seed=seed, replicates=replicates, tilt_theta=theta
                )
                draws = sample_cn_tilted(wf, cfg, backend=backend)
                hits = draws.values >= y if upper else draws.values <= y
                p_hat, se, ess = _is_estimate(draws.values, draws.log_weights, hits)
            emp_rate = math.inf if p_hat <= 0.0 else -math.log(p_hat) / n
            rows.append(
                LdpRow(
                    n=n,
                    y=y,
                    p_hat=p_hat,
                    std_error=se,
                    emp_rate=emp_rate,
                    analytic_rate=analytic,
                    theta=theta,
                    ess=ess,
                    low_ess=ess < ESS_WARN_THRESHOLD,
                )
            )
    return LdpReport(rows=rows)


def _mdp_tilt(wf: WeightFunction, n: int, lam: float, target_mean: float) -> float:
    """Tilt theta whose tilted finite-n mean sum_k w_k/(lam(n-k) - n theta w_k)
    hits the target; the map is increasing in theta on the valid range."""
    wk = weight_vector(wf, n)
    base = lam * np.arange(n, 0, -1, dtype=np.float64)

    pos = wk > 0.0
    theta_cap = math.inf
    if np.any(pos):
        theta_cap = float(np.min(base[pos] / (n * wk[pos])))

    def tilted_mean(theta):
        den = base - n * theta * wk
        if np.any(den <= 0.0):
            return math.inf
        return float(np.sum(wk / den))

    if tilted_mean(0.0) >= target_mean:
        return 0.0
    hi = None
    if math.isfinite(theta_cap):
        prev = 0.0
        for j in range(1, 60):
            th = theta_cap * (1.0 - 2.0**-j)
            if tilted_mean(th) >= target_mean:
                lo, hi = prev, th
                break
            prev = th
        if hi is None:
            raise ConditionError(
                f"target mean {target_mean} is unreachable by tilting at n={n}"
            )
    else:
        lo, th = 0.0, 1.0
        for _ in range(200):
            if tilted_mean(th) >= target_mean:
                hi = th
                break
            lo = th
            th *= 2.0
        if hi is None:
            raise ConditionError(
                f"target mean {target_mean} is unreachable by tilting at n={n}"
            )
    return bisect_increasing(tilted_mean, lo, hi, target_mean, xtol=1e-14)


def verify_mdp(
    wf: WeightFunction,
    lam: float,
    cfg: MdpConfig,
    backend: Optional[str] = None,
) -> MdpReport:
    """Empirical decay rates of the moderately scaled statistic versus the
    quadratic rate y^2 / (2 sigma^2).

    Events are made typical by tilting the finite-n law so its mean sits at
    the threshold; at y = 0 (or below) plain sampling is used.
    """
    engine = build_engine(wf, lam)
    sigma2 = sigma2_w(engine)
    rows: List[MdpRow] = []
    for n in cfg.n_list:
        n = int(n)
        a_n = float(n) ** (-cfg.rho)
        scale = math.sqrt(n * a_n)
        mean_n, _ = exact_mean_var(wf, n, lam)
        for y in cfg.y_grid:
            y = float(y)
            threshold = mean_n + y / scale
            theta = 0.0 if y <= 0.0 else _mdp_tilt(wf, n, lam, threshold)
            if theta == 0.0:
                sim = SimConfig(n=n, lam=lam, seed=cfg.seed, replicates=cfg.replicates)
                values = sample_cn(wf, sim, backend=backend)
                hits = values >= threshold
                p_hat, se, ess = _plain_estimate(hits)
            else:
                sim = SimConfig(
                    n=n,
                    lam=lam,
                    seed=cfg.seed,
                    replicates=cfg.replicates,
                    tilt_theta=theta,
                )
                draws = sample_cn_tilted(wf, sim, backend=backend)
                hits = draws.values >= threshold
                p_hat, se, ess = _is_estimate(draws.values, draws.log_weights, hits)
            zero = p_hat <= 0.0
            emp_rate = math.inf if zero else -a_n * math.log(p_hat)
            rows.append(
                MdpRow(
                    n=n,
                    y=y,
                    a_n=a_n,
                    p_hat=p_hat,
                    std_error=se,
                    emp_rate=emp_rate,
                    analytic_rate=y * y / (2.0 * sigma2),
                    theta=theta,
                    ess=ess,
                    zero_count=zero,
                )
            )
    return MdpReport(rho=cfg.rho, sigma2=sigma2, rows=rows)


def clt_check(
    wf: WeightFunction,
    lam: float,
    n: int,
    replicates: int,
    seed: int,
    backend: Optional[str] = None,
) -> CltReport:
    """Sample variance of sqrt(n)(C_n - E[C_n]) against the asymptotic
    variance, plus the KS distance of the standardized draws to N(0, 1).

    Requires the finite third-moment integral int |w|^3/(1-x)^3 dx, the
    Lyapunov condition for the normal limit."""
    if not math.isfinite(lyapunov_integral(wf)):
        raise ConditionError(
            f"weight {wf.name!r} fails the Lyapunov condition (the third-moment "
            "integral diverges); no central limit theorem applies"
        )
    engine = build_engine(wf, lam)
    sigma2 = sigma2_w(engine)
    mean_n, _ = exact_mean_var(wf, n, lam)
    cfg = SimConfig(n=n, lam=lam, seed=seed, replicates=replicates)
    values = sample_cn(wf, cfg, backend=backend)
    centered = math.sqrt(n) * (values - mean_n)
    sample_var = float(np.mean(centered**2))
    z = centered / math.sqrt(sigma2)
    ks = float(sp_stats.kstest(z, "norm").statistic)
    return CltReport(
        n=n,
        replicates=replicates,
        sample_var=sample_var,
        target_sigma2=sigma2,
        ks_distance=ks,
    )


def _score_quad(f, a: float, b: float, points=None) -> float:
    val, err = sp_integrate.quad(f, a, b, epsabs=1e-11, epsrel=1e-11, limit=400, points=points)
    if not math.isfinite(val):
        raise QuadratureError("score-function integral failed to converge")
    return val


def _support(J: ScoreFunction):
    if J.trim is not None:
        return float(J.trim[0]), float(J.trim[1])
    return 0.0, 1.0


def gz_mean(J: ScoreFunction, lam: float) -> float:
    """L-statistic mean at the exponential parent, via the substitution
    r = 1 - e^{-lam x}:  -(1/lam) int_0^1 log(1-r) J(r) dr."""
    if lam <= 0.0:
        raise ValidationError(f"lambda must be positive, got {lam}")
    a, b = _support(J)

    def f(r):
        return -math.log1p(-r) * float(J(r))

    return _score_quad(f, a, b) / lam


def gz_variance(J: ScoreFunction, lam: float) -> float:
    """L-statistic variance at the exponential parent, reduced form
    (2/lam^2) int_0^1 ds J(s) int_0^s dr r J(r)/(1-r)."""
    if lam <= 0.0:
        raise ValidationError(f"lambda must be positive, got {lam}")
    a, b = _support(J)

    def inner(s):
        if s <= a:
            return 0.0

        def g(r):
            return r * float(J(r)) / (1.0 - r)

        return _score_quad(g, a, min(s, b))

    def outer(s):
        return float(J(s)) * inner(s)

    return 2.0 * _score_quad(outer, a, b) / lam**2


def gz_equivalence_check(J: ScoreFunction, lam: float, tol: float = 1e-5) -> BridgeReport:
    """Both routes to the asymptotic mean and variance: the score-side
    integrals against the weight-side quadrature of w(J; x) = int_x^1 J."""
    engine = build_engine(from_score(J), lam)
    m_gz = gz_mean(J, lam)
    s2_gz = gz_variance(J, lam)
    m_w = mu_w(engine)
    s2_w = sigma2_w(engine)
    gap = max(abs(m_gz - m_w), abs(s2_gz - s2_w))
    return BridgeReport(
        m_gz=m_gz,
        mu_weight=m_w,
        sigma2_gz=s2_gz,
        sigma2_weight=s2_w,
        max_abs_gap=gap,
    )

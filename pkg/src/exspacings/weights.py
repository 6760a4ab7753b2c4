"""Weight functions w on [0, 1] and their spacing ratio h(x) = w(x)/(1-x).

Built-in families:

    w1(x) = 1 - x                  w2(x) = (1 - x)^2
    w3(x) = (1 - x)(1 - sqrt(x))   poly(beta):  (1 - x)^beta
    fgce(alpha): x(-log x)^alpha / Gamma(alpha + 1)
    fcre(q):     (1 - x)(-log(1 - x))^q

plus weights built from a score function J via w(J; x) = int_x^1 J(u) du.

The regularity bound |w(x)| <= c (1-x)^beta on [1-x0, 1] and the
boundedness of h are what the asymptotic machinery needs; both are
checkable here (``check_condition1`` / ``check_condition2``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from ._optim import golden_max
from .errors import DomainError, QuadratureError, SingularityError, ValidationError

__all__ = [
    "WeightFunction",
    "ScoreFunction",
    "Condition1Report",
    "Condition2Report",
    "w1",
    "w2",
    "w3",
    "poly_beta",
    "frac_gce",
    "frac_cre",
    "custom_weight",
    "from_score",
    "jtilde_score",
    "box_score",
    "eval_w",
    "eval_h",
    "check_condition1",
    "check_condition2",
    "parse_weight",
]


def _neg_log(x):
    # -log(x) with full precision near both endpoints
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0.5, -np.log1p(x - 1.0), -np.log(np.where(x > 0.5, 1.0, x)))


@dataclass(frozen=True)
class WeightFunction:
    """Immutable weight with metadata; safe to share across threads.

    ``h_limit`` is the finite limit of h at x=1 when one exists (None
    otherwise); ``h_bounded`` is the analytic classification of h on
    [0, 1) (None means unknown, probed numerically).
    """

    name: str
    _w: Callable
    _h: Callable
    h_limit: Optional[float]
    h_bounded: Optional[bool]
    beta: float
    c: float
    x0: float
    c_numeric: bool = False

    def w(self, x):
        return eval_w(self, x)

    def h(self, x):
        return eval_h(self, x)

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"WeightFunction({self.name})"


@dataclass(frozen=True)
class ScoreFunction:
    """Score function J on (0, 1); ``trim=(a, b)`` zeroes J outside [a, b]."""

    fn: Callable
    trim: Optional[tuple] = None
    name: str = "score"

    def __call__(self, u):
        if self.trim is None:
            return self.fn(u)
        a, b = self.trim
        u_arr = np.asarray(u, dtype=np.float64)
        out = np.where((u_arr >= a) & (u_arr <= b), self.fn(u_arr), 0.0)
        return float(out) if np.isscalar(u) or out.ndim == 0 else out


@dataclass(frozen=True)
class Condition1Report:
    holds: bool
    witness: Optional[float]
    max_violation: float


@dataclass(frozen=True)
class Condition2Report:
    holds: bool
    sup_h: float
    inf_h: float
    argmax: Optional[float]
    argmin: Optional[float]


def _check_x(x):
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"weight argument outside [0, 1]: {x!r}")
    return arr


def eval_w(wf: WeightFunction, x):
    """w(x) for x in [0, 1]; scalar in, scalar out."""
    arr = _check_x(x)
    out = wf._w(arr)
    return float(out) if arr.ndim == 0 else out


def eval_h(wf: WeightFunction, x):
    """h(x) = w(x)/(1-x) for x in [0, 1); x = 1 allowed only with a declared
    finite limit."""
    arr = _check_x(x)
    at_one = arr == 1.0
    if np.any(at_one):
        if wf.h_limit is None:
            raise SingularityError(
                f"h for weight {wf.name!r} has no finite limit at x = 1"
            )
        inner = wf._h(np.where(at_one, 0.5, arr))
        out = np.where(at_one, wf.h_limit, inner)
    else:
        out = wf._h(arr)
    return float(out) if arr.ndim == 0 else out


# ---------------------------------------------------------------------------
# built-in families


def w1() -> WeightFunction:
    return WeightFunction(
        name="w1",
        _w=lambda x: 1.0 - x,
        _h=lambda x: np.ones_like(np.asarray(x, dtype=np.float64)),
        h_limit=1.0,
        h_bounded=True,
        beta=1.0,
        c=1.0,
        x0=0.5,
    )


def w2() -> WeightFunction:
    return WeightFunction(
        name="w2",
        _w=lambda x: (1.0 - x) ** 2,
        _h=lambda x: 1.0 - x,
        h_limit=0.0,
        h_bounded=True,
        beta=1.0,
        c=1.0,
        x0=0.5,
    )


def w3() -> WeightFunction:
    return WeightFunction(
        name="w3",
        _w=lambda x: (1.0 - np.sqrt(x)) * (1.0 - x),
        _h=lambda x: 1.0 - np.sqrt(x),
        h_limit=0.0,
        h_bounded=True,
        beta=1.0,
        c=1.0,
        x0=0.5,
    )


def poly_beta(beta: float) -> WeightFunction:
    """(1-x)^beta for beta in (0, 1]; h is unbounded unless beta = 1."""
    if not 0.0 < beta <= 1.0:
        raise ValidationError(f"poly beta must lie in (0, 1], got {beta}")
    return WeightFunction(
        name=f"poly:{beta:g}",
        _w=lambda x: (1.0 - x) ** beta,
        _h=lambda x: (1.0 - x) ** (beta - 1.0),
        h_limit=1.0 if beta == 1.0 else None,
        h_bounded=beta == 1.0,
        beta=beta,
        c=1.0,
        x0=0.5,
    )


def _gamma_alpha_plus_one(alpha: float) -> float:
    if alpha >= 0 and float(alpha).is_integer():
        return float(math.factorial(int(alpha)))
    return math.exp(math.lgamma(alpha + 1.0))


def frac_gce(alpha: float) -> WeightFunction:
    """x(-log x)^alpha / Gamma(alpha+1); h is bounded iff alpha >= 1."""
    if alpha <= 0.0:
        raise ValidationError(f"fgce alpha must be positive, got {alpha}")
    norm = _gamma_alpha_plus_one(alpha)

    def wfun(x):
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = x * _neg_log(x) ** alpha / norm
        return np.where((x <= 0.0) | (x >= 1.0), 0.0, v)

    def hfun(x):
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = x * _neg_log(x) ** alpha / (norm * (1.0 - x))
        return np.where(x <= 0.0, 0.0, v)

    bounded = alpha >= 1.0
    if alpha > 1.0:
        h_limit = 0.0
    elif alpha == 1.0:
        h_limit = 1.0
    else:
        h_limit = None
    wf = WeightFunction(
        name=f"fgce:{alpha:g}",
        _w=wfun,
        _h=hfun,
        h_limit=h_limit,
        h_bounded=bounded,
        beta=min(alpha, 1.0),
        c=1.0,
        x0=0.5,
        c_numeric=True,
    )
    return _with_numeric_c(wf)


def frac_cre(q: float) -> WeightFunction:
    """(1-x)(-log(1-x))^q; reduces to w1 at q = 0, h unbounded for q > 0."""
    if q < 0.0:
        raise ValidationError(f"fcre q must be >= 0, got {q}")

    def wfun(x):
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = (1.0 - x) * (-np.log1p(-x)) ** q
        return np.where(x >= 1.0, 0.0, v)

    def hfun(x):
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(divide="ignore"):
            return (-np.log1p(-x)) ** q

    if q == 0.0:
        return WeightFunction(
            name="fcre:0",
            _w=wfun,
            _h=hfun,
            h_limit=1.0,
            h_bounded=True,
            beta=1.0,
            c=1.0,
            x0=0.5,
        )
    wf = WeightFunction(
        name=f"fcre:{q:g}",
        _w=wfun,
        _h=hfun,
        h_limit=None,
        h_bounded=False,
        beta=0.9,
        c=1.0,
        x0=0.5,
        c_numeric=True,
    )
    return _with_numeric_c(wf)


def custom_weight(
    w: Callable,
    *,
    name: str = "custom",
    h: Optional[Callable] = None,
    h_limit: Optional[float] = None,
    h_bounded: Optional[bool] = None,
    beta: float,
    c: float,
    x0: float,
) -> WeightFunction:
    """User-supplied weight; (beta, c, x0) must be declared, not inferred."""
    if not 0.0 < beta <= 1.0 or c <= 0.0 or not 0.0 < x0 < 1.0:
        raise ValidationError("custom weight needs beta in (0,1], c > 0, x0 in (0,1)")
    wvec = _vectorize_scalar(w)
    if h is None:

        def hfun(x):
            x = np.asarray(x, dtype=np.float64)
            with np.errstate(divide="ignore", invalid="ignore"):
                return wvec(x) / (1.0 - x)

    else:
        hfun = _vectorize_scalar(h)
    return WeightFunction(
        name=name,
        _w=wvec,
        _h=hfun,
        h_limit=h_limit,
        h_bounded=h_bounded,
        beta=beta,
        c=c,
        x0=x0,
    )


def _vectorize_scalar(f):
    def g(x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 0:
            return np.float64(f(float(x)))
        try:
            out = np.asarray(f(x), dtype=np.float64)
            if out.shape == x.shape:
                return out
        except Exception:
            pass
        return np.array([f(float(t)) for t in x.ravel()]).reshape(x.shape)

    return g


def _with_numeric_c(wf: WeightFunction) -> WeightFunction:
    """Replace c by the numerically determined sup of |w|/(1-x)^beta on
    [1-x0, 1)."""
    xs = 1.0 - wf.x0 * 2.0 ** -np.linspace(0.0, 40.0, 2001)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(wf._w(xs)) / (1.0 - xs) ** wf.beta

    def ratio_scalar(x):
        if x >= 1.0:
            return 0.0
        return float(np.abs(wf._w(x))) / (1.0 - x) ** wf.beta

    sup = float(np.nanmax(ratio))
    i = int(np.nanargmax(ratio))
    lo = float(xs[max(i - 1, 0)])
    hi = float(xs[min(i + 1, xs.size - 1)])
    _, refined = golden_max(ratio_scalar, lo, hi)
    c = max(sup, refined) * (1.0 + 1e-9) + 1e-15
    return WeightFunction(
        name=wf.name,
        _w=wf._w,
        _h=wf._h,
        h_limit=wf.h_limit,
        h_bounded=wf.h_bounded,
        beta=wf.beta,
        c=c,
        x0=wf.x0,
        c_numeric=True,
    )


# ---------------------------------------------------------------------------
# score functions


def jtilde_score() -> ScoreFunction:
    return ScoreFunction(fn=lambda u: np.log(u) + 1.0, trim=None, name="jtilde")


def box_score(a: float = 0.2, b: float = 0.8) -> ScoreFunction:
    if not 0.0 <= a < b <= 1.0:
        raise ValidationError(f"box score needs 0 <= a < b <= 1, got ({a}, {b})")

    def fn(u):
        u = np.asarray(u, dtype=np.float64)
        return ((u >= a) & (u <= b)).astype(np.float64)

    return ScoreFunction(fn=fn, trim=(a, b), name=f"box:{a:g}:{b:g}")


def from_score(J: ScoreFunction) -> WeightFunction:
    """Weight w(J; x) = int_x^1 J(u) du, evaluated by adaptive quadrature.

    J must be bounded on its support; the tail integral gives w(1) = 0 by
    construction and h bounded by sup|J|.
    """
    lo_trim, hi_trim = J.trim if J.trim is not None else (0.0, 1.0)
    grid = np.linspace(1e-9, 1.0 - 1e-9, 2001)
    vals = np.asarray(J(grid), dtype=np.float64)
    if not np.all(np.isfinite(vals)):
        raise ValidationError(f"score {J.name!r} is unbounded on its support")

    def w_scalar(x):
        a = max(x, lo_trim)
        if a >= hi_trim:
            return 0.0
        with warnings.catch_warnings():
            # roundoff chatter at extreme tolerances; the error estimate
            # below is still enforced
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(
                lambda u: float(J(u)), a, hi_trim, epsabs=1e-12, epsrel=1e-12, limit=200
            )
        if not math.isfinite(val) or err > 1e-8:
            raise QuadratureError(f"tail integral of score {J.name!r} failed at x={x}")
        return val

    wvec = _vectorize_scalar(w_scalar)

    def hfun(x):
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(x >= hi_trim, 0.0, wvec(x) / (1.0 - x))

    wf = WeightFunction(
        name=f"score:{J.name}",
        _w=wvec,
        _h=hfun,
        h_limit=0.0 if hi_trim < 1.0 else None,
        h_bounded=True,
        beta=1.0,
        c=1.0,
        x0=0.5,
        c_numeric=True,
    )
    return _with_numeric_c(wf)


# ---------------------------------------------------------------------------
# condition checks


def check_condition1(wf: WeightFunction, grid_size: int = 10_000) -> Condition1Report:
    """Grid check (with golden-section refinement) of |w| <= c (1-x)^beta on
    [1-x0, 1]; violations beyond 1e-12 fail the check."""
    if grid_size < 100:
        raise ValidationError("grid_size must be >= 100")

    def viol(x):
        return float(abs(eval_w(wf, x)) - wf.c * (1.0 - x) ** wf.beta)

    xs = np.linspace(1.0 - wf.x0, 1.0, grid_size)
    vs = np.abs(wf._w(xs)) - wf.c * (1.0 - xs) ** wf.beta
    order = np.argsort(vs)[::-1][:5]
    best_x, best_v = float(xs[order[0]]), float(vs[order[0]])
    for i in order:
        a = xs[max(int(i) - 1, 0)]
        b = xs[min(int(i) + 1, grid_size - 1)]
        x_ref, v_ref = golden_max(viol, float(a), float(b))
        if v_ref > best_v:
            best_x, best_v = x_ref, v_ref
    holds = best_v <= 1e-12
    return Condition1Report(
        holds=holds, witness=None if holds else best_x, max_violation=best_v
    )


def _h_probe_unbounded(wf: WeightFunction) -> bool:
    """Trend probe: h along x_j = 1 - 2^-j must Cauchy-converge, otherwise
    classify h as unbounded."""
    xs = 1.0 - 2.0 ** -np.arange(4, 49, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        vs = np.abs(np.asarray(wf._h(xs), dtype=np.float64))
    if not np.all(np.isfinite(vs)):
        return True
    if vs[-1] > 1e6:
        return True
    tail = np.abs(np.diff(vs))[-5:]
    return bool(np.any(tail > np.maximum(1e-9, 1e-8 * vs[-5:])))


def _h_extrema(wf: WeightFunction):
    xs = np.linspace(0.0, 1.0, 8193, endpoint=False)
    xs = np.concatenate([xs, 1.0 - 2.0 ** -np.arange(14, 41, dtype=np.float64)])
    xs.sort()
    vs = np.asarray(wf._h(xs), dtype=np.float64)
    if wf.h_limit is not None:
        xs = np.append(xs, 1.0)
        vs = np.append(vs, wf.h_limit)

    def refine(idx, sign):
        a = xs[max(idx - 1, 0)]
        b = xs[min(idx + 1, len(xs) - 1)]
        x, v = golden_max(lambda t: sign * float(eval_h(wf, t)), float(a), float(b))
        return x, sign * v

    imax = int(np.argmax(vs))
    imin = int(np.argmin(vs))
    xmax, vmax = refine(imax, 1.0)
    xmin, vmin = refine(imin, -1.0)
    vmax = max(vmax, float(vs[imax]))
    vmin = min(vmin, float(vs[imin]))
    return vmax, vmin, xmax, xmin


def check_condition2(wf: WeightFunction, lam: float) -> Condition2Report:
    """h bounded on [0, 1) is equivalent, for continuous w, to the limiting
    cumulant function being finite near the origin; report sup/inf of h."""
    if lam <= 0.0:
        raise ValidationError(f"lambda must be positive, got {lam}")
    bounded = wf.h_bounded
    if bounded is None:
        bounded = not _h_probe_unbounded(wf)
    if not bounded:
        return Condition2Report(
            holds=False, sup_h=math.inf, inf_h=-math.inf, argmax=None, argmin=None
        )
    sup_h, inf_h, argmax, argmin = _h_extrema(wf)
    return Condition2Report(
        holds=math.isfinite(sup_h) and math.isfinite(inf_h),
        sup_h=sup_h,
        inf_h=inf_h,
        argmax=argmax,
        argmin=argmin,
    )


# ---------------------------------------------------------------------------
# CLI-facing names


def parse_weight(spec: str) -> WeightFunction:
    """Weight from its CLI/JSON name: w1, w2, w3, poly:<beta>, fgce:<alpha>,
    fcre:<q>, score:<builtin>."""
    s = spec.strip().lower()
    if s == "w1":
        return w1()
    if s == "w2":
        return w2()
    if s == "w3":
        return w3()
    parts = s.split(":")
    try:
        if parts[0] == "poly" and len(parts) == 2:
            return poly_beta(float(parts[1]))
        if parts[0] == "fgce" and len(parts) == 2:
            return frac_gce(float(parts[1]))
        if parts[0] == "fcre" and len(parts) == 2:
            return frac_cre(float(parts[1]))
        if parts[0] == "score":
            if len(parts) == 2 and parts[1] == "jtilde":
                return from_score(jtilde_score())
            if len(parts) >= 2 and parts[1] == "box":
                if len(parts) == 2:
                    return from_score(box_score())
                if len(parts) == 4:
                    return from_score(box_score(float(parts[2]), float(parts[3])))
    except ValueError as exc:
        raise ValidationError(f"bad weight parameter in {spec!r}: {exc}") from exc
    raise ValidationError(f"unknown weight family {spec!r}")

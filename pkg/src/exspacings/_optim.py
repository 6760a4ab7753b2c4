"""Tiny deterministic 1-d search helpers (golden section, bisection)."""

import math

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, a, b, tol=1e-12, max_iter=200):
    """Golden-section maximizer of ``f`` on [a, b]; returns (x, f(x))."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = f(c)
    fd = f(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
    x = 0.5 * (a + b)
    return x, f(x)


def golden_min(f, a, b, tol=1e-12, max_iter=200):
    x, fx = golden_max(lambda t: -f(t), a, b, tol=tol, max_iter=max_iter)
    return x, -fx


def bisect_increasing(f, lo, hi, target, xtol=1e-12, max_iter=200):
    """Root of f(x) = target on [lo, hi] for nondecreasing f."""
    flo = f(lo) - target
    fhi = f(hi) - target
    if flo > 0.0 or fhi < 0.0:
        raise ValueError("target not bracketed")
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) - target <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)

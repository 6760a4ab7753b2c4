"""Hot sampling kernels with a numba fast path and a pure-numpy fallback.

The random stream is counter based: every uniform is a pure function of
(seed, replicate index, spacing index), so draws do not depend on thread
count, batch size or evaluation order.  Per draw we run a splitmix64
finalizer over a Weyl sequence keyed by (seed, replicate):

    key(seed, rep) = mix64(seed ^ mix64(rep * GOLD + GOLD))
    bits(key, k)   = mix64(key + (k + 1) * GOLD)
    u              = ((bits >> 11) + 1) * 2^-53        # in (0, 1]

and the spacing draw is -log(u) / rate, so draws at rate lambda equal the
rate-1 draws divided by lambda (bit-exact for power-of-two lambda, to one
rounding step otherwise).

Backend selection: EXSPACINGS_BACKEND=numba|numpy (default numba when
importable).  Both backends consume identical bit streams; floating point
results agree to rounding (numpy's vectorized log may differ from libm by
an ulp).
"""

import os
import warnings

import numpy as np

U64 = np.uint64
GOLD = U64(0x9E3779B97F4A7C15)
MIX1 = U64(0xBF58476D1CE4E5B9)
MIX2 = U64(0x94D049BB133111EB)
TWO_NEG53 = 2.0 ** -53

try:
    import numba

    # an out-of-date TBB merely falls back to another threading layer
    warnings.filterwarnings(
        "ignore",
        message="The TBB threading layer requires",
        category=numba.NumbaWarning,
    )
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def _mix64(z):
    z = (z ^ (z >> U64(30))) * MIX1
    z = (z ^ (z >> U64(27))) * MIX2
    return z ^ (z >> U64(31))


def stream_key(seed, rep):
    """Per-replicate stream key; works on scalars and uint64 arrays."""
    rep = U64(rep) if np.isscalar(rep) else np.asarray(rep, dtype=U64)
    with np.errstate(over="ignore"):
        return _mix64(U64(seed) ^ _mix64(rep * GOLD + GOLD))


def _cn_numpy(coef, seed, rep_start, count):
    # uint64 wraparound is the point of the Weyl sequence; silence the
    # overflow warnings it triggers
    with np.errstate(over="ignore"):
        return _cn_numpy_impl(coef, seed, rep_start, count)


def _cn_numpy_impl(coef, seed, rep_start, count):
    out = np.empty(count, dtype=np.float64)
    n = coef.shape[0]
    batch = max(1, min(count, 1 << 16))
    for lo in range(0, count, batch):
        hi = min(lo + batch, count)
        reps = np.arange(lo, hi, dtype=np.uint64) + U64(rep_start)
        keys = stream_key(seed, reps)
        acc = np.zeros(hi - lo, dtype=np.float64)
        for k in range(n):
            bits = _mix64(keys + U64(k + 1) * GOLD)
            u = ((bits >> U64(11)) + U64(1)) * TWO_NEG53
            acc += coef[k] * (-np.log(u))
        out[lo:hi] = acc
    return out


if HAVE_NUMBA:
    _mix64_nb = numba.njit(cache=True)(_mix64)

    @numba.njit(cache=True, parallel=True)
    def _cn_numba(coef, seed, rep_start, out):  # pragma: no cover - jitted
        n = coef.shape[0]
        for r in numba.prange(out.shape[0]):
            rep = U64(rep_start) + U64(r)
            key = _mix64_nb(U64(seed) ^ _mix64_nb(rep * GOLD + GOLD))
            acc = 0.0
            s = key
            for k in range(n):
                s = s + GOLD
                bits = _mix64_nb(s)
                u = ((bits >> U64(11)) + U64(1)) * TWO_NEG53
                acc += coef[k] * (-np.log(u))
            out[r] = acc
        return out


def default_backend():
    env = os.environ.get("EXSPACINGS_BACKEND", "").strip().lower()
    if env in ("numba", "numpy"):
        return env
    return "numba" if HAVE_NUMBA else "numpy"


def cn_values(coef, seed, rep_start=0, count=1, backend=None):
    """Linear-combination-of-spacings draws.

    ``coef[k]`` must already hold w(k/n) / rate_k; each returned value is
    sum_k coef[k] * E_{r,k} with E standard exponentials from the counter
    stream of replicate ``rep_start + r``.
    """
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    if backend is None:
        backend = default_backend()
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        out = np.empty(count, dtype=np.float64)
        return _cn_numba(coef, U64(seed), np.int64(rep_start), out)
    if backend == "numpy":
        return _cn_numpy(coef, U64(seed), rep_start, count)
    raise ValueError(f"unknown backend {backend!r}")


def warmup():
    """Trigger jit compilation so later calls are not charged for it."""
    if HAVE_NUMBA:
        cn_values(np.ones(2), 0, 0, 2, backend="numba")

"""Hot numeric loops.

Every kernel exists twice: a numba ``@njit`` version and a vectorized numpy
version with the same arithmetic. The public names dispatch to one of them
according to :data:`USE_NUMBA`, which is fixed at import time. Set the
environment variable ``MPAACS_DISABLE_NUMBA=1`` to force the numpy path
(useful for debugging and for the benchmark in ``benchmarks/``).
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

_DISABLED = os.environ.get("MPAACS_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")
USE_NUMBA = numba is not None and not _DISABLED

_TWO_OVER_PI = 2.0 / np.pi
_INV_SQRT2 = 1.0 / np.sqrt(2.0)


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def laguerre_numpy(m, x):
    x = np.asarray(x, dtype=np.float64)
    prev = np.ones_like(x)
    if m == 0:
        return prev
    cur = 1.0 - x
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def wigner_grid_numpy(xs, ys, center_re, center_im, m, inv_norm):
    """W on the outer product grid ``xs`` x ``ys``; shape ``(len(xs), len(ys))``.

    ``center`` is the amplified amplitude g*alpha, ``inv_norm`` is 1/L_m(-|g alpha|^2).
    """
    br = np.asarray(xs, dtype=np.float64)[:, None] * _INV_SQRT2
    bi = np.asarray(ys, dtype=np.float64)[None, :] * _INV_SQRT2
    dr = br - center_re
    di = bi - center_im
    # |2 beta - g alpha|^2
    er = 2.0 * br - center_re
    ei = 2.0 * bi - center_im
    lag = laguerre_numpy(m, er * er + ei * ei)
    sign = -1.0 if m % 2 else 1.0
    return sign * _TWO_OVER_PI * inv_norm * lag * np.exp(-2.0 * (dr * dr + di * di))


def parity_weight_numpy(amplitudes):
    """sum_n (-1)^n |v_n|^2 for each column of ``amplitudes`` (dim x npts)."""
    p = np.abs(amplitudes) ** 2
    signs = np.where(np.arange(p.shape[0]) % 2 == 0, 1.0, -1.0)
    return signs @ p


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def _laguerre_scalar_nb(m, x):
        if m == 0:
            return 1.0
        prev = 1.0
        cur = 1.0 - x
        for k in range(1, m):
            nxt = ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
            prev = cur
            cur = nxt
        return cur

    @numba.njit(cache=True)
    def laguerre_numba(m, x):
        out = np.empty(x.shape[0])
        for i in range(x.shape[0]):
            out[i] = _laguerre_scalar_nb(m, x[i])
        return out

    @numba.njit(cache=True)
    def wigner_grid_numba(xs, ys, center_re, center_im, m, inv_norm):
        nx = xs.shape[0]
        ny = ys.shape[0]
        out = np.empty((nx, ny))
        sign = -1.0 if m % 2 else 1.0
        pref = sign * _TWO_OVER_PI * inv_norm
        for i in range(nx):
            br = xs[i] * _INV_SQRT2
            dr = br - center_re
            er = 2.0 * br - center_re
            for j in range(ny):
                bi = ys[j] * _INV_SQRT2
                di = bi - center_im
                ei = 2.0 * bi - center_im
                lag = _laguerre_scalar_nb(m, er * er + ei * ei)
                out[i, j] = pref * lag * np.exp(-2.0 * (dr * dr + di * di))
        return out

    @numba.njit(cache=True)
    def parity_weight_numba(amplitudes):
        dim, npts = amplitudes.shape
        out = np.zeros(npts)
        for n in range(dim):
            s = 1.0 if n % 2 == 0 else -1.0
            for j in range(npts):
                v = amplitudes[n, j]
                out[j] += s * (v.real * v.real + v.imag * v.imag)
        return out

else:  # pragma: no cover
    laguerre_numba = wigner_grid_numba = parity_weight_numba = None


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def laguerre_array(m, x):
    """L_m evaluated elementwise on a 1-D float array."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if USE_NUMBA:
        return laguerre_numba(int(m), x.ravel()).reshape(x.shape)
    return laguerre_numpy(int(m), x)


def wigner_grid(xs, ys, center, m, inv_norm):
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    center = complex(center)
    if USE_NUMBA:
        return wigner_grid_numba(xs, ys, center.real, center.imag, int(m), float(inv_norm))
    return wigner_grid_numpy(xs, ys, center.real, center.imag, int(m), float(inv_norm))


def parity_weight(amplitudes):
    amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
    if USE_NUMBA:
        return parity_weight_numba(amplitudes)
    return parity_weight_numpy(amplitudes)

"""Photon routing / click tallying kernels.

Two implementations consume identical random draws and return identical
histograms: numba ``@njit`` loops and vectorized numpy.  The numba path is
used when numba imports and ``ERASER_SIM_NUMBA`` is not ``0``.

Routing rule: a photon with uniform draw ``x`` goes to the first detector
``d`` with ``x < cum[d]`` (cumulative probabilities of detectors 1..4) and is
lost otherwise.  Window ``w`` holds ``n_photons[w]`` photons that consume
consecutive draws.
"""
from __future__ import annotations

import os

import numpy as np

N_PATTERNS = 16  # click masks over four detectors, bit d-1 for detector d


def _drift_cum(coeffs, cos_ph, sin_ph):
    # same operation order as the numba loop, so both round identically
    p = coeffs[:, 0] + coeffs[:, 1] * cos_ph[:, None] + coeffs[:, 2] * sin_ph[:, None]
    p = np.minimum(np.maximum(p, 0.0), 1.0)
    cum = np.empty_like(p)
    cum[:, 0] = p[:, 0]
    for d in range(1, 4):
        cum[:, d] = cum[:, d - 1] + p[:, d]
    return cum


def _tally_rows(n_photons, u, cum_rows):
    if len(n_photons) == 0:
        return np.zeros(N_PATTERNS, np.int64)
    det = (u[:, None] >= cum_rows).sum(axis=1)
    bits = np.where(det < 4, np.left_shift(1, np.minimum(det, 3)), 0)
    starts = np.concatenate(([0], np.cumsum(n_photons)[:-1]))
    masks = np.bitwise_or.reduceat(bits, starts)
    return np.bincount(masks, minlength=N_PATTERNS).astype(np.int64)


def tally_static_numpy(n_photons, u, cum):
    """Click-mask histogram with one set of probabilities for all windows."""
    return _tally_rows(n_photons, u, cum[None, :])


def tally_drift_numpy(n_photons, u, coeffs, cos_ph, sin_ph):
    """Click-mask histogram with per-window phase; p_d = a + b cos + c sin."""
    cum = _drift_cum(coeffs, cos_ph, sin_ph)
    return _tally_rows(n_photons, u, np.repeat(cum, n_photons, axis=0))


def fold_numpy(x, bound):
    """Reflect a free walk into ``[-bound, bound]``."""
    y = np.mod(x + bound, 4 * bound)
    return np.where(y > 2 * bound, 4 * bound - y, y) - bound


try:
    from numba import njit

    @njit(cache=True, nogil=True)
    def _route(x, cum):
        for d in range(4):
            if x < cum[d]:
                return 1 << d
        return 0

    @njit(cache=True, nogil=True)
    def tally_static_numba(n_photons, u, cum):
        hist = np.zeros(N_PATTERNS, np.int64)
        j = 0
        for w in range(n_photons.shape[0]):
            mask = 0
            for _ in range(n_photons[w]):
                mask |= _route(u[j], cum)
                j += 1
            hist[mask] += 1
        return hist

    @njit(cache=True, nogil=True)
    def tally_drift_numba(n_photons, u, coeffs, cos_ph, sin_ph):
        hist = np.zeros(N_PATTERNS, np.int64)
        cum = np.empty(4)
        j = 0
        for w in range(n_photons.shape[0]):
            acc = 0.0
            for d in range(4):
                p = coeffs[d, 0] + coeffs[d, 1] * cos_ph[w] + coeffs[d, 2] * sin_ph[w]
                p = min(max(p, 0.0), 1.0)
                acc = p if d == 0 else acc + p
                cum[d] = acc
            mask = 0
            for _ in range(n_photons[w]):
                mask |= _route(u[j], cum)
                j += 1
            hist[mask] += 1
        return hist

    @njit(cache=True, nogil=True)
    def fold_numba(x, bound):
        out = np.empty_like(x)
        period = 4 * bound
        for i in range(x.shape[0]):
            y = np.mod(x[i] + bound, period)
            if y > 2 * bound:
                y = period - y
            out[i] = y - bound
        return out

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    tally_static_numba = tally_drift_numba = fold_numba = None
    HAVE_NUMBA = False


def use_numba() -> bool:
    return HAVE_NUMBA and os.environ.get("ERASER_SIM_NUMBA", "1") != "0"


def _f64(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def tally_static(n_photons, u, cum):
    args = (np.ascontiguousarray(n_photons, dtype=np.int64), _f64(u), _f64(cum))
    return tally_static_numba(*args) if use_numba() else tally_static_numpy(*args)


def tally_drift(n_photons, u, coeffs, cos_ph, sin_ph):
    args = (np.ascontiguousarray(n_photons, dtype=np.int64), _f64(u), _f64(coeffs),
            _f64(cos_ph), _f64(sin_ph))
    return tally_drift_numba(*args) if use_numba() else tally_drift_numpy(*args)


def fold(x, bound):
    x = _f64(x)
    return fold_numba(x, float(bound)) if use_numba() else fold_numpy(x, float(bound))

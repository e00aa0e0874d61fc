"""Fringe characterization: sinusoid fits, FWHM and resolution class."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq, least_squares, minimize_scalar

from .correlations import FringeCurve

TWO_PI = 2 * np.pi
RESIDUAL_LIMIT = 0.25  # rms residual / amplitude beyond which a fit is rejected
CLASS_TOL = 0.05
PEAK_TIE = 0.02  # interior maxima this close (relative to span) count as the global peak

CLASSICAL, SQL, BEYOND_SQL, HEISENBERG, INDETERMINATE = (
    "classical", "SQL", "beyond-SQL", "Heisenberg", "indeterminate")


class FitError(RuntimeError):
    def __init__(self, message, fit=None):
        super().__init__(message)
        self.fit = fit


@dataclass(frozen=True)
class FringeFit:
    """``offset + amplitude * cos(2 pi phi / period + phase_offset)``."""

    period: float
    phase_offset: float
    amplitude: float
    offset: float
    visibility: float
    rms_residual: float
    excess_residual: float = 0.0  # rms residual left after removing the curve's own stderr

    def __call__(self, phi):
        return self.offset + self.amplitude * np.cos(TWO_PI * np.asarray(phi) / self.period
                                                     + self.phase_offset)

    @property
    def peak_phase(self) -> float:
        """Location of the fitted maximum nearest phi = 0."""
        x = -self.phase_offset * self.period / TWO_PI
        return float((x + self.period / 2) % self.period - self.period / 2)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ResolutionReport:
    order: int
    fwhm: float
    reference_fwhm: float
    scale_vs_reference: float
    period: float
    sql_scale: float
    classification: str

    def to_dict(self) -> dict:
        return asdict(self)


def _xy(curve):
    if isinstance(curve, FringeCurve):
        return curve.phi, curve.values
    phi, y = curve
    return np.asarray(phi, float), np.asarray(y, float)


def _stderr(curve):
    if isinstance(curve, FringeCurve) and curve.stderr is not None:
        return np.asarray(curve.stderr, float)
    return None


def _linear_fit(phi, y, omega):
    A = np.column_stack([np.ones_like(phi), np.cos(omega * phi), np.sin(omega * phi)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef


def dominant_frequency(phi, y, pad: int = 16, dominance: float = 1.2) -> float:
    """Angular frequency (rad^-1) of the strongest spectral line."""
    n = len(y)
    step = (phi[-1] - phi[0]) / (n - 1)
    spec = np.abs(np.fft.rfft(y - y.mean(), n=pad * n)) ** 2
    freqs = np.fft.rfftfreq(pad * n, d=step) * TWO_PI
    spec[0] = 0.0
    k = int(np.argmax(spec))
    if not np.isfinite(spec[k]) or spec[k] <= 1e-30 * max(1.0, float(np.sum(y**2))):
        raise FitError("no spectral content")
    # strongest competing local maximum outside the main lobe
    lobe = 2 * pad
    is_peak = np.r_[False, (spec[1:-1] > spec[:-2]) & (spec[1:-1] >= spec[2:]), False]
    is_peak[max(k - lobe, 0):k + lobe + 1] = False
    if is_peak.any() and spec[is_peak].max() * dominance > spec[k]:
        raise FitError("spectrum has no dominant peak")
    return float(freqs[k])


def fit_sinusoid(curve, harmonic_hint: int | None = None) -> FringeFit:
    """Single-harmonic least-squares fit.

    The frequency starts at the periodogram peak (or at ``harmonic_hint``
    cycles per 2 pi) and is refined jointly with the linear parameters.
    Raises :class:`FitError` when the residual exceeds a quarter of the
    amplitude; for curves with ``stderr`` (counting data) only the residual in
    excess of that known noise counts.
    """
    phi, y = _xy(curve)
    if len(phi) < 8:
        raise ValueError("need at least 8 samples")
    if np.any(y < -1e-12 * max(1.0, np.abs(y).max())):
        raise ValueError("fringe values must be nonnegative")
    omega0 = float(harmonic_hint) if harmonic_hint else dominant_frequency(phi, y)
    c0, ca, cb = _linear_fit(phi, y, omega0)

    def resid(p):
        off, a, b, w = p
        return off + a * np.cos(w * phi) + b * np.sin(w * phi) - y

    sol = least_squares(resid, [c0, ca, cb, omega0], xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        x_scale="jac", method="lm")
    off, a, b, w = sol.x
    w = abs(w)
    if sol.x[3] < 0:
        b = -b
    amp = float(np.hypot(a, b))
    psi = float(np.arctan2(-b, a))  # a cos + b sin = amp cos(w phi + psi)
    mse = float(np.mean(resid([off, a, b, w]) ** 2))
    err = _stderr(curve)
    excess = np.sqrt(max(mse - float(np.mean(err**2)), 0.0)) if err is not None else np.sqrt(mse)
    vis = float(np.clip(amp / off, 0.0, 1.0)) if off > 0 else 0.0
    fit = FringeFit(TWO_PI / w, psi, amp, float(off), vis, float(np.sqrt(mse)), float(excess))
    if amp == 0 or excess > RESIDUAL_LIMIT * amp:
        raise FitError(f"residual {excess:.3g} exceeds {RESIDUAL_LIMIT:.0%} of amplitude "
                       f"{amp:.3g}", fit)
    return fit


def _extreme(func, x0, step, sign):
    """Refine a grid extremum of ``func`` (sign=+1 max, -1 min)."""
    res = minimize_scalar(lambda x: -sign * func(x), bounds=(x0 - step, x0 + step),
                          method="bounded", options={"xatol": 1e-13})
    best = float(func(res.x))
    return max(best, float(func(x0))) if sign > 0 else min(best, float(func(x0)))


def _crossing(phi, y, i, direction, half, func):
    """Walk from peak index ``i`` until y drops below ``half``."""
    j = i
    while 0 <= j + direction < len(y) and y[j + direction] >= half:
        j += direction
    k = j + direction
    if not 0 <= k < len(y):
        return None
    x0, x1, y0, y1 = phi[j], phi[k], y[j], y[k]
    x = x0 + (half - y0) * (x1 - x0) / (y1 - y0)
    if func is not None:
        g = lambda t: func(t) - half
        lo, hi = min(x0, x1), max(x0, x1)
        if g(lo) * g(hi) <= 0:
            x = brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return x


def fwhm(curve, func=None) -> float:
    """Full width at half of (max - min) around the global peak.

    Grid crossings are linearly interpolated; pass the analytic ``func`` to
    refine the extremes and both crossings by root finding.
    """
    phi, y = _xy(curve)
    span = y.max() - y.min()
    if span <= 0:
        raise ValueError("flat curve has no peak")
    step = phi[1] - phi[0]
    ymax, ymin = y.max(), y.min()
    if func is not None:
        ymax = _extreme(func, phi[np.argmax(y)], step, +1)
        ymin = _extreme(func, phi[np.argmin(y)], step, -1)
    half = ymin + 0.5 * (ymax - ymin)
    interior = np.r_[False, (y[1:-1] >= y[:-2]) & (y[1:-1] >= y[2:]), False]
    if not interior.any():
        raise ValueError("no interior maximum")
    # a maximum on the grid edge is not bracketed; take the tallest interior ones
    top = y[interior].max()
    cands = np.flatnonzero(interior & (y >= top - PEAK_TIE * span))
    centre = 0.5 * (phi[0] + phi[-1])
    for i in sorted(cands, key=lambda i: abs(phi[i] - centre)):
        left = _crossing(phi, y, i, -1, half, func)
        right = _crossing(phi, y, i, +1, half, func)
        if left is not None and right is not None:
            return float(right - left)
    raise ValueError("no interior peak with half-maximum crossings on both sides")


def classify_resolution(fit: FringeFit | None, order: int, width: float,
                        reference_fwhm: float = np.pi, tol: float = CLASS_TOL) -> ResolutionReport:
    """Heisenberg: period 2pi/n.  SQL: period 2pi and FWHM scale 1/sqrt(n).
    Beyond-SQL: narrower than 1/sqrt(n) without the period reduction."""
    scale = width / reference_fwhm
    sql_scale = 1 / np.sqrt(order)
    period = fit.period if fit is not None else float("nan")
    if fit is None or fit.excess_residual > RESIDUAL_LIMIT * fit.amplitude:
        label = INDETERMINATE
    elif order == 1:
        label = CLASSICAL
    elif abs(period * order / TWO_PI - 1) <= tol:
        label = HEISENBERG
    elif abs(period / TWO_PI - 1) <= tol and abs(scale / sql_scale - 1) <= tol:
        label = SQL
    elif scale < sql_scale * (1 - tol):
        label = BEYOND_SQL
    else:
        label = CLASSICAL
    return ResolutionReport(order, float(width), float(reference_fwhm), float(scale),
                            float(period), float(sql_scale), label)


def resolution_report(curve: FringeCurve, order: int, reference_fwhm: float = np.pi,
                      func=None, harmonic_hint: int | None = None) -> tuple[FringeFit | None,
                                                                              ResolutionReport]:
    try:
        fit = fit_sinusoid(curve, harmonic_hint)
    except FitError as exc:
        fit = exc.fit
        if fit is None:
            return None, classify_resolution(None, order, float("nan"), reference_fwhm)
    try:
        width = fwhm(curve, func)
    except ValueError:
        width = float("nan")
    return fit, classify_resolution(fit, order, width, reference_fwhm)

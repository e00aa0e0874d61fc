import numpy as np
import pytest

from eraser_sim.circuit import EraserConfig, PhaseGrid
from eraser_sim.correlations import FringeCurve, correlate, no_qwp_reference
from eraser_sim.fringe import (BEYOND_SQL, CLASSICAL, HEISENBERG, INDETERMINATE, SQL, FitError,
                               FringeFit, classify_resolution, dominant_frequency, fit_sinusoid,
                               fwhm, resolution_report)

from oracles import c13_fwhm, sin4_fwhm

PHI = PhaseGrid().values


def curve(values, label="C12", stderr=None):
    return FringeCurve(PHI, np.asarray(values, float), label, stderr=stderr)


def test_exact_first_order_fit():
    fit = fit_sinusoid(curve(1 - np.cos(PHI)))
    assert np.isclose(fit.period, 2 * np.pi, rtol=1e-12)
    assert np.isclose(fit.visibility, 1.0, atol=1e-9)
    assert fit.rms_residual < 1e-9
    assert np.isclose(abs(fit.peak_phase), np.pi, atol=1e-9)


def test_exact_quadrupled_fit():
    fit = fit_sinusoid(curve(1 - np.cos(4 * PHI)))
    assert np.isclose(fit.period, np.pi / 2, rtol=1e-9)


def test_fit_evaluates_model():
    y = 3 + 2 * np.cos(2 * PHI + 0.4)
    fit = fit_sinusoid(curve(y))
    assert np.allclose(fit(PHI), y, atol=1e-9)
    assert np.isclose(fit.visibility, 2 / 3)
    assert set(fit.to_dict()) >= {"period", "phase_offset", "amplitude", "offset", "visibility",
                                  "rms_residual"}


@pytest.mark.parametrize("xi", [None, 0.0, np.pi / 4])
def test_fit_recovers_analytic_periods(xi):
    cfg = EraserConfig.with_qwp(xi)
    expected = {"I1": 2 * np.pi, "I3": 2 * np.pi, "C12": np.pi}
    if xi is not None:
        expected["C1234"] = np.pi / 2
        expected["C34"] = np.pi
    for label, period in expected.items():
        fit = fit_sinusoid(correlate(cfg, label))
        assert abs(fit.period / period - 1) < 1e-6, label


def test_harmonic_hint():
    fit = fit_sinusoid(curve(1 + np.cos(2 * PHI)), harmonic_hint=2)
    assert np.isclose(fit.period, np.pi)


def test_fit_rejects_bad_input():
    with pytest.raises(ValueError):
        fit_sinusoid(FringeCurve(PHI[:5], np.ones(5), "x"))
    with pytest.raises(FitError):
        fit_sinusoid(curve(np.ones_like(PHI)))


def test_fit_failure_on_two_tone_curve():
    y = 2 + np.cos(PHI) + np.cos(3.3 * PHI)
    with pytest.raises(FitError):
        fit_sinusoid(curve(y))
    with pytest.raises(FitError):
        dominant_frequency(PHI, np.cos(PHI) + np.cos(3 * PHI))


def test_poisson_noise_period_error_below_one_percent():
    lam = 2000 * (1 + np.cos(2 * PHI))
    errs = []
    for seed in range(100):
        y = np.random.default_rng(seed).poisson(lam).astype(float)
        errs.append(abs(fit_sinusoid(curve(y, stderr=np.sqrt(y))).period / np.pi - 1))
    assert max(errs) < 0.01


def test_fwhm_examples():
    assert np.isclose(fwhm(curve(1 - np.cos(PHI))), np.pi, atol=1e-3)
    assert np.isclose(fwhm(curve(np.sin(PHI) ** 2)), np.pi / 2, atol=1e-3)
    assert np.isclose(fwhm(curve((1 - np.cos(PHI)) ** 2)), c13_fwhm(), atol=2e-3)


def test_fwhm_refined_by_root_finding():
    f = lambda x: (1 - np.cos(x)) ** 2
    assert abs(fwhm(curve(f(PHI)), func=f) - c13_fwhm()) < 1e-9
    g = lambda x: np.sin(x) ** 4
    assert abs(fwhm(curve(g(PHI)), func=g) - sin4_fwhm()) < 1e-9
    h = lambda x: 1 - np.cos(x)
    assert abs(fwhm(curve(h(PHI)), func=h) - np.pi) < 1e-9


def test_fwhm_edge_peaked_curve_uses_interior_peak():
    assert np.isclose(fwhm(curve(1 + np.cos(PHI))), np.pi, atol=1e-3)


def test_fwhm_flat_raises():
    with pytest.raises(ValueError):
        fwhm(curve(np.ones_like(PHI)))


def test_fwhm_scale_ordering_xi0_family():
    cfg = EraserConfig.with_qwp(0.0)
    widths = []
    for label in ("I1", "C12", "C1234"):
        func = lambda x, l=label: float(correlate(cfg, l, np.array([x])).values[0])
        widths.append(fwhm(correlate(cfg, label), func) / np.pi)
    assert np.allclose(widths, [1, 0.5, 0.25], atol=1e-9)


def _fit(period, amp=1.0):
    return FringeFit(period, 0.0, amp, 1.0, amp, 0.0, 0.0)


def test_classification_rules():
    assert classify_resolution(_fit(np.pi / 2), 4, 0.7854).classification == HEISENBERG
    assert classify_resolution(_fit(2 * np.pi), 2, c13_fwhm()).classification == SQL
    assert classify_resolution(_fit(np.pi), 4, sin4_fwhm()).classification == BEYOND_SQL
    assert classify_resolution(_fit(2 * np.pi), 1, np.pi).classification == CLASSICAL
    assert classify_resolution(_fit(2 * np.pi), 2, np.pi).classification == CLASSICAL
    assert classify_resolution(None, 2, np.nan).classification == INDETERMINATE
    bad = FringeFit(np.pi, 0.0, 1.0, 1.0, 1.0, 0.5, 0.5)
    assert classify_resolution(bad, 2, 1.0).classification == INDETERMINATE


def test_report_fields():
    rep = classify_resolution(_fit(np.pi), 4, sin4_fwhm())
    assert np.isclose(rep.scale_vs_reference, 0.364, atol=1e-3)
    assert np.isclose(rep.sql_scale, 0.5)
    assert set(rep.to_dict()) == {"order", "fwhm", "reference_fwhm", "scale_vs_reference",
                                  "period", "sql_scale", "classification"}


def test_resolution_report_on_no_qwp_panels():
    ref = no_qwp_reference()
    _, rep = resolution_report(ref["C13"], 2)
    assert rep.classification == SQL
    _, rep = resolution_report(ref["C1234"], 4)
    assert rep.classification == BEYOND_SQL

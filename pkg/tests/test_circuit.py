import numpy as np
import pytest

from eraser_sim.circuit import (BranchConfig, EraserConfig, PhaseGrid, detection_probabilities,
                                detector_amplitude, detector_intensity, fringe_coefficients,
                                intensities, mzi_outputs)
from eraser_sim.fringe import fit_sinusoid
from eraser_sim.correlations import FringeCurve
from eraser_sim.polarization import JonesState, same_up_to_phase

from oracles import i_plain, i_qwp, no_qwp_singles

Q = np.pi / 4
PHI = PhaseGrid().values


def test_mzi_outputs_match_closed_forms():
    phi = np.linspace(-7, 7, 101)
    e0 = 1.3
    e_a, e_b = mzi_outputs(phi, e0**2)
    w = np.exp(1j * phi)
    assert np.allclose(e_a.as_array(), np.stack([1j * e0 / 2 * np.ones_like(w), 1j * e0 / 2 * w], -1),
                       atol=1e-12)
    assert np.allclose(e_b.as_array(), np.stack([e0 / 2 * np.ones_like(w), -e0 / 2 * w], -1),
                       atol=1e-12)
    assert np.allclose(e_a.power + e_b.power, e0**2, atol=1e-12)


def test_mzi_examples():
    e_a, _ = mzi_outputs(0.0)
    assert same_up_to_phase(e_a, JonesState(0.5, 0.5))
    _, e_b = mzi_outputs(np.pi)
    assert same_up_to_phase(e_b, JonesState(0.5, 0.5))


def test_intensity_closed_forms_random_triples():
    rng = np.random.default_rng(7)
    phi, theta, xi = rng.uniform(-2 * np.pi, 2 * np.pi, (3, 10_000))
    for d, want in zip((1, 2), i_qwp(phi, theta, xi)):
        got = detector_intensity(BranchConfig(d, xi, theta), phi)
        assert np.abs(got - want).max() < 1e-10
    for d, want in zip((3, 4), i_plain(phi, theta)):
        got = detector_intensity(BranchConfig(d, None, theta), phi)
        assert np.abs(got - want).max() < 1e-10


def test_intensity_scales_with_i0():
    b = BranchConfig(2, 0.3, 0.4)
    assert np.isclose(detector_intensity(b, 0.7, 5.0), 5.0 * detector_intensity(b, 0.7, 1.0))


def test_no_qwp_intensities():
    got = intensities(EraserConfig.with_qwp(None), PHI)
    ref = no_qwp_singles(PHI)
    for d in range(4):
        assert np.abs(got[:, d] - ref[f"I{d + 1}"]).max() < 1e-12


def test_detector_amplitude_examples():
    assert detector_amplitude(BranchConfig(3), 0.0).power < 1e-30
    assert np.isclose(detector_intensity(BranchConfig(1, 0.0), 0.0), 1 / 16, atol=1e-15)
    assert detector_intensity(BranchConfig(1, Q), np.pi / 2) < 1e-30
    assert np.isclose(detector_intensity(BranchConfig(2), 0.0), 1 / 8)
    assert np.isclose(detector_intensity(BranchConfig(1, 0.0), np.pi / 2), 1 / 8)
    assert detector_intensity(BranchConfig(2, 0.0), np.pi / 2) < 1e-30


@pytest.mark.parametrize("d,xi", [(1, None), (2, 0.0), (3, None), (4, None), (1, 1.1)])
def test_zero_polarizer_angle_kills_fringe(d, xi):
    got = detector_intensity(BranchConfig(d, xi, 0.0), PHI)
    assert np.allclose(got, 1 / 16, atol=1e-15)


@pytest.mark.parametrize("xi", [None, 0.0, Q, 0.37])
def test_probabilities_sum_to_quarter(xi):
    p, lost = detection_probabilities(EraserConfig.with_qwp(xi))
    assert np.allclose(p.sum(-1), 0.25, atol=1e-14)
    assert np.allclose(p.sum(-1) + lost, 1.0)
    assert np.all((p >= 0) & (p <= 1))


def test_probability_example_no_qwp_phi0():
    p, _ = detection_probabilities(EraserConfig.with_qwp(None), np.array(0.0))
    assert np.allclose(p, [0, 1 / 8, 0, 1 / 8], atol=1e-15)


@pytest.mark.parametrize("xi", [None, 0.0, Q, -0.8])
@pytest.mark.parametrize("theta", [Q, 0.3])
def test_complementary_pairs_flat(xi, theta):
    i = intensities(EraserConfig.with_qwp(xi, theta), PHI)
    assert np.ptp(i[:, 0] + i[:, 1]) < 1e-14
    assert np.ptp(i[:, 2] + i[:, 3]) < 1e-14


def test_swap_between_0_and_45_deg():
    i0 = intensities(EraserConfig.with_qwp(0.0), PHI)
    i45 = intensities(EraserConfig.with_qwp(Q), PHI)
    assert np.abs(i45[:, 0] - i0[:, 1]).max() < 1e-12
    assert np.abs(i45[:, 1] - i0[:, 0]).max() < 1e-12
    assert np.abs(i45[:, 2:] - i0[:, 2:]).max() < 1e-12


def _peak(values):
    return fit_sinusoid(FringeCurve(PHI, values, "x")).peak_phase


def test_qwp_shifts_fringes_by_quarter_period():
    # shift in the argument: I1Q(phi) = I1(phi + pi/2), I2Q(phi) = I1(phi - pi/2)
    plain = EraserConfig.with_qwp(None)
    q = intensities(EraserConfig.with_qwp(0.0), PHI)
    assert np.abs(q[:, 0] - intensities(plain, PHI + np.pi / 2)[:, 0]).max() < 1e-12
    assert np.abs(q[:, 1] - intensities(plain, PHI - np.pi / 2)[:, 0]).max() < 1e-12


def test_qwp_peak_lags_i2_reference_by_quarter_period():
    ref = intensities(EraserConfig.with_qwp(None), PHI)[:, 1]
    q = intensities(EraserConfig.with_qwp(0.0), PHI)[:, 0]
    d = (_peak(q) - _peak(ref) + np.pi) % (2 * np.pi) - np.pi
    assert np.isclose(d, np.pi / 2, atol=1e-6)


@pytest.mark.parametrize("xi", [None, 0.0, 0.6])
def test_fringe_coefficients_reproduce_intensities(xi):
    cfg = EraserConfig.with_qwp(xi, 0.5)
    c = fringe_coefficients(cfg)
    rebuilt = c[:, 0] + c[:, 1] * np.cos(PHI)[:, None] + c[:, 2] * np.sin(PHI)[:, None]
    assert np.abs(rebuilt - intensities(cfg, PHI) / cfg.i0).max() < 1e-15


def test_config_validation():
    with pytest.raises(ValueError):
        PhaseGrid(1.0, 0.0, 10)
    with pytest.raises(ValueError):
        BranchConfig(5)
    with pytest.raises(ValueError):
        EraserConfig((BranchConfig(1),) * 4)
    cfg = EraserConfig.with_qwp(0.0)
    assert cfg.branch(3).qwp is None
    assert cfg.replace_branch(BranchConfig(3, 0.2)).branch(3).qwp == 0.2

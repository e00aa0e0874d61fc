import numpy as np
import pytest

from eraser_sim.circuit import EraserConfig, PhaseGrid, detection_probabilities
from eraser_sim.correlations import all_specs
from eraser_sim.oracle import enumeration_oracle, subset_probability, thinning_probability


@pytest.mark.parametrize("xi", [None, 0.0])
@pytest.mark.parametrize("mu", [0.01, 0.5])
def test_enumeration_matches_thinning(xi, mu):
    p, _ = detection_probabilities(EraserConfig.with_qwp(xi, grid=PhaseGrid(points=37)))
    pattern, tail = enumeration_oracle(p, mu, kmax=6)
    assert np.allclose(pattern.sum(-1), 1 - tail, atol=1e-14)
    for spec in all_specs():
        exact = thinning_probability(p, mu, spec.subset)
        approx = subset_probability(pattern, spec.subset)
        assert np.abs(exact - approx).max() <= tail + 1e-15


def test_truncation_tail_small_for_faint_light():
    _, tail = enumeration_oracle(np.full(4, 0.0625), 0.01, kmax=6)
    assert tail < 1e-9


def test_no_photon_no_click():
    pattern, _ = enumeration_oracle(np.zeros(4), 0.3)
    assert np.isclose(pattern[0], 1.0)

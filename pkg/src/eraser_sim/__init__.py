"""Simulation of phase-controlled quantum-eraser super-resolution."""
from .circuit import (BranchConfig, EraserConfig, PhaseGrid, detection_probabilities,
                      detector_amplitude, detector_intensity, mzi_outputs)
from .correlations import CorrelationSpec, FringeCurve, correlate, no_qwp_reference
from .fringe import FitError, FringeFit, ResolutionReport, classify_resolution, fit_sinusoid, fwhm
from .photon_mc import (CountsTable, NoiseConfig, SourceConfig, coincidence_curve, cw_scan,
                        run_scan, sample_window)

__version__ = "0.1.0"

__all__ = [
    "BranchConfig", "EraserConfig", "PhaseGrid", "detection_probabilities",
    "detector_amplitude", "detector_intensity", "mzi_outputs",
    "CorrelationSpec", "FringeCurve", "correlate", "no_qwp_reference",
    "FitError", "FringeFit", "ResolutionReport", "classify_resolution", "fit_sinusoid", "fwhm",
    "CountsTable", "NoiseConfig", "SourceConfig", "coincidence_curve", "cw_scan", "run_scan",
    "sample_window",
]

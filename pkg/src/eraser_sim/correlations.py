"""Intensity correlations between eraser detectors."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .circuit import DETECTORS, EraserConfig, intensities

ORDERS = (1, 2, 4)

# Coincidence compensation: each amplitude of an n-fold product is scaled by
# sqrt(n), so each intensity by n and the product by n**n.
COMPENSATION = {n: float(n**n) for n in ORDERS}

FIG2_LABELS = ("I1", "I2", "I3", "I4", "C12", "C34", "C13", "C24", "C23", "C14", "C1234")


@dataclass(frozen=True)
class CorrelationSpec:
    subset: tuple[int, ...]

    def __post_init__(self):
        subset = tuple(sorted(self.subset))
        if len(set(subset)) != len(subset):
            raise ValueError(f"repeated detector in {self.subset}")
        if any(d not in DETECTORS for d in subset):
            raise ValueError(f"unknown detector in {self.subset}")
        if len(subset) not in ORDERS:
            raise ValueError(f"correlation order must be one of {ORDERS}, got {len(subset)}")
        object.__setattr__(self, "subset", subset)

    @property
    def order(self) -> int:
        return len(self.subset)

    @property
    def label(self) -> str:
        digits = "".join(map(str, self.subset))
        return f"I{digits}" if self.order == 1 else f"C{digits}"

    @classmethod
    def parse(cls, label: str) -> "CorrelationSpec":
        m = re.fullmatch(r"\s*([IC])([1-4]+)\s*", label)
        if m is None:
            raise ValueError(f"bad curve label {label!r}; expected e.g. I1, C12, C1234")
        kind, digits = m.groups()
        spec = cls(tuple(int(c) for c in digits))
        if (kind == "I") != (spec.order == 1):
            raise ValueError(f"bad curve label {label!r}: I is for singles, C for products")
        return spec


@dataclass
class FringeCurve:
    """One fringe trace. ``values`` already include ``normalization``."""

    phi: np.ndarray
    values: np.ndarray
    label: str
    normalization: float = 1.0
    stderr: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.phi.shape != self.values.shape:
            raise ValueError("phi and values must have the same shape")

    @property
    def raw(self) -> np.ndarray:
        return self.values / self.normalization


def product_curve(phi, per_detector: np.ndarray, spec: CorrelationSpec, **meta) -> FringeCurve:
    """Compensated product of per-detector intensities ``(..., 4)``."""
    raw = np.prod(per_detector[..., [d - 1 for d in spec.subset]], axis=-1)
    norm = COMPENSATION[spec.order]
    return FringeCurve(phi, np.maximum(raw * norm, 0.0), spec.label, norm, meta=dict(meta))


def correlate(config: EraserConfig, spec: CorrelationSpec | str, phi=None) -> FringeCurve:
    if isinstance(spec, str):
        spec = CorrelationSpec.parse(spec)
    phi = config.phase_grid if phi is None else np.asarray(phi, dtype=float)
    return product_curve(phi, intensities(config, phi), spec, source="analytic")


def all_specs() -> list[CorrelationSpec]:
    """Singles, all pairs and the four-fold product."""
    specs = [CorrelationSpec((d,)) for d in DETECTORS]
    specs += [CorrelationSpec(p) for p in combinations(DETECTORS, 2)]
    specs.append(CorrelationSpec(DETECTORS))
    return specs


def no_qwp_reference(config: EraserConfig | None = None) -> dict[str, FringeCurve]:
    """The eleven curves of the QWP-free eraser with diagonal polarizers."""
    config = config or EraserConfig()
    for b in config.branches:
        if b.qwp is not None or not np.isclose(b.theta, np.pi / 4):
            raise ValueError("reference set needs all branches without QWP at theta = 45 deg")
    phi = config.phase_grid
    per_det = intensities(config, phi)
    return {lbl: product_curve(phi, per_det, CorrelationSpec.parse(lbl), source="analytic")
            for lbl in FIG2_LABELS}

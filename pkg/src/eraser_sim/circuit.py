"""The four-detector eraser circuit.

Topology: H-polarized laser -> HWP(22.5 deg) -> PBS -> two arms, the V arm
carrying the PZT phase -> 50/50 BS.  Port A leaves the setup; port B is fanned
out by a two-level BS tree:

    B --BS1--t--BS2--t--> detector 1
           |        r--mirror--> detector 2
           r--BS3--r--> detector 3
                    t--mirror--> detector 4

Each branch has an optional QWP followed by a polarizer.  Everything is
built from :mod:`eraser_sim.polarization` elements; closed forms are not used.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .polarization import (
    JonesState,
    apply,
    bs_scatter,
    hwp_matrix,
    mirror_flip,
    pbs_split,
    polarizer_project,
    qwp_matrix,
)

DETECTORS = (1, 2, 3, 4)
DIAGONAL = np.pi / 4
HWP_ANGLE = np.pi / 8


@dataclass(frozen=True)
class BranchConfig:
    detector_id: int
    qwp: float | None = None  # QWP rotation xi in radians, None = no plate
    theta: float = DIAGONAL  # polarizer axis

    def __post_init__(self):
        if self.detector_id not in DETECTORS:
            raise ValueError(f"detector_id must be one of {DETECTORS}, got {self.detector_id}")


@dataclass(frozen=True)
class PhaseGrid:
    start: float = -2 * np.pi
    stop: float = 2 * np.pi
    points: int = 360

    def __post_init__(self):
        if self.points < 2:
            raise ValueError(f"phase grid needs at least 2 points, got {self.points}")
        if not self.stop > self.start:
            raise ValueError("phase grid must be strictly increasing")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class EraserConfig:
    branches: tuple[BranchConfig, ...] = tuple(BranchConfig(d) for d in DETECTORS)
    grid: PhaseGrid = field(default_factory=PhaseGrid)
    i0: float = 1.0

    def __post_init__(self):
        ids = sorted(b.detector_id for b in self.branches)
        if ids != list(DETECTORS):
            raise ValueError(f"need exactly one branch per detector {DETECTORS}, got {ids}")
        if not self.i0 > 0:
            raise ValueError("i0 must be positive")
        object.__setattr__(self, "branches",
                           tuple(sorted(self.branches, key=lambda b: b.detector_id)))

    @classmethod
    def with_qwp(cls, xi: float | None, theta: float = DIAGONAL, **kw) -> "EraserConfig":
        """QWP at ``xi`` on branches 1 and 2 (the experiment's layout)."""
        branches = tuple(BranchConfig(d, xi if d in (1, 2) else None, theta) for d in DETECTORS)
        return cls(branches=branches, **kw)

    @property
    def phase_grid(self) -> np.ndarray:
        return self.grid.values

    def branch(self, detector_id: int) -> BranchConfig:
        return self.branches[detector_id - 1]

    def replace_branch(self, branch: BranchConfig) -> "EraserConfig":
        branches = tuple(branch if b.detector_id == branch.detector_id else b for b in self.branches)
        return replace(self, branches=branches)


def mzi_outputs(phi, i0: float = 1.0) -> tuple[JonesState, JonesState]:
    """Fields at the two MZI output ports for arm phase ``phi``."""
    phi = np.asarray(phi, dtype=float)
    src = apply(hwp_matrix(HWP_ANGLE), JonesState.horizontal(np.sqrt(i0)))
    h_arm, v_arm = pbs_split(src)
    v_arm = v_arm.times(np.exp(1j * phi))
    h_arm = h_arm.times(np.ones_like(phi))
    return bs_scatter(h_arm, v_arm)


def fan_out(port: JonesState) -> dict[int, JonesState]:
    """Split one MZI port over the four detector branches."""
    vac = JonesState.vacuum(port.scale)
    r1, t1 = bs_scatter(port, vac)
    r2, t2 = bs_scatter(t1, vac)
    r3, t3 = bs_scatter(r1, vac)
    return {1: t2, 2: mirror_flip(r2), 3: r3, 4: mirror_flip(t3)}


def branch_field(detector_id: int, phi, i0: float = 1.0) -> JonesState:
    """Field arriving at a branch, before its QWP and polarizer."""
    _, port_b = mzi_outputs(phi, i0)
    return fan_out(port_b)[detector_id]


def detector_amplitude(branch: BranchConfig, phi, i0: float = 1.0) -> JonesState:
    state = branch_field(branch.detector_id, phi, i0)
    if branch.qwp is not None:
        state = apply(qwp_matrix(branch.qwp), state)
    out, _ = polarizer_project(state, branch.theta)
    return out


def detector_intensity(branch: BranchConfig, phi, i0: float = 1.0):
    """Mean intensity at the detector, in the units of ``i0``."""
    return detector_amplitude(branch, phi, i0).power


def intensities(config: EraserConfig, phi=None) -> np.ndarray:
    """Intensities of all four detectors, shape ``phi.shape + (4,)``."""
    phi = config.phase_grid if phi is None else np.asarray(phi, dtype=float)
    return np.stack([detector_intensity(b, phi, config.i0) for b in config.branches], axis=-1)


def detection_probabilities(config: EraserConfig, phi=None) -> tuple[np.ndarray, np.ndarray]:
    """Per-photon detection probabilities ``(p[..., 4], p_lost)``.

    ``p_lost`` collects the unused MZI port and polarizer rejection.
    """
    # unit-power source: Born-rule probabilities are the intensities over I0
    p = intensities(replace(config, i0=1.0), phi)
    p = np.clip(p, 0.0, 1.0)
    return p, 1.0 - p.sum(axis=-1)


def fringe_coefficients(config: EraserConfig) -> np.ndarray:
    """Coefficients ``(a, b, c)`` per detector with p(phi) = a + b cos phi + c sin phi.

    Exact because each detector amplitude is affine in exp(i phi).  Shape (4, 3).
    """
    unit = replace(config, i0=1.0)
    at0, at90, at180 = intensities(unit, np.array([0.0, np.pi / 2, np.pi]))
    a = 0.5 * (at0 + at180)
    b = 0.5 * (at0 - at180)
    c = at90 - a
    return np.stack([a, b, c], axis=-1)

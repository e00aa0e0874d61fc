"""Jones vectors and element matrices for the eraser optics.

Amplitudes may be Python complex scalars or numpy arrays; every operation
broadcasts, so a whole phase grid can be pushed through the circuit at once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT_HALF = np.sqrt(0.5)


def _is_zero(x) -> bool:
    return bool(np.all(np.asarray(x) == 0))


@dataclass(frozen=True)
class JonesState:
    """Field amplitude on the H/V basis; ``scale`` carries E0."""

    h: complex | np.ndarray
    v: complex | np.ndarray
    scale: float = 1.0

    @classmethod
    def vacuum(cls, scale: float = 1.0) -> "JonesState":
        return cls(0j, 0j, scale)

    @classmethod
    def horizontal(cls, scale: float = 1.0) -> "JonesState":
        return cls(1 + 0j, 0j, scale)

    @classmethod
    def vertical(cls, scale: float = 1.0) -> "JonesState":
        return cls(0j, 1 + 0j, scale)

    @property
    def norm2(self):
        return np.abs(self.h) ** 2 + np.abs(self.v) ** 2

    @property
    def power(self):
        return self.norm2 * self.scale**2

    @property
    def is_vacuum(self) -> bool:
        return _is_zero(self.h) and _is_zero(self.v)

    def times(self, factor) -> "JonesState":
        return JonesState(self.h * factor, self.v * factor, self.scale)

    def as_array(self) -> np.ndarray:
        """Amplitudes with the scale folded in, shape ``(..., 2)``."""
        h, v = np.broadcast_arrays(np.asarray(self.h, complex), np.asarray(self.v, complex))
        return np.stack([h, v], axis=-1) * self.scale


def superpose(a: JonesState, ca, b: JonesState, cb) -> JonesState:
    """Coherent sum ``ca*a + cb*b``.

    Scales are kept when they agree (or one side is vacuum); otherwise they
    are folded into the amplitudes.
    """
    if b.is_vacuum or a.scale == b.scale:
        scale = a.scale
        fa, fb = ca, cb * (b.scale / scale if not b.is_vacuum else 1.0)
    elif a.is_vacuum:
        scale = b.scale
        fa, fb = ca, cb
    else:
        scale = 1.0
        fa, fb = ca * a.scale, cb * b.scale
    return JonesState(fa * a.h + fb * b.h, fa * a.v + fb * b.v, scale)


@dataclass(frozen=True)
class ElementMatrix:
    m00: complex | np.ndarray
    m01: complex | np.ndarray
    m10: complex | np.ndarray
    m11: complex | np.ndarray

    @classmethod
    def identity(cls) -> "ElementMatrix":
        return cls(1 + 0j, 0j, 0j, 1 + 0j)

    @classmethod
    def from_array(cls, m) -> "ElementMatrix":
        m = np.asarray(m, dtype=complex)
        return cls(m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1])

    def as_array(self) -> np.ndarray:
        parts = np.broadcast_arrays(*(np.asarray(x, complex) for x in
                                      (self.m00, self.m01, self.m10, self.m11)))
        return np.stack(parts, axis=-1).reshape(parts[0].shape + (2, 2))

    def __matmul__(self, other: "ElementMatrix") -> "ElementMatrix":
        a, b = self, other
        return ElementMatrix(
            a.m00 * b.m00 + a.m01 * b.m10,
            a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10,
            a.m10 * b.m01 + a.m11 * b.m11,
        )

    def dagger(self) -> "ElementMatrix":
        return ElementMatrix(np.conj(self.m00), np.conj(self.m10),
                             np.conj(self.m01), np.conj(self.m11))


def apply(matrix: ElementMatrix, state: JonesState) -> JonesState:
    m = matrix
    return JonesState(m.m00 * state.h + m.m01 * state.v,
                      m.m10 * state.h + m.m11 * state.v,
                      state.scale)


def rotation_matrix(angle) -> ElementMatrix:
    c, s = np.cos(angle), np.sin(angle)
    return ElementMatrix(c + 0j, s + 0j, -s + 0j, c + 0j)


def retarder_matrix(retardance, axis_angle) -> ElementMatrix:
    """Linear retarder whose V-like axis lags by ``retardance``, rotated by
    ``axis_angle`` counterclockwise from horizontal."""
    c, s = np.cos(axis_angle), np.sin(axis_angle)
    g = np.exp(1j * np.asarray(retardance))
    # R(-a) diag(1, g) R(a), written out
    return ElementMatrix(c * c + g * s * s, c * s * (1 - g),
                         c * s * (1 - g), s * s + g * c * c)


def hwp_matrix(angle) -> ElementMatrix:
    """Half-wave plate at ``angle``; H maps to linear polarization at 2*angle."""
    c2, s2 = np.cos(2 * angle), np.sin(2 * angle)
    return ElementMatrix(c2 + 0j, s2 + 0j, s2 + 0j, -c2 + 0j)


def qwp_matrix(xi) -> ElementMatrix:
    """Quarter-wave plate with slow axis horizontal at ``xi = 0``.

    The rotation is modelled as the eraser experiments treat it: a global
    ``exp(-2i xi)`` and a relative ``exp(4i xi)`` on the V term on top of the
    +pi/2 V-phase gain.  This is a diagonal unitary, not ``retarder_matrix``
    at a rotated axis.
    """
    xi = np.asarray(xi, dtype=float)
    return ElementMatrix(np.exp(-2j * xi), 0j * xi, 0j * xi, 1j * np.exp(2j * xi))


def polarizer_matrix(theta) -> ElementMatrix:
    c, s = np.cos(theta), np.sin(theta)
    return ElementMatrix(c * c + 0j, c * s + 0j, c * s + 0j, s * s + 0j)


MIRROR = ElementMatrix(-1 + 0j, 0j, 0j, 1 + 0j)


def mirror_flip(state: JonesState) -> JonesState:
    """Mirror reflection: pi phase on H only."""
    return JonesState(-state.h, state.v, state.scale)


def bs_scatter(in_a: JonesState, in_b: JonesState) -> tuple[JonesState, JonesState]:
    """50/50 nonpolarizing beam splitter, reflection carries a factor i.

    ``out_c`` receives ``a`` reflected and ``b`` transmitted; ``out_d`` the
    converse.
    """
    out_c = superpose(in_a, 1j * SQRT_HALF, in_b, SQRT_HALF)
    out_d = superpose(in_a, SQRT_HALF, in_b, 1j * SQRT_HALF)
    return out_c, out_d


def pbs_split(state: JonesState) -> tuple[JonesState, JonesState]:
    """Polarizing beam splitter: H is transmitted, V reflected (factor i)."""
    zero = 0j * np.asarray(state.h)
    return (JonesState(state.h + 0j, zero, state.scale),
            JonesState(zero, 1j * state.v, state.scale))


def polarizer_project(state: JonesState, theta) -> tuple[JonesState, np.ndarray | float]:
    """Project onto the axis ``(cos theta, sin theta)``.

    Returns the passed state (still on the H/V basis) and the pass
    probability relative to the input norm (0 for vacuum input).
    """
    c, s = np.cos(theta), np.sin(theta)
    amp = c * state.h + s * state.v
    out = JonesState(amp * c, amp * s, state.scale)
    n_in = state.norm2
    with np.errstate(invalid="ignore", divide="ignore"):
        prob = np.where(n_in > 0, np.abs(amp) ** 2 / np.where(n_in > 0, n_in, 1.0), 0.0)
    if np.ndim(prob) == 0:
        prob = float(prob)
    return out, prob


def canonical_phase(state: JonesState) -> JonesState:
    """Remove the global phase: the larger-magnitude component becomes real
    and positive (ties go to H)."""
    h = np.asarray(state.h, complex)
    v = np.asarray(state.v, complex)
    h, v = np.broadcast_arrays(h, v)
    lead = np.where(np.abs(h) >= np.abs(v), h, v)
    rot = np.exp(-1j * np.angle(lead))  # angle(0) = 0, so vacuum is left alone
    return JonesState(h * rot, v * rot, state.scale)


def same_up_to_phase(a: JonesState, b: JonesState, atol: float = 1e-12) -> bool:
    ca, cb = canonical_phase(a), canonical_phase(b)
    return bool(np.allclose(ca.h * ca.scale, cb.h * cb.scale, atol=atol, rtol=0)
                and np.allclose(ca.v * ca.scale, cb.v * cb.scale, atol=atol, rtol=0))

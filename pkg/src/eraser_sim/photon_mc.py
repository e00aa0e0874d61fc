"""Monte Carlo photon counting and cw emulation of the eraser scan.

Each phase point gets its own random stream,
``SeedSequence(seed, spawn_key=(point_index,))``, so points can be sampled in
any order or concurrently and the merged table is the same.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .circuit import EraserConfig, detection_probabilities, fringe_coefficients
from .correlations import COMPENSATION, CorrelationSpec, FringeCurve, all_specs


@dataclass(frozen=True)
class SourceConfig:
    mu: float = 0.01  # mean photons per window
    window_length: float = 1e-7  # s, also the coincidence window
    integration_time: float = 0.1  # s per phase point
    dark_count_prob: float = 0.0  # not modelled, must stay 0
    dead_time: float = 0.0  # not modelled, must stay 0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not (self.window_length > 0 and self.integration_time > 0):
            raise ValueError("window_length and integration_time must be positive")
        ratio = self.integration_time / self.window_length
        if ratio < 1 or abs(ratio - round(ratio)) > 1e-6 * ratio:
            raise ValueError("integration_time must be a whole number of windows")
        if self.dark_count_prob != 0 or self.dead_time != 0:
            raise ValueError("dark counts and dead time are not modelled; leave them at 0")

    @property
    def windows(self) -> int:
        return int(round(self.integration_time / self.window_length))


@dataclass(frozen=True)
class NoiseConfig:
    """Air-turbulence phase drift: a Gaussian walk with ``sigma`` rad per
    sqrt(window), reflected into ``[-bound, bound]``, restarted at each point."""

    enabled: bool = False
    sigma: float = 1e-4
    bound: float = np.pi

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if not self.bound > 0:
            raise ValueError("bound must be positive")

    @property
    def active(self) -> bool:
        return self.enabled and self.sigma > 0


@dataclass
class CountsTable:
    """Window counts per click pattern at every phase point.

    ``patterns[i, m]`` counts windows at point ``i`` whose set of clicking
    detectors has bitmask ``m`` (bit d-1 for detector d).
    """

    phi: np.ndarray
    patterns: np.ndarray
    windows: int
    meta: dict = field(default_factory=dict)

    @property
    def singles(self) -> np.ndarray:
        return np.stack([self.coincidences((d,)) for d in range(1, 5)], axis=-1)

    def coincidences(self, subset) -> np.ndarray:
        subset = tuple(subset)
        if not subset or any(d not in (1, 2, 3, 4) for d in subset):
            raise KeyError(f"unknown detector subset {subset}")
        want = sum(1 << (d - 1) for d in set(subset))
        sel = [m for m in range(_kernels.N_PATTERNS) if m & want == want]
        return self.patterns[:, sel].sum(axis=1)

    def coincidence_map(self) -> dict[str, np.ndarray]:
        return {s.label: self.coincidences(s.subset) for s in all_specs()}

    def __eq__(self, other):
        return (isinstance(other, CountsTable) and self.windows == other.windows
                and np.array_equal(self.phi, other.phi)
                and np.array_equal(self.patterns, other.patterns))


def point_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def default_threads() -> int:
    env = os.environ.get("ERASER_SIM_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def _map_points(fn, n: int, threads: int | None):
    threads = default_threads() if threads is None else max(1, threads)
    if threads == 1 or n == 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


def _truncated_poisson(rng, mu: float, size: int) -> np.ndarray:
    """Photon numbers of windows known to hold at least one photon."""
    kmax = max(8, int(mu + 12 * np.sqrt(mu) + 20))
    k = np.arange(1, kmax + 1)
    logpmf = k * np.log(mu) - np.cumsum(np.log(k))
    pmf = np.exp(logpmf - mu) / -np.expm1(-mu)
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(size), side="right") + 1


def _walk(rng, steps_var: np.ndarray, noise: NoiseConfig) -> np.ndarray:
    """Reflected walk sampled after increments of the given variances (in windows)."""
    free = np.cumsum(noise.sigma * np.sqrt(steps_var) * rng.standard_normal(len(steps_var)))
    return _kernels.fold(free, noise.bound)


def sample_window(mu: float, probs, rng: np.random.Generator) -> np.ndarray:
    """One coincidence window: Poisson photon number, categorical routing.

    ``probs`` lists p1..p4 and p_lost (summing to 1).  Returns four click flags.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (5,) or np.any(probs < 0) or abs(probs.sum() - 1) > 1e-9:
        raise ValueError("probs must be five nonnegative numbers summing to 1")
    k = rng.poisson(mu)
    hits = rng.multinomial(k, probs / probs.sum())
    return hits[:4] > 0


def sample_point(probs: np.ndarray, windows: int, mu: float, rng: np.random.Generator,
                 phi: float = 0.0, coeffs: np.ndarray | None = None,
                 noise: NoiseConfig | None = None) -> np.ndarray:
    """Click-pattern histogram (16 bins) accumulated over ``windows`` windows."""
    m = int(rng.binomial(windows, -np.expm1(-mu)))
    k = _truncated_poisson(rng, mu, m)
    u = rng.random(int(k.sum()))
    if noise is not None and noise.active and m:
        pos = np.sort(rng.choice(windows, size=m, replace=False))
        delta = _walk(rng, np.diff(pos, prepend=0).astype(float), noise)
        hist = _kernels.tally_drift(k, u, coeffs, np.cos(phi + delta), np.sin(phi + delta))
    else:
        hist = _kernels.tally_static(k, u, np.cumsum(probs))
    hist[0] += windows - m
    return hist


def run_scan(eraser: EraserConfig, source: SourceConfig | None = None,
             noise: NoiseConfig | None = None, seed: int = 0,
             threads: int | None = None) -> CountsTable:
    """Photon-counting PZT scan over the eraser phase grid."""
    source = source or SourceConfig()
    noise = noise or NoiseConfig()
    phi = eraser.phase_grid
    probs, _ = detection_probabilities(eraser, phi)
    coeffs = fringe_coefficients(eraser)

    def one(i):
        return sample_point(probs[i], source.windows, source.mu, point_rng(seed, i),
                            phi[i], coeffs, noise)

    patterns = np.stack(_map_points(one, len(phi), threads))
    return CountsTable(phi, patterns, source.windows,
                       meta={"seed": seed, "mu": source.mu, "noise": noise.active})


def coincidence_curve(table: CountsTable, subset) -> FringeCurve:
    """Raw counts vs phase with Poisson error bars."""
    spec = CorrelationSpec(tuple(subset)) if not isinstance(subset, CorrelationSpec) else subset
    counts = table.coincidences(spec.subset).astype(float)
    return FringeCurve(table.phi, counts, spec.label, 1.0, stderr=np.sqrt(counts),
                       meta={"source": "montecarlo", "windows": table.windows})


def cw_scan(eraser: EraserConfig, noise: NoiseConfig | None = None,
            samples_per_point: int = 30, seed: int = 0,
            source: SourceConfig | None = None, specs=None,
            input_power_uw: float = 300.0, threads: int | None = None) -> dict[str, FringeCurve]:
    """Photodiode/oscilloscope emulation.

    Each point takes ``samples_per_point`` instantaneous intensities spread
    evenly over the integration time, forms compensated products sample by
    sample, and averages.  Values are in units of ``eraser.i0``; the input
    power only labels the output.
    """
    if samples_per_point < 1:
        raise ValueError("samples_per_point must be >= 1")
    noise = noise or NoiseConfig()
    source = source or SourceConfig()
    specs = [CorrelationSpec.parse(s) if isinstance(s, str) else s for s in (specs or all_specs())]
    phi = eraser.phase_grid
    coeffs = fringe_coefficients(eraser)
    step_windows = source.windows / samples_per_point

    def one(i):
        if noise.active:
            delta = _walk(point_rng(seed, i), np.full(samples_per_point, step_windows), noise)
        else:
            delta = np.zeros(samples_per_point)
        ph = phi[i] + delta[:, None]
        inten = eraser.i0 * (coeffs[:, 0] + coeffs[:, 1] * np.cos(ph) + coeffs[:, 2] * np.sin(ph))
        inten = np.maximum(inten, 0.0)
        return [np.mean(np.prod(inten[:, [d - 1 for d in s.subset]], axis=1)) * COMPENSATION[s.order]
                for s in specs]

    values = np.array(_map_points(one, len(phi), threads))
    meta = {"source": "cw", "samples_per_point": samples_per_point,
            "input_power_uW": input_power_uw, "noise": noise.active}
    return {s.label: FringeCurve(phi, values[:, j], s.label, COMPENSATION[s.order], meta=dict(meta))
            for j, s in enumerate(specs)}

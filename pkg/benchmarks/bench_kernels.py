"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends consume the same random draws, so each pair of timings is
also checked for identical output.
"""
from __future__ import annotations

import argparse
import os
import time

import numpy as np

from eraser_sim import _kernels
from eraser_sim.circuit import EraserConfig, PhaseGrid, detection_probabilities, fringe_coefficients
from eraser_sim.photon_mc import NoiseConfig, SourceConfig, _truncated_poisson, run_scan


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def kernel_inputs(mu, windows, seed=0):
    rng = np.random.default_rng(seed)
    cfg = EraserConfig.with_qwp(0.0)
    p, _ = detection_probabilities(cfg, np.array(0.3))
    k = _truncated_poisson(rng, mu, windows)
    u = rng.random(int(k.sum()))
    phase = 0.3 + rng.normal(0, 1e-2, windows)
    return k, u, np.cumsum(p), fringe_coefficients(cfg), np.cos(phase), np.sin(phase)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    k, u, cum, coeffs, c, s = kernel_inputs(1.6, 400_000)
    _kernels.tally_static_numba(k, u, cum)  # compile outside the timings
    _kernels.tally_drift_numba(k, u, coeffs, c, s)

    rows = []
    for name, fast, slow in [
        ("tally_static 4e5 windows", lambda: _kernels.tally_static_numba(k, u, cum),
         lambda: _kernels.tally_static_numpy(k, u, cum)),
        ("tally_drift 4e5 windows", lambda: _kernels.tally_drift_numba(k, u, coeffs, c, s),
         lambda: _kernels.tally_drift_numpy(k, u, coeffs, c, s)),
    ]:
        tf, a = best_of(fast, args.repeat)
        ts, b = best_of(slow, args.repeat)
        rows.append((name, tf, ts, np.array_equal(a, b)))

    cfg = EraserConfig.with_qwp(0.0, grid=PhaseGrid(points=60))
    src = SourceConfig(mu=1.6, window_length=1e-6)
    for label, noise in [("run_scan 60 pts", NoiseConfig()),
                         ("run_scan 60 pts + noise", NoiseConfig(enabled=True))]:
        timings = {}
        for flag in ("1", "0"):
            os.environ["ERASER_SIM_NUMBA"] = flag
            timings[flag] = best_of(lambda: run_scan(cfg, src, noise, seed=0, threads=1),
                                    args.repeat)
        rows.append((label, timings["1"][0], timings["0"][0],
                     timings["1"][1] == timings["0"][1]))
    os.environ.pop("ERASER_SIM_NUMBA", None)

    print(f"{'case':<26}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  identical")
    for name, tf, ts, same in rows:
        print(f"{name:<26}{tf:>10.4f}{ts:>10.4f}{ts / tf:>8.1f}x  {same}")


if __name__ == "__main__":
    main()

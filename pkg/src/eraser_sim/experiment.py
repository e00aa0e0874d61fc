"""Experiment files, run orchestration and result output.

Experiment files are flat ``section.key = value`` text; ``#`` starts a
comment.  Angles are degrees in files and radians everywhere else.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .circuit import DETECTORS, BranchConfig, EraserConfig, PhaseGrid
from .correlations import FIG2_LABELS, CorrelationSpec, FringeCurve, correlate
from .fringe import resolution_report
from .photon_mc import CountsTable, NoiseConfig, SourceConfig, coincidence_curve, cw_scan, run_scan

MODES = ("analytic", "montecarlo", "cw")
REFERENCE_FWHM = math.pi  # first-order fringe, 1 - cos(phi)


class ConfigError(ValueError):
    def __init__(self, message, key=None, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{key + ': ' if key else ''}{message}")
        self.key = key
        self.line = line


@dataclass(frozen=True)
class ExperimentFile:
    mode: str = "analytic"
    name: str = "experiment"
    seed: int = 0
    i0: float = 1.0
    grid_start: float = -360.0
    grid_stop: float = 360.0
    grid_points: int = 360
    qwp: tuple = (0.0, 0.0, None, None)
    polarizer: tuple = (45.0, 45.0, 45.0, 45.0)
    mu: float = 0.01
    window: float = 1e-7
    integration: float = 0.1
    noise_enabled: bool = False
    noise_sigma: float = math.degrees(1e-4)
    noise_bound: float = 180.0
    cw_samples: int = 30
    cw_power_uw: float = 300.0
    outputs: tuple = FIG2_LABELS
    output_dir: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"must be one of {', '.join(MODES)}", "mode")
        if self.grid_points < 2:
            raise ConfigError(f"need at least 2 points, got {self.grid_points}", "grid.points")
        if not self.grid_stop > self.grid_start:
            raise ConfigError("must exceed grid.start", "grid.stop")
        if not self.i0 > 0:
            raise ConfigError("must be positive", "eraser.i0")
        if len(self.qwp) != 4 or len(self.polarizer) != 4:
            raise ConfigError("need one entry per detector", "qwp")
        if not self.mu > 0:
            raise ConfigError(f"must be positive, got {self.mu}", "source.mu")
        if not self.window > 0:
            raise ConfigError("must be positive", "source.window")
        if not self.integration > 0:
            raise ConfigError("must be positive", "source.integration")
        ratio = self.integration / self.window
        if ratio < 1 or abs(ratio - round(ratio)) > 1e-6 * ratio:
            raise ConfigError("must be a whole number of windows", "source.integration")
        if self.noise_sigma < 0:
            raise ConfigError("must be >= 0", "noise.sigma")
        if not self.noise_bound > 0:
            raise ConfigError("must be positive", "noise.bound")
        if self.cw_samples < 1:
            raise ConfigError("must be >= 1", "cw.samples")
        if not self.outputs:
            raise ConfigError("at least one curve required", "outputs")
        if len(set(self.outputs)) != len(self.outputs):
            raise ConfigError("curves must be unique", "outputs")
        for label in self.outputs:
            try:
                CorrelationSpec.parse(label)
            except ValueError as exc:
                raise ConfigError(str(exc), "outputs") from None

    def eraser(self) -> EraserConfig:
        branches = tuple(
            BranchConfig(d, None if q is None else math.radians(q), math.radians(p))
            for d, q, p in zip(DETECTORS, self.qwp, self.polarizer))
        grid = PhaseGrid(math.radians(self.grid_start), math.radians(self.grid_stop),
                         self.grid_points)
        return EraserConfig(branches, grid, self.i0)

    def source(self) -> SourceConfig:
        return SourceConfig(self.mu, self.window, self.integration)

    def noise(self) -> NoiseConfig:
        return NoiseConfig(self.noise_enabled, math.radians(self.noise_sigma),
                           math.radians(self.noise_bound))

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(serialize(self).encode()).hexdigest()


# key -> (field, kind); "qwp.N" and "polarizer.N" are handled separately
_KEYS = {
    "mode": ("mode", "str"),
    "name": ("name", "str"),
    "seed": ("seed", "int"),
    "eraser.i0": ("i0", "float"),
    "grid.start": ("grid_start", "float"),
    "grid.stop": ("grid_stop", "float"),
    "grid.points": ("grid_points", "int"),
    "source.mu": ("mu", "float"),
    "source.window": ("window", "float"),
    "source.integration": ("integration", "float"),
    "noise.enabled": ("noise_enabled", "bool"),
    "noise.sigma": ("noise_sigma", "float"),
    "noise.bound": ("noise_bound", "float"),
    "cw.samples": ("cw_samples", "int"),
    "cw.power_uw": ("cw_power_uw", "float"),
    "outputs": ("outputs", "list"),
    "output.dir": ("output_dir", "str"),
}


def _convert(kind, raw, key, line):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
            return value
        if kind == "bool":
            if raw.lower() not in ("true", "false"):
                raise ValueError
            return raw.lower() == "true"
        if kind == "list":
            return tuple(s.strip() for s in raw.split(",") if s.strip())
        if kind == "angle?":
            return None if raw.lower() == "none" else _convert("float", raw, key, line)
        return raw
    except ValueError:
        raise ConfigError(f"cannot read {raw!r} as {kind.rstrip('?')}", key, line) from None


def parse_experiment(text: str) -> ExperimentFile:
    values = {}
    qwp = list(ExperimentFile.qwp)
    pol = list(ExperimentFile.polarizer)
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise ConfigError("duplicate key", key, lineno)
        seen.add(key)
        section, _, sub = key.partition(".")
        if section in ("qwp", "polarizer"):
            if sub not in {str(d) for d in DETECTORS}:
                raise ConfigError(f"unknown detector {sub!r}", key, lineno)
            d = int(sub) - 1
            if section == "qwp":
                qwp[d] = _convert("angle?", raw, key, lineno)
            else:
                pol[d] = _convert("float", raw, key, lineno)
            continue
        if key not in _KEYS:
            raise ConfigError("unknown key", key, lineno)
        name, kind = _KEYS[key]
        values[name] = _convert(kind, raw, key, lineno)
    return ExperimentFile(qwp=tuple(qwp), polarizer=tuple(pol), **values)


def serialize(exp: ExperimentFile) -> str:
    lines = []
    for key, (name, kind) in _KEYS.items():
        value = getattr(exp, name)
        if value is None:
            continue
        if kind == "float":
            value = repr(float(value))
        elif kind == "bool":
            value = "true" if value else "false"
        elif kind == "list":
            value = ",".join(value)
        lines.append(f"{key} = {value}")
        if key == "grid.points":
            lines += [f"qwp.{d} = {'none' if q is None else repr(float(q))}"
                      for d, q in zip(DETECTORS, exp.qwp)]
            lines += [f"polarizer.{d} = {float(p)!r}" for d, p in zip(DETECTORS, exp.polarizer)]
    return "\n".join(lines) + "\n"


@dataclass
class ResultBundle:
    meta: dict
    curves: list[FringeCurve]
    fits: list[dict]
    table: CountsTable | None = None


def _analytic_func(eraser: EraserConfig, label: str):
    return lambda x: float(correlate(eraser, label, np.array([x])).values[0])


def run(exp: ExperimentFile, threads: int | None = None) -> ResultBundle:
    eraser = exp.eraser()
    table = None
    if exp.mode == "analytic":
        curves = [correlate(eraser, lbl) for lbl in exp.outputs]
    elif exp.mode == "montecarlo":
        table = run_scan(eraser, exp.source(), exp.noise(), exp.seed, threads)
        curves = [coincidence_curve(table, CorrelationSpec.parse(lbl)) for lbl in exp.outputs]
    else:
        by_label = cw_scan(eraser, exp.noise(), exp.cw_samples, exp.seed, exp.source(),
                           exp.outputs, exp.cw_power_uw, threads)
        curves = [by_label[lbl] for lbl in exp.outputs]

    fits = []
    for curve in curves:
        order = CorrelationSpec.parse(curve.label).order
        func = _analytic_func(eraser, curve.label) if exp.mode == "analytic" else None
        fit, report = resolution_report(curve, order, REFERENCE_FWHM, func)
        fits.append({"label": curve.label,
                     "fit": fit.to_dict() if fit is not None else None,
                     "resolution": report.to_dict()})
    meta = {"name": exp.name, "mode": exp.mode, "seed": exp.seed,
            "config_hash": exp.config_hash,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    return ResultBundle(meta, curves, fits, table)


def _fmt(x: float) -> str:
    return f"{float(x) + 0.0:.12f}"


def curve_csv(curve: FringeCurve) -> str:
    rows = ["phi_rad,value,stderr"]
    err = curve.stderr
    for i, (p, v) in enumerate(zip(curve.phi, curve.values)):
        rows.append(f"{_fmt(p)},{_fmt(v)},{'0' if err is None else _fmt(err[i])}")
    return "\n".join(rows) + "\n"


def emit_csv(bundle: ResultBundle, outdir) -> list[Path]:
    """One ``<label>.csv`` per curve, plus ``counts.csv`` for Monte Carlo runs."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for curve in bundle.curves:
        path = outdir / f"{curve.label}.csv"
        path.write_bytes(curve_csv(curve).encode())
        written.append(path)
    if bundle.table is not None:
        path = outdir / "counts.csv"
        path.write_bytes(counts_csv(bundle.table).encode())
        written.append(path)
    return written


def counts_csv(table: CountsTable) -> str:
    cols = table.coincidence_map()
    rows = ["phi_rad,windows," + ",".join(cols)]
    for i, p in enumerate(table.phi):
        rows.append(f"{_fmt(p)},{table.windows}," + ",".join(str(int(c[i])) for c in cols.values()))
    return "\n".join(rows) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def emit_json(bundle: ResultBundle, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"meta": bundle.meta,
           "curves": [{"label": c.label, "normalization": c.normalization, "meta": c.meta,
                       "file": f"{c.label}.csv"} for c in bundle.curves],
           "fits": bundle.fits}
    path.write_text(json.dumps(_jsonable(doc), indent=2) + "\n")
    return path


def write_bundle(bundle: ResultBundle, outdir) -> list[Path]:
    written = emit_csv(bundle, outdir)
    written.append(emit_json(bundle, Path(outdir) / "report.json"))
    return written

"""``eraser-sim`` command line."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import presets
from .correlations import FringeCurve
from .experiment import ConfigError, _jsonable, parse_experiment, run, write_bundle
from .fringe import FitError, fit_sinusoid, resolution_report


def _run_and_write(exp, out: Path | None) -> Path:
    outdir = out if out is not None else Path(exp.output_dir or Path("eraser_out") / exp.name)
    bundle = run(exp)
    write_bundle(bundle, outdir)
    for f in bundle.fits:
        r = f["resolution"]
        period = f"{r['period']:.6f}" if np.isfinite(r["period"]) else "n/a"
        print(f"{exp.name:>12} {f['label']:>6}  period={period}  {r['classification']}")
    return outdir


def cmd_run(args) -> int:
    exp = parse_experiment(Path(args.file).read_text(encoding="utf-8"))
    if args.seed is not None:
        from dataclasses import replace
        exp = replace(exp, seed=args.seed)
    outdir = _run_and_write(exp, Path(args.out) if args.out else None)
    print(f"wrote {outdir}")
    return 0


def cmd_preset(args) -> int:
    try:
        exps = presets.load(args.name, args.seed)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    base = Path(args.out) if args.out else Path("eraser_out")
    for exp in exps:
        outdir = _run_and_write(exp, base / exp.name)
        print(f"wrote {outdir}")
    return 0


def cmd_list(args) -> int:
    for name in presets.names():
        members = presets.GROUPS.get(name)
        print(f"{name}" + (f"  ({', '.join(members)})" if members else ""))
    return 0


def cmd_fit(args) -> int:
    data = np.loadtxt(args.csv, delimiter=",", skiprows=1, ndmin=2)
    stderr = data[:, 2] if data.shape[1] > 2 and np.any(data[:, 2] > 0) else None
    curve = FringeCurve(data[:, 0], data[:, 1], Path(args.csv).stem, stderr=stderr)
    fit, report = resolution_report(curve, args.order)
    doc = {"file": str(args.csv), "fit": fit.to_dict() if fit else None,
           "resolution": report.to_dict()}
    print(json.dumps(_jsonable(doc), indent=2))
    if fit is None:
        print("error: no sinusoid could be fitted", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eraser-sim",
                                     description="Quantum-eraser super-resolution simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment file")
    p.add_argument("file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run a named preset")
    p.add_argument("name")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("list-presets", help="list preset names")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("fit", help="fit a curve CSV (phi_rad,value,stderr)")
    p.add_argument("csv")
    p.add_argument("--order", type=int, default=1, help="correlation order n")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FitError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver: ``run``, ``reference``, ``compare`` and ``plot``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from sgburgers.experiments import (
    PRESETS,
    BumpSetup,
    Case,
    ConfigError,
    ExperimentConfig,
    compare,
    emit_reference,
    family_from_name,
    gnuplot_script,
    load_config,
    output_root,
    preset_configs,
    run,
)
from sgburgers.reference import RiemannSetup


def _parse_overrides(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _cmd_run(args) -> int:
    overrides = _parse_overrides(args.override)
    if args.preset:
        configs = preset_configs(args.preset, overrides)
        base = Path(args.out) if args.out else output_root() / args.preset
    else:
        config = load_config(args.config)
        if overrides:
            config = ExperimentConfig.from_mapping(overrides, base=config)
        configs = [config]
        base = Path(args.out) if args.out else output_root()
    for config in configs:
        report = run(config, out_dir=base / config.name)
        drift = ", ".join("%.3g" % d for d in report.max_mass_drift)
        print(f"{config.name}: {config.steps} steps in {report.wall_time:.1f} s, mass drift [{drift}]")
        for audit in report.audits:
            print(
                f"  discontinuity at x={audit.location:.4f}: s={audit.speed:.4g}, "
                f"RH residual {audit.scaled_residual:.3g}, entropy ok={audit.entropy_admissible}"
            )
        print(f"  wrote {report.metadata_path.parent}")
    return 0


def _cmd_reference(args) -> int:
    case = Case(args.case)
    grid = np.linspace(args.x_lo, args.x_hi, args.points)
    if case is Case.BUMP:
        setup = BumpSetup(args.x0 if args.x0 is not None else 0.25, args.r, args.epsilon, args.b)
    else:
        setup = RiemannSetup(args.a, args.b, args.x0 if args.x0 is not None else 0.5, case.value)
    family = family_from_name(args.family, args.alpha, args.beta)
    emit_reference(case, setup, grid, args.t, args.modes, family, out=args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_compare(args) -> int:
    norms = compare(args.run_csv, args.reference_csv, interpolate=args.interpolate)
    print("column,L1,L2,Linf")
    for n in norms:
        print(f"{n.column},{n.l1:.17g},{n.l2:.17g},{n.linf:.17g}")
    return 0


def _cmd_plot(args) -> int:
    script = gnuplot_script(args.csv, tuple(args.columns), args.title)
    if args.out:
        Path(args.out).write_text(script)
    else:
        sys.stdout.write(script)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgburgers", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a preset or a config file")
    source = p_run.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=sorted(PRESETS))
    source.add_argument("--config", help="flat key=value configuration file")
    p_run.add_argument("--override", action="append", metavar="KEY=VALUE")
    p_run.add_argument("--out", help="output directory (default: $SGBURGERS_OUTPUT or ./runs)")
    p_run.set_defaults(func=_cmd_run)

    p_ref = sub.add_parser("reference", help="write the untruncated reference solution")
    p_ref.add_argument("--case", required=True, choices=[c.value for c in Case])
    p_ref.add_argument("--family", default="hermite", choices=["hermite", "jacobi", "laguerre"])
    p_ref.add_argument("--alpha", type=float, default=0.0)
    p_ref.add_argument("--beta", type=float, default=0.0)
    p_ref.add_argument("--t", type=float, required=True)
    p_ref.add_argument("--out", required=True)
    p_ref.add_argument("--points", type=int, default=1001)
    p_ref.add_argument("--x-lo", type=float, default=0.0)
    p_ref.add_argument("--x-hi", type=float, default=1.0)
    p_ref.add_argument("--modes", type=int, default=3, help="highest mode written")
    p_ref.add_argument("--a", type=float, default=1.0)
    p_ref.add_argument("--b", type=float, default=0.2)
    p_ref.add_argument("--x0", type=float, default=None)
    p_ref.add_argument("--r", type=float, default=0.25)
    p_ref.add_argument("--epsilon", type=float, default=np.e / 100.0)
    p_ref.set_defaults(func=_cmd_reference)

    p_cmp = sub.add_parser("compare", help="error norms between two CSV files")
    p_cmp.add_argument("run_csv")
    p_cmp.add_argument("reference_csv")
    p_cmp.add_argument("--interpolate", action="store_true", help="interpolate the second file onto the first grid")
    p_cmp.set_defaults(func=_cmd_compare)

    p_plot = sub.add_parser("plot", help="emit a gnuplot script for snapshot CSVs")
    p_plot.add_argument("csv", nargs="+")
    p_plot.add_argument("--columns", nargs="+", default=["E", "Var"])
    p_plot.add_argument("--title", default="")
    p_plot.add_argument("--out")
    p_plot.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

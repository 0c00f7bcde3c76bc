"""Command line entry point: ``regolith-opt evaluate | optimize | sweep``.

Exit status: 0 success, 2 completed but infeasible, 1 error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .config import ScenarioConfig, design_to_mapping, load_config, load_design, reference_design
from .errors import ConfigError, DomainError
from .reports import run_evaluate, run_optimize, run_sweep_report
from .problem import evaluate_design
from .studies import DEFAULT_GRIDS, SweepSpec, format_csv, row_from_evaluation

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2

log = logging.getLogger("regolith_opt")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from err


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="scenario TOML file (default: baseline preset)")
    common.add_argument("--seed", type=int, default=None, help="override the solver seed")
    common.add_argument("--restarts", type=int, default=None, help="override the multi-start count")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--format", choices=("report", "csv"), default="report",
                        help="write a JSON report or a CSV table")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="regolith-opt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", parents=[common], help="forward-evaluate one design")
    ev.add_argument("--design", type=Path, default=None,
                    help="design TOML file (default: the published optimal wheel)")

    sub.add_parser("optimize", parents=[common], help="optimise the design for the scenario")

    sw = sub.add_parser("sweep", parents=[common], help="one-parameter sensitivity sweep")
    sw.add_argument("--param", required=True,
                    help="max_power (kW), water_fraction, fill_efficiency, surface_temperature (C), "
                         "bucket_count, or any scenario key")
    sw.add_argument("--values", type=_float_list, default=None, help="explicit grid, e.g. 5,10,15")
    sw.add_argument("--min", dest="vmin", type=float, default=None)
    sw.add_argument("--max", dest="vmax", type=float, default=None)
    sw.add_argument("--steps", type=int, default=None)
    sw.add_argument("--no-reoptimize", dest="reoptimize", action="store_false",
                    help="re-evaluate the baseline optimum instead of re-optimising each point")
    sw.add_argument("--warm-start", action="store_true", help="start each point from the previous optimum")
    sw.add_argument("--design", type=Path, default=None,
                    help="baseline design for --no-reoptimize, else an extra start for each point")
    sw.add_argument("--objective", choices=("time", "cost"), default=None,
                    help="objective per point (default: the scenario's sweep_objective)")
    return parser


def _resolve_config(args) -> ScenarioConfig:
    config = load_config(args.config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.restarts is not None:
        updates["restarts"] = args.restarts
    return config.with_values(source="cli", **updates) if updates else config


def _sweep_spec(args, config: ScenarioConfig) -> SweepSpec:
    objective = args.objective or config["sweep_objective"]
    kwargs = dict(reoptimize=args.reoptimize, warm_start=args.warm_start, objective=objective)
    if args.values is not None:
        return SweepSpec(args.param, args.values, **kwargs)
    if None not in (args.vmin, args.vmax, args.steps):
        return SweepSpec.grid(args.param, args.vmin, args.vmax, args.steps, **kwargs)
    if args.vmin is None and args.vmax is None and args.steps is None and args.param in DEFAULT_GRIDS:
        return SweepSpec(args.param, DEFAULT_GRIDS[args.param], **kwargs)
    raise ConfigError("sweep needs --values, or all of --min/--max/--steps")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out: Path = args.out
    try:
        config = _resolve_config(args)
        if args.command == "evaluate":
            design = load_design(args.design) if args.design else reference_design()
            report = run_evaluate(config, design_to_mapping(design))
            evaluation = evaluate_design(design, config.to_problem())
            ok = report.payload["feasible"]
            ev = report.payload["evaluation"]
            summary = (f"{'feasible' if ok else 'INFEASIBLE'}: J={ev['cost']:.6g} "
                       f"M_water={ev['water_mass']:.4f} kg "
                       f"P_solar={ev['display']['solar_power_kw']:.4f} kW "
                       f"t_net={ev['display']['total_time_hr']:.4f} hr")
        elif args.command == "optimize":
            report, result = run_optimize(config)
            evaluation = result.evaluation
            ok = result.feasible
            summary = result.summary()
        else:
            spec = _sweep_spec(args, config)
            mapping = design_to_mapping(load_design(args.design)) if args.design else None
            report, rows = run_sweep_report(config, spec, design_mapping=mapping)
            ok = all(r.feasible for r in rows)
            # the CSV is always written for the completed points
            _write(out / f"sweep_{spec.parameter}.csv", format_csv(rows))
            summary = f"{len(rows)} points, {sum(r.feasible for r in rows)} feasible"
        if args.format == "report":
            _write(out / f"{args.command}_report.json", report.to_json())
        elif args.command != "sweep":
            _write(out / f"{args.command}.csv", format_csv([row_from_evaluation("none", math.nan, evaluation)]))
    except (ConfigError, DomainError, ValueError, OSError) as err:
        record = {"error": type(err).__name__, "message": str(err),
                  "key": getattr(err, "key", None), "line": getattr(err, "line", None)}
        print(json.dumps(record), file=sys.stderr)
        return EXIT_ERROR
    print(summary)
    return EXIT_OK if ok else EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())

"""Run reports: the resolved config, the command arguments and the result payload.

A report body is replayable: :func:`replay` re-runs the command from the
embedded config snapshot and arguments and must return an identical
payload.  Only ``wall_clock_s`` differs between two identical runs.

Schema (JSON object)::

    command          "evaluate" | "optimize" | "sweep"
    artifact_version package version string
    seed             solver seed used
    config           every scenario key, in file units
    provenance       key -> "default" | "file" | "cli" | "override"
    arguments        evaluate: {"design": design-file mapping}
                     optimize: {}
                     sweep: {"parameter", "values", "reoptimize", "warm_start", "objective",
                             "design" (baseline design mapping or null)}
    payload          command-specific result, see ``*_payload`` below
    wall_clock_s     seconds spent
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Any, Mapping

from . import __version__
from .config import ScenarioConfig, config_from_mapping, design_from_mapping, design_to_mapping
from .optimizer import OptimizationResult, optimize
from .problem import SystemEvaluation, evaluate_design
from .studies import NAMED_PARAMETERS, SweepRow, SweepSpec, apply_parameter, run_sweep


def _clean(value):
    """JSON-safe copy: non-finite floats become null."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, Mapping):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def evaluation_payload(ev: SystemEvaluation) -> dict[str, Any]:
    data = ev.as_dict()
    data["design"] = design_to_mapping(ev.design)
    data["display"] = {
        "solar_power_kw": ev.solar_power / 1000.0,
        "excavation_power_kw": ev.excavation_power / 1000.0,
        "heating_power_kw": ev.heating_power / 1000.0,
        "electrolysis_power_kw": ev.electrolysis_power / 1000.0,
        "total_time_hr": ev.total_time / 3600.0,
        "excavation_time_hr": ev.excavation_time / 3600.0,
        "heating_time_hr": ev.heating_time / 3600.0,
        "electrolysis_time_hr": ev.electrolysis_time / 3600.0,
        "rake_angle_deg": math.degrees(ev.design.rake_angle),
    }
    return data


def optimization_payload(result: OptimizationResult) -> dict[str, Any]:
    return {
        "objective": result.objective,
        "objective_value": result.objective_value,
        "cost": result.cost,
        "feasible": result.feasible,
        "residuals": result.residuals,
        "best_start": result.best_start,
        "restarts": result.restarts,
        "iterations": result.iterations,
        "evaluations": result.evaluations,
        "convergence_reason": result.convergence_reason,
        "evaluation": evaluation_payload(result.evaluation),
    }


def row_payload(row: SweepRow) -> dict[str, Any]:
    data = {name: getattr(row, name) for name in (
        "parameter", "value", "t_net_hr", "t_exc_hr", "t_heat_hr", "t_elec_hr", "m_water_kg",
        "p_solar_kw", "m1", "m2", "m3", "m4", "water_rate_l_hr_kw", "feasible", "cost", "error")}
    data["design"] = None if row.design is None else design_to_mapping(row.design)
    return data


def sweep_payload(rows: list[SweepRow]) -> dict[str, Any]:
    return {"rows": [row_payload(r) for r in rows],
            "all_feasible": all(r.feasible for r in rows)}


@dataclass
class RunReport:
    command: str
    config: ScenarioConfig
    arguments: dict[str, Any]
    payload: dict[str, Any]
    wall_clock_s: float = 0.0
    artifact_version: str = __version__

    def body(self) -> dict[str, Any]:
        """Everything except timing, in a stable key order."""
        return _clean({
            "command": self.command,
            "artifact_version": self.artifact_version,
            "seed": self.config["seed"],
            "config": dict(self.config.values),
            "provenance": dict(self.config.provenance),
            "arguments": self.arguments,
            "payload": self.payload,
        })

    def to_dict(self) -> dict[str, Any]:
        return {**self.body(), "wall_clock_s": self.wall_clock_s}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def body_json(self) -> str:
        return json.dumps(self.body(), indent=2, sort_keys=True, allow_nan=False)


def run_evaluate(config: ScenarioConfig, design_mapping: Mapping[str, Any]) -> RunReport:
    start = time.perf_counter()
    design = design_from_mapping(design_mapping)
    ev = evaluate_design(design, config.to_problem())
    return RunReport("evaluate", config, {"design": dict(design_mapping)},
                     {"feasible": ev.feasible, "evaluation": evaluation_payload(ev)},
                     time.perf_counter() - start)


def run_optimize(config: ScenarioConfig) -> tuple[RunReport, OptimizationResult]:
    start = time.perf_counter()
    result = optimize(config.to_problem())
    report = RunReport("optimize", config, {}, optimization_payload(result), time.perf_counter() - start)
    return report, result


def run_sweep_report(config: ScenarioConfig, spec: SweepSpec, workers: int | None = None,
                     design_mapping: Mapping[str, Any] | None = None) -> tuple[RunReport, list[SweepRow]]:
    """Run a sweep; ``design_mapping`` is the baseline (or warm-start) design, if any."""
    start = time.perf_counter()
    base = config.to_problem()
    design = None if design_mapping is None else design_from_mapping(design_mapping)
    rows = run_sweep(spec, base, design=design, workers=workers, apply=ConfigAwareApply(config))
    arguments = {"parameter": spec.parameter, "values": list(spec.values),
                 "reoptimize": spec.reoptimize, "warm_start": spec.warm_start,
                 "objective": spec.objective,
                 "design": None if design_mapping is None else dict(design_mapping)}
    return RunReport("sweep", config, arguments, sweep_payload(rows), time.perf_counter() - start), rows


class ConfigAwareApply:
    """Sweep override that also accepts scenario keys (in file units)."""

    def __init__(self, config: ScenarioConfig):
        self.config = config

    def __call__(self, problem, name, value):
        if name in NAMED_PARAMETERS or "." in name:
            return apply_parameter(problem, name, value)
        if name in self.config.values:
            kind = type(self.config.values[name])
            updated = self.config.with_values(**{name: kind(value)})
            return updated.to_problem(objective=problem.solver.objective)
        return apply_parameter(problem, name, value)


def replay(report: Mapping[str, Any]) -> dict[str, Any]:
    """Re-run a report from its embedded config and arguments; returns the new body."""
    config = config_from_mapping(report["config"], source="file")
    config = type(config)(values=config.values, provenance=report.get("provenance", config.provenance))
    args = report["arguments"]
    command = report["command"]
    if command == "evaluate":
        new = run_evaluate(config, args["design"])
    elif command == "optimize":
        new, _ = run_optimize(config)
    elif command == "sweep":
        spec = SweepSpec(args["parameter"], tuple(args["values"]), reoptimize=args["reoptimize"],
                         warm_start=args["warm_start"], objective=args["objective"])
        new, _ = run_sweep_report(config, spec, design_mapping=args.get("design"))
    else:
        raise ValueError(f"unknown report command {command!r}")
    return new.body()

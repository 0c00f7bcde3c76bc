"""One-parameter sensitivity sweeps with per-point re-optimisation.

Each grid point overrides one parameter of a base problem, re-runs the
optimizer (optionally warm-started from the previous point) and records the
timing, yield and metric columns of the resulting design.  Points that fail
are recorded with ``feasible=False`` and an error message; a sweep never
aborts half way.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError
from .optimizer import optimize
from .problem import DesignVector, OptimizationProblem, SystemEvaluation, evaluate_design

CSV_HEADER = (
    "parameter", "value", "t_net_hr", "t_exc_hr", "t_heat_hr", "t_elec_hr", "m_water_kg",
    "p_solar_kw", "m1", "m2", "m3", "m4", "water_rate_l_hr_kw", "feasible",
)

THREADS_ENV = "REGOLITH_OPT_THREADS"

DEFAULT_GRIDS = {
    "max_power": (5.0, 10.0, 15.0, 25.0, 50.0),
    "water_fraction": tuple(np.round(np.linspace(0.05, 0.15, 11), 10)),
    "fill_efficiency": tuple(np.round(np.linspace(0.1, 0.9, 9), 10)),
    "surface_temperature": tuple(float(t) for t in np.arange(-100.0, 401.0, 50.0)),
    "bucket_count": (8.0, 16.0, 24.0, 32.0, 48.0),
}


def _set_max_power(p: OptimizationProblem, kw: float):
    return replace(p, requirements=replace(p.requirements, max_solar_power=kw * 1000.0))


def _set_environment(field_name: str):
    def apply(p: OptimizationProblem, value: float):
        return replace(p, environment=replace(p.environment, **{field_name: value}))
    return apply


NAMED_PARAMETERS: dict[str, Callable[[OptimizationProblem, float], OptimizationProblem]] = {
    "max_power": _set_max_power,  # kW
    "water_fraction": _set_environment("water_fraction"),
    "fill_efficiency": lambda p, v: replace(p, fill_efficiency=v),
    "surface_temperature": _set_environment("surface_temperature"),  # C
    "bucket_count": lambda p, v: p.with_fixed(bucket_count=float(v)),
}


def apply_parameter(problem: OptimizationProblem, name: str, value: float) -> OptimizationProblem:
    """Return ``problem`` with one parameter overridden.

    ``name`` is one of :data:`NAMED_PARAMETERS` or a dotted attribute path
    such as ``environment.cohesion`` or ``efficiencies.solar`` (SI units).
    """
    if name in NAMED_PARAMETERS:
        return NAMED_PARAMETERS[name](problem, value)
    head, _, attr = name.partition(".")
    if attr and hasattr(problem, head) and hasattr(getattr(problem, head), attr):
        return replace(problem, **{head: replace(getattr(problem, head), **{attr: value})})
    if not attr and isinstance(getattr(problem, head, None), (int, float)):
        return replace(problem, **{head: value})
    raise ValueError(f"unknown sweep parameter {name!r}")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]
    reoptimize: bool = True
    warm_start: bool = False
    objective: str = "time"

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("a sweep needs at least one value")
        if self.objective not in ("cost", "time"):
            raise ValueError(f"objective must be 'cost' or 'time', got {self.objective!r}")

    @classmethod
    def grid(cls, parameter: str, start: float, stop: float, steps: int, **kwargs) -> "SweepSpec":
        """Evenly spaced grid including both end points."""
        if not start < stop:
            raise ValueError(f"grid needs min < max, got {start} >= {stop}")
        if steps < 2:
            raise ValueError(f"grid needs at least 2 steps, got {steps}")
        values = tuple(float(v) for v in np.linspace(start, stop, steps))
        return cls(parameter, values, **kwargs)


@dataclass(frozen=True)
class SweepRow:
    parameter: str
    value: float
    t_net_hr: float
    t_exc_hr: float
    t_heat_hr: float
    t_elec_hr: float
    m_water_kg: float
    p_solar_kw: float
    m1: float
    m2: float
    m3: float
    m4: float
    water_rate_l_hr_kw: float
    feasible: bool
    cost: float = math.nan
    design: DesignVector | None = None
    error: str | None = None

    def csv_record(self) -> list[str]:
        out = [self.parameter]
        for name in CSV_HEADER[1:-1]:
            out.append(repr(float(getattr(self, name))))
        out.append("true" if self.feasible else "false")
        return out


def row_from_evaluation(parameter: str, value: float, ev: SystemEvaluation) -> SweepRow:
    hr = 3600.0
    return SweepRow(
        parameter=parameter, value=float(value),
        t_net_hr=ev.total_time / hr, t_exc_hr=ev.excavation_time / hr,
        t_heat_hr=ev.heating_time / hr, t_elec_hr=ev.electrolysis_time / hr,
        m_water_kg=ev.water_mass, p_solar_kw=ev.solar_power / 1000.0,
        m1=ev.m1, m2=ev.m2, m3=ev.m3, m4=ev.m4, water_rate_l_hr_kw=ev.water_rate,
        feasible=ev.feasible, cost=ev.cost, design=ev.design,
    )


def _failed_row(parameter: str, value: float, err: Exception) -> SweepRow:
    nan = math.nan
    return SweepRow(parameter, float(value), nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan,
                    feasible=False, error=str(err))


def point_problem(base: OptimizationProblem, spec: SweepSpec, value: float,
                  apply=apply_parameter) -> OptimizationProblem:
    problem = apply(base, spec.parameter, value)
    return replace(problem, solver=replace(problem.solver, objective=spec.objective))


def _optimize_point(args):
    base, spec, value, guess, apply = args
    try:
        problem = point_problem(base, spec, value, apply)
        result = optimize(problem, guess)
    except DomainError as err:
        return _failed_row(spec.parameter, value, err)
    return row_from_evaluation(spec.parameter, value, result.evaluation)


def sweep_workers(default: int | None = None) -> int:
    """Worker processes for independent sweep points, capped by ``REGOLITH_OPT_THREADS``."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError as err:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from err
    return default or os.cpu_count() or 1


def run_sweep(spec: SweepSpec, base: OptimizationProblem, design: DesignVector | None = None,
              workers: int | None = None, apply=apply_parameter) -> list[SweepRow]:
    """Evaluate every grid point of ``spec`` and return the rows in grid order.

    With ``reoptimize=False`` the baseline design (``design``, or the optimum
    of ``base``) is only re-evaluated under each parameter value.
    """
    if not spec.reoptimize:
        if design is None:
            design = optimize(replace(base, solver=replace(base.solver, objective=spec.objective))).design
        rows = []
        for value in spec.values:
            try:
                ev = evaluate_design(design, point_problem(base, spec, value, apply))
            except DomainError as err:
                rows.append(_failed_row(spec.parameter, value, err))
                continue
            rows.append(row_from_evaluation(spec.parameter, value, ev))
        return rows

    if spec.warm_start:
        rows = []
        guess = design
        for value in spec.values:
            row = _optimize_point((base, spec, value, guess, apply))
            rows.append(row)
            if row.design is not None:
                guess = row.design
        return rows

    jobs = [(base, spec, value, design, apply) for value in spec.values]
    n = min(workers or sweep_workers(), len(jobs))
    if n <= 1:
        return [_optimize_point(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_optimize_point, jobs))


def bucket_count_study(base: OptimizationProblem, counts: Iterable[int] = DEFAULT_GRIDS["bucket_count"],
                       **kwargs) -> list[SweepRow]:
    """Optimise the remaining variables for each fixed bucket count."""
    return run_sweep(SweepSpec("bucket_count", tuple(float(c) for c in counts), **kwargs), base)


def surface_temperature_study(base: OptimizationProblem,
                              temps: Iterable[float] = DEFAULT_GRIDS["surface_temperature"],
                              **kwargs) -> list[SweepRow]:
    """Re-optimise across regolith surface temperatures (C)."""
    return run_sweep(SweepSpec("surface_temperature", tuple(float(t) for t in temps), **kwargs), base)


def format_csv(rows: Sequence[SweepRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_record())
    return buffer.getvalue()


def linear_fit_r2(x: Sequence[float], y: Sequence[float]) -> float:
    """Coefficient of determination of a least-squares straight line."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = ((y - y.mean()) ** 2).sum()
    return 1.0 if total == 0 else float(1.0 - (resid**2).sum() / total)

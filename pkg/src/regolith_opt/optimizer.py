"""Multi-start penalty solver for the bucket-wheel design problem.

Each start runs an augmented-Lagrangian loop (quadratic penalty, multiplier
update, penalty weight grown by a fixed factor per outer loop) around a
bound-constrained quasi-Newton solve (scipy's L-BFGS-B) fed with central
finite-difference gradients.  The integer variables are first relaxed to
continuous values, then polished: each start tries the floor/ceil
combinations of wheel and bucket counts, re-optimising the continuous
variables with the counts held fixed.

Variables are searched in a normalised [0, 1] box; quantities spanning
orders of magnitude (lengths, speed, times) are mapped logarithmically.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError
from .problem import (
    IDX,
    INTEGER_VARIABLES,
    VARIABLES,
    DesignVector,
    OptimizationProblem,
    SystemEvaluation,
    evaluate_batch,
    evaluate_design,
)

log = logging.getLogger(__name__)

LOG_SCALED = frozenset({
    "wheel_diameter", "bucket_width", "cut_face_length", "penetration_depth",
    "cut_velocity", "excavation_time", "heating_time", "electrolysis_time",
})


class GradientError(DomainError):
    """A finite-difference probe stayed non-finite after shrinking the step."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


def fd_steps(x: np.ndarray, rel: float = 1e-6, floor: float = 1e-6) -> np.ndarray:
    return np.maximum(floor, rel * np.abs(x))


def fd_gradient(f: Callable, x, steps=None, fixed=None, batch: bool = False) -> np.ndarray:
    """Central-difference gradient of ``f`` at ``x``.

    Args:
        f: scalar function of a 1-D array, or, with ``batch=True``, a function
            mapping an (m, n) array to m values.
        x: evaluation point.
        steps: per-coordinate step; defaults to ``max(1e-6, 1e-6*|x_i|)``.
        fixed: boolean mask of coordinates held fixed (zero gradient).
        batch: evaluate all probes in one call.

    Raises:
        GradientError: a probe is non-finite even after shrinking its step 10x.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    h = fd_steps(x) if steps is None else np.broadcast_to(np.asarray(steps, float), (n,)).copy()
    active = np.ones(n, bool) if fixed is None else ~np.asarray(fixed, bool)
    idx = np.flatnonzero(active)

    def probe(hs):
        P = np.repeat(x[None, :], 2 * idx.size, axis=0)
        P[np.arange(idx.size), idx] += hs[idx]
        P[idx.size + np.arange(idx.size), idx] -= hs[idx]
        if batch:
            vals = np.asarray(f(P), dtype=float)
        else:
            vals = np.array([f(row) for row in P], dtype=float)
        return vals[: idx.size], vals[idx.size:]

    grad = np.zeros(n)
    if idx.size == 0:
        return grad
    up, down = probe(h)
    bad = ~(np.isfinite(up) & np.isfinite(down))
    if bad.any():
        h = h.copy()
        h[idx[bad]] *= 0.1
        up2, down2 = probe(h)
        up[bad], down[bad] = up2[bad], down2[bad]
        still = ~(np.isfinite(up) & np.isfinite(down))
        if still.any():
            k = int(idx[np.flatnonzero(still)[0]])
            raise GradientError(f"non-finite finite-difference probe at coordinate {k}", k)
    grad[idx] = (up - down) / (2.0 * h[idx])
    return grad


@dataclass(frozen=True)
class StartRecord:
    """Outcome of one multi-start run (after integer polishing)."""

    index: int
    initial_cost: float
    initial_objective: float
    objective: float
    cost: float
    feasible: bool
    violation: float
    iterations: int
    evaluations: int
    reason: str


@dataclass(frozen=True)
class OptimizationResult:
    design: DesignVector
    objective: str
    objective_value: float
    cost: float
    evaluation: SystemEvaluation
    residuals: dict[str, float]
    feasible: bool
    best_start: int
    restarts: int
    iterations: int
    evaluations: int
    convergence_reason: str
    starts: tuple[StartRecord, ...] = field(default_factory=tuple)

    def summary(self) -> str:
        ev = self.evaluation
        status = "feasible" if self.feasible else "INFEASIBLE"
        return (f"{status}: J={self.cost:.6g} M_water={ev.water_mass:.4f} kg "
                f"P_solar={ev.solar_power / 1000:.4f} kW t_net={ev.total_time / 3600:.4f} hr")


class _Space:
    """Maps designs to the normalised search box and back."""

    def __init__(self, problem: OptimizationProblem):
        lo, hi = problem.bounds.arrays()
        for name, value in problem.fixed.items():
            lo[IDX[name]] = hi[IDX[name]] = float(value)
        self.lo, self.hi = lo, hi
        self.log = np.array([name in LOG_SCALED for name in VARIABLES])
        self.a = np.where(self.log, np.log(lo), lo)
        self.span = np.where(self.log, np.log(hi), hi) - self.a
        self.pinned = self.span == 0
        self.integer = np.array([name in INTEGER_VARIABLES for name in VARIABLES])

    def decode(self, U: np.ndarray) -> np.ndarray:
        z = self.a + U * self.span
        return np.where(self.pinned, self.lo, np.where(self.log, np.exp(z), z))

    def encode(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, float)
        z = np.where(self.log, np.log(np.maximum(X, 1e-300)), X)
        with np.errstate(invalid="ignore", divide="ignore"):
            u = np.where(self.pinned, 0.0, (z - self.a) / np.where(self.pinned, 1.0, self.span))
        return np.clip(u, 0.0, 1.0)


class _Solver:
    def __init__(self, problem: OptimizationProblem):
        self.problem = problem
        self.cfg = problem.solver
        self.space = _Space(problem)
        self.evaluations = 0

    # objective and scaled constraints (<= 0 when satisfied), batched
    def objective_and_constraints(self, U):
        X = self.space.decode(np.atleast_2d(U))
        out = evaluate_batch(X, self.problem)
        self.evaluations += X.shape[0]
        req = self.problem.requirements
        margin = self.cfg.constraint_margin
        if self.cfg.objective == "cost":
            f = out["cost"]
        else:
            f = out["total_time"] / 3600.0
        n_bucket, diameter, length, depth = (X[:, IDX[k]] for k in
                                            ("bucket_count", "wheel_diameter", "cut_face_length",
                                             "penetration_depth"))
        g = np.stack([
            out["solar_power"] / req.max_solar_power - (1.0 - margin),
            (req.required_water_mass * (1.0 + margin) - out["water_mass"])
            / max(req.required_water_mass, 1.0),
            n_bucket * length / (math.pi * diameter) - (1.0 - margin),
            depth / length - (1.0 - margin),
        ], axis=1)
        return f, g

    def solve(self, u0: np.ndarray, hold: np.ndarray, budget: int):
        """Augmented-Lagrangian loop from ``u0`` with ``hold`` coordinates frozen."""
        cfg = self.cfg
        fixed = hold | self.space.pinned
        bounds = [(u, u) if fixed[i] else (0.0, 1.0) for i, u in enumerate(u0)]
        f0, g0 = self.objective_and_constraints(u0)
        scale = max(abs(float(f0[0])), 1e-12)
        lam = np.zeros(g0.shape[1])
        mu = cfg.penalty_initial
        u = u0.copy()
        iterations = 0
        reason = "max outer loops"

        for _ in range(cfg.outer_loops):
            def lagrangian(U, lam=lam, mu=mu):
                f, g = self.objective_and_constraints(U)
                shifted = np.maximum(0.0, lam + mu * g)
                return f / scale + ((shifted**2).sum(axis=1) - (lam**2).sum()) / (2.0 * mu)

            def fun(v, lagrangian=lagrangian):
                value = float(lagrangian(v[None, :])[0])
                grad = fd_gradient(lagrangian, v, steps=cfg.fd_step, fixed=fixed, batch=True)
                return value, grad

            history: list[float] = []

            def callback(intermediate_result):
                history.append(float(intermediate_result.fun))
                k = cfg.stall_iterations
                if len(history) > k:
                    old, new = history[-k - 1], history[-1]
                    if old - new <= cfg.rel_tolerance * max(abs(old), 1e-12):
                        raise StopIteration

            remaining = budget - iterations
            if remaining <= 0:
                reason = "iteration budget exhausted"
                break
            sol = minimize(fun, u, jac=True, method="L-BFGS-B", bounds=bounds, callback=callback,
                           options={"maxiter": remaining, "ftol": 1e-15, "gtol": 1e-12, "maxls": 50})
            iterations += int(sol.nit)
            u = np.clip(sol.x, 0.0, 1.0)
            _, g = self.objective_and_constraints(u)
            lam = np.maximum(0.0, lam + mu * g[0])
            mu *= cfg.penalty_growth
        else:
            reason = "completed penalty schedule"
        return u, iterations, reason


def _violation(residuals: dict[str, float], problem: OptimizationProblem) -> float:
    """Sum of positive residuals, each made dimensionless."""
    req = problem.requirements
    scale = {
        "solar_power": req.max_solar_power,
        "water_mass": max(req.required_water_mass, 1.0),
    }
    return sum(max(0.0, r) / scale.get(k, 1.0) for k, r in residuals.items())


def _objective_of(ev: SystemEvaluation, problem: OptimizationProblem) -> float:
    return ev.cost if problem.solver.objective == "cost" else ev.total_time / 3600.0


def _rank(ev: SystemEvaluation, problem: OptimizationProblem):
    # feasible first, then objective, then least violation
    if ev.feasible:
        return (0, _objective_of(ev, problem), 0.0)
    return (1, _violation(ev.residuals, problem), _objective_of(ev, problem))


def _integer_candidates(u: np.ndarray, space: _Space) -> list[np.ndarray]:
    x = space.decode(u[None, :])[0]
    options = []
    for name in INTEGER_VARIABLES:
        i = IDX[name]
        lo, hi = space.lo[i], space.hi[i]
        vals = sorted({min(max(math.floor(x[i]), lo), hi), min(max(math.ceil(x[i]), lo), hi)})
        options.append((i, vals))
    (i0, v0), (i1, v1) = options
    candidates = []
    for a in v0:
        for b in v1:
            y = x.copy()
            y[i0], y[i1] = a, b
            candidates.append(y)
    return candidates


def _run_start(solver: _Solver, index: int, u0: np.ndarray):
    problem = solver.problem
    space = solver.space
    cfg = problem.solver
    before = solver.evaluations
    start_ev = evaluate_batch(space.decode(u0[None, :]), problem)
    initial_cost = float(start_ev["cost"][0])
    initial_obj = initial_cost if cfg.objective == "cost" else float(start_ev["total_time"][0]) / 3600.0

    no_hold = np.zeros(len(VARIABLES), bool)
    u_relaxed, iters, reason = solver.solve(u0, no_hold, cfg.max_iterations)

    best = None
    for y in _integer_candidates(u_relaxed, space):
        u_int = space.encode(y)
        # integer coordinates must decode exactly, so they are pinned in design space
        u_fix, it, why = solver.solve(u_int, space.integer, max(cfg.max_iterations - iters, 1))
        iters += it
        x = space.decode(u_fix[None, :])[0]
        x[space.integer] = y[space.integer]
        design = DesignVector.from_array(x)
        ev = evaluate_design(design, problem)
        key = _rank(ev, problem)
        if best is None or key < best[0]:
            best = (key, ev, why)
    _, ev, reason = best
    record = StartRecord(
        index=index, initial_cost=initial_cost, initial_objective=initial_obj,
        objective=_objective_of(ev, problem), cost=ev.cost, feasible=ev.feasible,
        violation=_violation(ev.residuals, problem), iterations=iters,
        evaluations=solver.evaluations - before, reason=reason,
    )
    return ev, record


def start_points(problem: OptimizationProblem, initial_guess: DesignVector | None = None) -> list[np.ndarray]:
    """Normalised start points; random start ``i`` draws from its own (seed, i) stream."""
    space = _Space(problem)
    n = len(VARIABLES)
    points = []
    if initial_guess is not None:
        points.append(space.encode(initial_guess.to_array()))
    for i in range(problem.solver.restarts):
        rng = np.random.default_rng([problem.solver.seed, i])
        u = rng.uniform(0.0, 1.0, n)
        u[space.pinned] = 0.0
        points.append(u)
    return points


def optimize(problem: OptimizationProblem, initial_guess: DesignVector | None = None) -> OptimizationResult:
    """Minimise the configured objective over the design space.

    Returns the best feasible design over all starts, or the least infeasible
    one (flagged ``feasible=False``) when no start reaches feasibility.
    Ties go to the lowest start index.
    """
    solver = _Solver(problem)
    best = None
    records = []
    for index, u0 in enumerate(start_points(problem, initial_guess)):
        ev, record = _run_start(solver, index, u0)
        records.append(record)
        log.debug("start %d: objective=%.6g feasible=%s", index, record.objective, record.feasible)
        key = _rank(ev, problem)
        if best is None or key < best[0]:
            best = (key, ev, record)
    _, ev, record = best
    return OptimizationResult(
        design=ev.design,
        objective=problem.solver.objective,
        objective_value=_objective_of(ev, problem),
        cost=ev.cost,
        evaluation=ev,
        residuals=dict(ev.residuals),
        feasible=ev.feasible,
        best_start=record.index,
        restarts=len(records),
        iterations=sum(r.iterations for r in records),
        evaluations=solver.evaluations,
        convergence_reason=record.reason,
        starts=tuple(records),
    )

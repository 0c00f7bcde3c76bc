"""Design vector, problem definition and the full forward evaluation.

``evaluate_design`` chains the typed sub-model operations for one design.
``evaluate_batch`` runs the same chain on an (m, 11) array of designs with
no validation; the optimizer uses it for finite-difference probes.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Literal, Mapping

import numpy as np

from . import excavation as exc
from . import resources as res
from . import soil
from .errors import DesignEvaluationError, DomainError
from .excavation import BucketWheelDesign
from .resources import ELECTROLYSIS_ENERGY, OperationSchedule, ProcessEfficiencies
from .soil import CutGeometry, CutKinematics, SoilEnvironment

Objective = Literal["cost", "time"]

VARIABLES = (
    "wheel_count",
    "bucket_count",
    "wheel_diameter",
    "bucket_width",
    "cut_face_length",
    "penetration_depth",
    "rake_angle",
    "cut_velocity",
    "excavation_time",
    "heating_time",
    "electrolysis_time",
)
INTEGER_VARIABLES = ("wheel_count", "bucket_count")
IDX = {name: i for i, name in enumerate(VARIABLES)}


@dataclass(frozen=True)
class DesignVector:
    """One point of the design space. SI units, rake angle in radians."""

    wheel_count: float
    bucket_count: float
    wheel_diameter: float
    bucket_width: float
    cut_face_length: float
    penetration_depth: float
    rake_angle: float
    cut_velocity: float
    excavation_time: float
    heating_time: float
    electrolysis_time: float

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in VARIABLES], dtype=float)

    @classmethod
    def from_array(cls, values) -> "DesignVector":
        return cls(*(float(v) for v in values))

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    def with_integers_rounded(self) -> "DesignVector":
        return replace(self, wheel_count=float(round(self.wheel_count)),
                       bucket_count=float(round(self.bucket_count)))


@dataclass(frozen=True)
class MissionRequirements:
    required_water_mass: float = 7.5  # kg
    max_solar_power: float = 10_000.0  # W
    water_weight: float = 0.1

    def __post_init__(self):
        if not self.required_water_mass >= 0:
            raise DomainError("required_water_mass must be >= 0")
        if not self.max_solar_power > 0:
            raise DomainError("max_solar_power must be > 0")
        if not self.water_weight >= 0:
            raise DomainError("water_weight must be >= 0")


@dataclass(frozen=True)
class DesignBounds:
    """Box for every design variable; the penetration depth is also capped by l."""

    wheel_count: tuple[float, float] = (2, 4)
    bucket_count: tuple[float, float] = (2, 300)
    wheel_diameter: tuple[float, float] = (0.1, 2.0)
    bucket_width: tuple[float, float] = (0.01, 0.3)
    cut_face_length: tuple[float, float] = (0.01, 0.3)
    penetration_depth_min: float = 0.001
    rake_angle: tuple[float, float] = (math.radians(2.0), math.radians(45.0))
    cut_velocity: tuple[float, float] = (0.01, 0.5)
    time: tuple[float, float] = (10.0, 100 * 3600.0)

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            pairs = [value] if isinstance(value, tuple) else []
            for lo, hi in pairs:
                if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                    raise DomainError(f"bounds {f.name} must be finite and ordered, got {value}")
        if not 0 < self.penetration_depth_min <= self.cut_face_length[1]:
            raise DomainError("penetration_depth_min must lie in (0, max cut_face_length]")
        if self.wheel_count[0] < 1 or self.bucket_count[0] < 1:
            raise DomainError("integer bounds must start at >= 1")
        if self.rake_angle[0] <= 0 or self.rake_angle[1] >= math.pi / 2:
            raise DomainError("rake angle bounds must lie inside (0, pi/2)")
        for name in ("wheel_diameter", "bucket_width", "cut_face_length", "cut_velocity", "time"):
            if getattr(self, name)[0] <= 0:
                raise DomainError(f"lower bound of {name} must be > 0")

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        pairs = [
            self.wheel_count, self.bucket_count, self.wheel_diameter, self.bucket_width,
            self.cut_face_length, (self.penetration_depth_min, self.cut_face_length[1]),
            self.rake_angle, self.cut_velocity, self.time, self.time, self.time,
        ]
        lo, hi = zip(*pairs)
        return np.array(lo, dtype=float), np.array(hi, dtype=float)

    def contains(self, x: DesignVector, tol: float = 1e-12) -> bool:
        lo, hi = self.arrays()
        v = x.to_array()
        return bool(np.all(v >= lo - tol) and np.all(v <= hi + tol)
                    and x.penetration_depth <= x.cut_face_length + tol)


@dataclass(frozen=True)
class SolverConfig:
    """Settings of the penalty/quasi-Newton multi-start solver."""

    objective: Objective = "cost"
    restarts: int = 16
    seed: int = 0
    penalty_initial: float = 10.0
    penalty_growth: float = 10.0
    outer_loops: int = 5
    fd_step: float = 1e-6
    rel_tolerance: float = 1e-8
    stall_iterations: int = 5
    max_iterations: int = 10_000
    feasibility_tolerance: float = 1e-6
    constraint_margin: float = 1e-7

    def __post_init__(self):
        if self.objective not in ("cost", "time"):
            raise DomainError(f"objective must be 'cost' or 'time', got {self.objective!r}")
        if self.restarts < 1 or self.outer_loops < 1 or self.max_iterations < 1:
            raise DomainError("restarts, outer_loops and max_iterations must be >= 1")
        if not (self.penalty_initial > 0 and self.penalty_growth >= 1 and self.fd_step > 0):
            raise DomainError("penalty_initial > 0, penalty_growth >= 1 and fd_step > 0 required")


@dataclass(frozen=True)
class OptimizationProblem:
    requirements: MissionRequirements = field(default_factory=MissionRequirements)
    environment: SoilEnvironment = field(default_factory=SoilEnvironment)
    efficiencies: ProcessEfficiencies = field(default_factory=ProcessEfficiencies)
    fill_efficiency: float = 0.45
    bounds: DesignBounds = field(default_factory=DesignBounds)
    solver: SolverConfig = field(default_factory=SolverConfig)
    efficiency_convention: str = "as_printed"
    electrolysis_energy: float = ELECTROLYSIS_ENERGY
    # Common positive factor on both cost terms; the argmin must not depend on it.
    cost_scale: float = 1.0
    # Variables pinned to a value (e.g. bucket_count in the bucket-count study).
    fixed: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        exc.check_convention(self.efficiency_convention)
        if not 0 < self.fill_efficiency <= 1:
            raise DomainError(f"fill_efficiency must lie in (0, 1], got {self.fill_efficiency}")
        if not self.electrolysis_energy > 0:
            raise DomainError("electrolysis_energy must be > 0")
        if not self.cost_scale > 0:
            raise DomainError("cost_scale must be > 0")
        unknown = set(self.fixed) - set(VARIABLES)
        if unknown:
            raise DomainError(f"cannot fix unknown variables {sorted(unknown)}")

    def with_fixed(self, **values: float) -> "OptimizationProblem":
        return replace(self, fixed={**self.fixed, **values})


@dataclass(frozen=True)
class SystemEvaluation:
    """Every derived quantity of one design. Powers in W, times in s, metrics in kg/kW."""

    design: DesignVector
    sand_force: float
    clay_force: float
    cut_force: float
    rotations: float
    single_cut_volume: float
    regolith_mass: float
    water_mass: float
    hydrogen_mass: float
    oxygen_mass: float
    water_moles: float
    excavation_power: float
    heating_power: float
    electrolysis_power: float
    solar_power: float
    excavation_time: float
    heating_time: float
    electrolysis_time: float
    total_time: float
    m1: float
    m2: float
    m3: float
    m4: float
    water_rate: float
    cost: float
    residuals: dict[str, float]
    feasible: bool

    def as_dict(self) -> dict:
        out = asdict(self)
        out["design"] = self.design.as_dict()
        return out


RESIDUAL_NAMES = (
    "wheel_count_min",
    "wheel_count_max",
    "bucket_count_min",
    "bucket_count_max",
    "solar_power",
    "water_mass",
    "rim_fit",
    "depth_within_face",
)


def _residuals(x: DesignVector, p_solar: float, m_water: float, problem: OptimizationProblem):
    b = problem.bounds
    req = problem.requirements
    return {
        "wheel_count_min": b.wheel_count[0] - x.wheel_count,
        "wheel_count_max": x.wheel_count - b.wheel_count[1],
        "bucket_count_min": b.bucket_count[0] - x.bucket_count,
        "bucket_count_max": x.bucket_count - b.bucket_count[1],
        "solar_power": p_solar - req.max_solar_power,
        "water_mass": req.required_water_mass - m_water,
        "rim_fit": x.bucket_count * x.cut_face_length - math.pi * x.wheel_diameter,
        "depth_within_face": x.penetration_depth - x.cut_face_length,
    }


def cost_value(p_solar, m_water, problem: OptimizationProblem):
    """Cost from solar power (W) and water mass (kg); works on arrays."""
    req = problem.requirements
    power_gap = (req.max_solar_power - p_solar) / 1000.0
    water_gap = req.required_water_mass - m_water
    return problem.cost_scale * (power_gap**2 + req.water_weight * water_gap**2)


def evaluate_design(x: DesignVector, problem: OptimizationProblem) -> SystemEvaluation:
    """Forward-evaluate a design: forces, masses, powers, times, metrics, cost, residuals.

    Constraint violations are reported in ``residuals``; only sub-model domain
    errors raise, as :class:`DesignEvaluationError` carrying the design.
    """
    try:
        return _evaluate(x, problem)
    except DomainError as err:
        raise DesignEvaluationError(f"{err} at design {x.as_dict()}", x.as_dict()) from err


def _evaluate(x: DesignVector, problem: OptimizationProblem) -> SystemEvaluation:
    env = problem.environment
    eff = problem.efficiencies
    conv = problem.efficiency_convention
    geom = CutGeometry(x.bucket_width, x.cut_face_length, x.penetration_depth, x.rake_angle)
    kin = CutKinematics(x.cut_velocity)
    wheel = BucketWheelDesign(
        wheel_count=x.wheel_count, buckets_per_wheel=x.bucket_count, wheel_diameter=x.wheel_diameter,
        geometry=geom, kinematics=kin, fill_efficiency=problem.fill_efficiency,
    )
    if x.excavation_time < 0 or x.heating_time <= 0 or x.electrolysis_time <= 0:
        raise DomainError("excavation_time must be >= 0 and processing times > 0")

    f_sand = soil.sand_force(env, geom, kin)
    f_clay = soil.clay_force(env, geom, kin)
    f_cut = f_sand + f_clay
    n_rot = exc.rotations_for_time(wheel, x.excavation_time)
    volume = exc.cut_volume(geom, problem.fill_efficiency)
    m_net = exc.regolith_mass(wheel, env, n_rot)
    p_exc = exc.excavation_power(wheel, env, n_rot, eff, conv, cut_force=f_cut)

    m_water = res.water_mass(m_net, env, eff)
    m_h, m_o = res.electrolysis_split(m_water, eff)
    p_heat = res.heating_power(m_net, env, eff, x.heating_time, conv)
    p_elec = res.electrolysis_power(m_water, eff, x.electrolysis_time, problem.electrolysis_energy, conv)
    p_solar = res.solar_power(p_exc, p_heat, p_elec, eff, conv)
    if x.excavation_time > 0:
        t_net = res.total_time(OperationSchedule(x.excavation_time, x.heating_time, x.electrolysis_time))
    else:
        # null excavation: OperationSchedule rejects a zero stage time
        t_net = x.heating_time + x.electrolysis_time

    if p_solar > 0:
        metrics = res.performance_metrics(m_net, m_water, m_h, m_o, p_solar)
        m1, m2, m3, m4 = metrics.m1, metrics.m2, metrics.m3, metrics.m4
        rate = res.water_rate_metric(m_water, t_net, p_solar)
    else:
        m1 = m2 = m3 = m4 = rate = math.nan

    residuals = _residuals(x, p_solar, m_water, problem)
    tol = problem.solver.feasibility_tolerance
    return SystemEvaluation(
        design=x, sand_force=f_sand, clay_force=f_clay, cut_force=f_cut, rotations=n_rot,
        single_cut_volume=volume, regolith_mass=m_net, water_mass=m_water, hydrogen_mass=m_h,
        oxygen_mass=m_o, water_moles=m_water / res.WATER_MOLAR_MASS, excavation_power=p_exc,
        heating_power=p_heat, electrolysis_power=p_elec, solar_power=p_solar,
        excavation_time=x.excavation_time, heating_time=x.heating_time,
        electrolysis_time=x.electrolysis_time, total_time=t_net,
        m1=m1, m2=m2, m3=m3, m4=m4, water_rate=rate,
        cost=float(cost_value(p_solar, m_water, problem)),
        residuals=residuals, feasible=all(r <= tol for r in residuals.values()),
    )


def cost(x: DesignVector, problem: OptimizationProblem) -> float:
    """Squared gap to the power budget (kW) plus weighted squared gap to the water target (kg)."""
    return evaluate_design(x, problem).cost


def constraint_residuals(x: DesignVector, problem: OptimizationProblem) -> dict[str, float]:
    """Signed residual per constraint, <= 0 when satisfied, in natural units.

    Counts are in units of wheels/buckets, power in W, water in kg and the
    two geometric constraints in metres.
    """
    return evaluate_design(x, problem).residuals


def evaluate_batch(X: np.ndarray, problem: OptimizationProblem) -> dict[str, np.ndarray]:
    """Vectorised forward model for an (m, 11) array of designs, no validation."""
    X = np.atleast_2d(X)
    env = problem.environment
    eff = problem.efficiencies
    conv = problem.efficiency_convention
    (n_wheel, n_bucket, diameter, w, l, d, beta, v, t_exc, t_heat, t_elec) = X.T

    f_cut = (soil.sand_force_kernel(env.density, env.gravity, w, l, d, beta, v)
             + soil.clay_force_kernel(env.density, env.gravity, env.cohesion, w, l, d, beta, v))
    n_rot = exc.rotations_kernel(v, t_exc, diameter)
    volume = exc.cut_volume_kernel(w, l, problem.fill_efficiency)
    m_net = exc.regolith_mass_kernel(n_rot, n_wheel, n_bucket, env.density, volume)
    p_exc = exc.excavation_power_kernel(eff.battery, eff.drivetrain, eff.motor, n_rot, n_wheel,
                                        f_cut, v, conv)
    m_water = eff.water_extraction * m_net * env.water_fraction
    p_heat = res.heating_power_kernel(eff.battery, m_net, env.specific_heat, env.surface_temperature,
                                      env.extraction_temperature, t_heat, conv)
    p_elec = res.electrolysis_power_kernel(eff.battery, m_water, t_elec, problem.electrolysis_energy, conv)
    p_solar = res.solar_power_kernel(eff.solar, p_exc, p_heat, p_elec, conv)
    return {
        "cut_force": f_cut,
        "regolith_mass": m_net,
        "water_mass": m_water,
        "solar_power": p_solar,
        "total_time": t_exc + t_heat + t_elec,
        "cost": cost_value(p_solar, m_water, problem),
    }

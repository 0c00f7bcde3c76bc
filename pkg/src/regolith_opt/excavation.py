"""Bucket-wheel capture volume, collected regolith mass and excavation power."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import DomainError
from .soil import CutGeometry, CutKinematics, SoilEnvironment, total_cut_force

EfficiencyConvention = Literal["as_printed", "divide"]
CONVENTIONS = ("as_printed", "divide")

SIN_60 = math.sin(math.radians(60.0))


@dataclass(frozen=True)
class BucketWheelDesign:
    wheel_count: int
    buckets_per_wheel: int
    wheel_diameter: float
    geometry: CutGeometry
    kinematics: CutKinematics
    fill_efficiency: float = 0.45

    def __post_init__(self):
        if self.wheel_count < 1 or self.buckets_per_wheel < 1:
            raise DomainError("wheel_count and buckets_per_wheel must be >= 1")
        if not self.wheel_diameter > 0:
            raise DomainError(f"wheel_diameter must be > 0, got {self.wheel_diameter}")
        if not 0.0 < self.fill_efficiency <= 1.0:
            raise DomainError(f"fill_efficiency must lie in (0, 1], got {self.fill_efficiency}")

    @property
    def rim_fits(self) -> bool:
        """True when the buckets fit around the wheel circumference."""
        return self.buckets_per_wheel * self.geometry.cut_face_length <= math.pi * self.wheel_diameter


@dataclass(frozen=True)
class ExcavationOutcome:
    rotations: float
    single_cut_volume: float
    regolith_mass: float
    cut_force: float
    excavation_power: float


def check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise ValueError(f"efficiency_convention must be one of {CONVENTIONS}, got {convention!r}")


def apply_efficiency(value, efficiency, convention: str = "as_printed"):
    """Scale a loss-free quantity by a chain efficiency.

    ``as_printed`` multiplies (the published formulas), ``divide`` divides
    (the physically conventional reading).
    """
    if convention == "as_printed":
        return value * efficiency
    if convention == "divide":
        return value / efficiency
    check_convention(convention)


def cut_volume_kernel(w, l, fill_efficiency):
    return 0.5 * fill_efficiency * w * l**2 * SIN_60


def cut_volume(geom: CutGeometry, fill_efficiency: float) -> float:
    """Regolith captured by one bucket in one cut, m^3 (equilateral prism bucket)."""
    if not 0.0 <= fill_efficiency <= 1.0:
        raise DomainError(f"fill_efficiency must lie in [0, 1], got {fill_efficiency}")
    return float(cut_volume_kernel(geom.bucket_width, geom.cut_face_length, fill_efficiency))


def rotations_kernel(v, t_exc, diameter):
    return v * t_exc / (math.pi * diameter)


def rotations_for_time(design: BucketWheelDesign, excavation_time: float) -> float:
    """Wheel turns completed in ``excavation_time`` seconds.

    The rim rolls without slip at the cut velocity, so one turn takes
    pi*D/v seconds. The count is continuous, not floored.
    """
    if excavation_time < 0:
        raise DomainError(f"excavation_time must be >= 0, got {excavation_time}")
    return float(rotations_kernel(design.kinematics.cut_velocity, excavation_time, design.wheel_diameter))


def regolith_mass_kernel(rotations, wheel_count, buckets_per_wheel, density, volume):
    return rotations * wheel_count * buckets_per_wheel * density * volume


def regolith_mass(design: BucketWheelDesign, env: SoilEnvironment, rotations: float) -> float:
    """Total regolith collected over ``rotations`` turns of every wheel, kg."""
    if rotations < 0:
        raise DomainError(f"rotations must be >= 0, got {rotations}")
    volume = cut_volume(design.geometry, design.fill_efficiency)
    return float(regolith_mass_kernel(
        rotations, design.wheel_count, design.buckets_per_wheel, env.density, volume,
    ))


def excavation_power_kernel(eta_bat, eta_drive, eta_motor, rotations, wheel_count, cut_force, v,
                            convention: str = "as_printed"):
    # Chain efficiency is applied as one product so both conventions share it.
    chain = eta_bat * eta_drive * eta_motor
    return apply_efficiency(rotations * wheel_count * cut_force * v, chain, convention)


def excavation_power(design: BucketWheelDesign, env: SoilEnvironment, rotations: float,
                     efficiencies, convention: str = "as_printed",
                     cut_force: float | None = None) -> float:
    """Battery power drawn for excavation, W.

    ``efficiencies`` is anything with ``battery``, ``drivetrain`` and ``motor``
    attributes (normally :class:`~regolith_opt.resources.ProcessEfficiencies`).
    The cut force is computed from the design unless supplied.
    """
    if rotations < 0:
        raise DomainError(f"rotations must be >= 0, got {rotations}")
    check_convention(convention)
    if cut_force is None:
        cut_force = total_cut_force(env, design.geometry, design.kinematics)
    return float(excavation_power_kernel(
        efficiencies.battery, efficiencies.drivetrain, efficiencies.motor,
        rotations, design.wheel_count, cut_force, design.kinematics.cut_velocity, convention,
    ))


def excavate(design: BucketWheelDesign, env: SoilEnvironment, excavation_time: float,
             efficiencies, convention: str = "as_printed") -> ExcavationOutcome:
    """Run the excavation stage for a given schedule."""
    force = total_cut_force(env, design.geometry, design.kinematics)
    rotations = rotations_for_time(design, excavation_time)
    return ExcavationOutcome(
        rotations=rotations,
        single_cut_volume=cut_volume(design.geometry, design.fill_efficiency),
        regolith_mass=regolith_mass(design, env, rotations),
        cut_force=force,
        excavation_power=excavation_power(design, env, rotations, efficiencies, convention, force),
    )

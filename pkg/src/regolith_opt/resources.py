"""Water extraction, electrolysis, power aggregation and performance metrics.

All powers are in watts and times in seconds; the metrics are reported in
kg per kW and the water-rate metric in L/hr/kW.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .excavation import apply_efficiency, check_convention
from .soil import SoilEnvironment

WATER_MOLAR_MASS = 0.01801528  # kg/mol
HYDROGEN_MASS_FRACTION = 0.1119
OXYGEN_MASS_FRACTION = 0.8879
ELECTROLYSIS_ENERGY = 23710.0  # J/mol
WATER_DENSITY = 1000.0  # kg/m^3, so 1 kg of water is 1 L


@dataclass(frozen=True)
class ProcessEfficiencies:
    battery: float = 0.75
    solar: float = 0.29
    motor: float = 0.70
    drivetrain: float = 0.70
    water_extraction: float = 0.90
    hydrogen: float = 0.90
    oxygen: float = 0.90

    def __post_init__(self):
        for name, value in vars(self).items():
            if not 0.0 < value <= 1.0:
                raise DomainError(f"efficiency {name} must lie in (0, 1], got {value}")


@dataclass(frozen=True)
class OperationSchedule:
    excavation_time: float
    heating_time: float
    electrolysis_time: float

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise DomainError(f"{name} must be > 0 s, got {value}")


@dataclass(frozen=True)
class ResourceYield:
    water_mass: float
    hydrogen_mass: float
    oxygen_mass: float
    water_moles: float


@dataclass(frozen=True)
class PowerBudget:
    excavation: float
    heating: float
    electrolysis: float
    solar_total: float
    electrolysis_energy_per_mole: float = ELECTROLYSIS_ENERGY


@dataclass(frozen=True)
class PerformanceMetrics:
    """Yield per kW of solar power: regolith (m1), water (m2), H2 (m3), O2 (m4)."""

    m1: float
    m2: float
    m3: float
    m4: float


def water_mass(regolith_mass: float, env: SoilEnvironment, efficiencies: ProcessEfficiencies) -> float:
    """Water recovered from ``regolith_mass`` kg of regolith, kg."""
    if regolith_mass < 0:
        raise DomainError(f"regolith_mass must be >= 0, got {regolith_mass}")
    return efficiencies.water_extraction * regolith_mass * env.water_fraction


def heating_power_kernel(eta_bat, regolith_mass, specific_heat, t_surface, t_extract, t_heat,
                         convention="as_printed"):
    return apply_efficiency(regolith_mass * specific_heat * (t_extract - t_surface) / t_heat,
                            eta_bat, convention)


def heating_power(regolith_mass: float, env: SoilEnvironment, efficiencies: ProcessEfficiencies,
                  heating_time: float, convention: str = "as_printed") -> float:
    """Battery power to lift the regolith to the extraction temperature, W.

    Sensible heat only; no latent heat of vaporisation.
    """
    if not heating_time > 0:
        raise DomainError(f"heating_time must be > 0, got {heating_time}")
    check_convention(convention)
    return float(heating_power_kernel(
        efficiencies.battery, regolith_mass, env.specific_heat,
        env.surface_temperature, env.extraction_temperature, heating_time, convention,
    ))


def electrolysis_split(water_mass: float, efficiencies: ProcessEfficiencies) -> tuple[float, float]:
    """Hydrogen and oxygen masses from electrolysing ``water_mass`` kg, kg.

    The mass fractions are used as published and sum to 0.9998.
    """
    if water_mass < 0:
        raise DomainError(f"water_mass must be >= 0, got {water_mass}")
    return (HYDROGEN_MASS_FRACTION * efficiencies.hydrogen * water_mass,
            OXYGEN_MASS_FRACTION * efficiencies.oxygen * water_mass)


def electrolysis_power_kernel(eta_bat, water_mass, t_elec, energy_per_mole=ELECTROLYSIS_ENERGY,
                              convention="as_printed"):
    return apply_efficiency((water_mass / WATER_MOLAR_MASS) * energy_per_mole / t_elec,
                            eta_bat, convention)


def electrolysis_power(water_mass: float, efficiencies: ProcessEfficiencies, electrolysis_time: float,
                       energy_per_mole: float = ELECTROLYSIS_ENERGY,
                       convention: str = "as_printed") -> float:
    """Battery power to electrolyse ``water_mass`` kg within ``electrolysis_time`` s, W."""
    if not electrolysis_time > 0:
        raise DomainError(f"electrolysis_time must be > 0, got {electrolysis_time}")
    check_convention(convention)
    return float(electrolysis_power_kernel(
        efficiencies.battery, water_mass, electrolysis_time, energy_per_mole, convention,
    ))


def solar_power_kernel(eta_solar, p_exc, p_heat, p_elec, convention="as_printed"):
    return apply_efficiency(p_exc + p_heat + p_elec, eta_solar, convention)


def solar_power(excavation: float, heating: float, electrolysis: float,
                efficiencies: ProcessEfficiencies, convention: str = "as_printed") -> float:
    """Total solar-array power for the three process stages, W."""
    if min(excavation, heating, electrolysis) < 0:
        raise DomainError("component powers must be >= 0")
    check_convention(convention)
    return float(solar_power_kernel(efficiencies.solar, excavation, heating, electrolysis, convention))


def total_time(schedule: OperationSchedule) -> float:
    """Excavation, heating and electrolysis run back to back, s."""
    return schedule.excavation_time + schedule.heating_time + schedule.electrolysis_time


def performance_metrics(regolith_mass: float, water: float, hydrogen: float, oxygen: float,
                        solar_power: float) -> PerformanceMetrics:
    """Masses per kW of solar power.

    Raises:
        DomainError: if ``solar_power`` is not positive.
    """
    if not solar_power > 0:
        raise DomainError(f"metrics need solar_power > 0, got {solar_power}")
    kw = solar_power / 1000.0
    return PerformanceMetrics(regolith_mass / kw, water / kw, hydrogen / kw, oxygen / kw)


def water_rate_metric(water_mass: float, total_time: float, solar_power: float) -> float:
    """Litres of water per hour of operation per kW of solar power."""
    if not total_time > 0:
        raise DomainError(f"total_time must be > 0, got {total_time}")
    if not solar_power > 0:
        raise DomainError(f"solar_power must be > 0, got {solar_power}")
    litres = water_mass / WATER_DENSITY * 1000.0
    return litres / (total_time / 3600.0) / (solar_power / 1000.0)

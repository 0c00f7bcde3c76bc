"""Luth-Wismer soil cutting forces for cohesionless sand and for clay.

Both force expressions share the prefactor ``rho * g * w * l**1.5 * sqrt(d)``
and differ in the rake-angle exponent, the depth-ratio exponent and the
bracketed dimensionless group.  The rake angle enters in radians.

The ``*_terms`` kernels accept scalars or numpy arrays (broadcasting), so the
optimizer can evaluate a whole batch of finite-difference probes at once.  The
public functions take the typed records, validate them and return floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonFiniteError, SingularInputError

# Slightly negative round-off in limit cases is floored to zero.
FORCE_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class SoilEnvironment:
    """Physical properties of the worksite regolith.

    Temperatures are in degrees Celsius; ``water_fraction`` is a mass fraction.
    """

    density: float = 1876.0
    gravity: float = 0.0057
    cohesion: float = 147.0
    specific_heat: float = 1430.0
    surface_temperature: float = 200.0
    extraction_temperature: float = 1000.0
    water_fraction: float = 0.10

    def __post_init__(self):
        if not self.density > 0:
            raise DomainError(f"density must be > 0, got {self.density}")
        if not self.gravity > 0:
            raise DomainError(f"gravity must be > 0, got {self.gravity}")
        if not self.cohesion >= 0:
            raise DomainError(f"cohesion must be >= 0, got {self.cohesion}")
        if not self.specific_heat > 0:
            raise DomainError(f"specific_heat must be > 0, got {self.specific_heat}")
        if not 0.0 <= self.water_fraction <= 1.0:
            raise DomainError(f"water_fraction must lie in [0, 1], got {self.water_fraction}")
        if not self.extraction_temperature > self.surface_temperature:
            raise DomainError(
                "extraction_temperature must exceed surface_temperature "
                f"({self.extraction_temperature} <= {self.surface_temperature})"
            )


@dataclass(frozen=True)
class CutGeometry:
    """Bucket cutting geometry. Lengths in metres, ``rake_angle`` in radians."""

    bucket_width: float
    cut_face_length: float
    penetration_depth: float
    rake_angle: float

    def __post_init__(self):
        for name in ("bucket_width", "cut_face_length", "penetration_depth"):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f"{name} must be > 0, got {value}")
        if not 0.0 < self.rake_angle < math.pi / 2:
            raise DomainError(f"rake_angle must lie in (0, pi/2) rad, got {self.rake_angle}")
        if self.penetration_depth > self.cut_face_length:
            raise DomainError(
                f"penetration_depth {self.penetration_depth} exceeds "
                f"cut_face_length {self.cut_face_length}"
            )

    @classmethod
    def from_degrees(cls, bucket_width, cut_face_length, penetration_depth, rake_angle_deg):
        return cls(bucket_width, cut_face_length, penetration_depth, math.radians(rake_angle_deg))


@dataclass(frozen=True)
class CutKinematics:
    """Cutting speed in m/s. Zero is only meaningful for the static sand force."""

    cut_velocity: float

    def __post_init__(self):
        if not self.cut_velocity >= 0:
            raise DomainError(f"cut_velocity must be >= 0, got {self.cut_velocity}")


def sand_force_terms(rho, g, w, l, d, beta, v):
    """Factors of the sand force, in multiplication order.

    Returns a dict of factor name to value; the force is their product.
    """
    with np.errstate(all="ignore"):
        return {
            "prefactor": rho * g * w * np.power(l, 1.5),
            "rake_power": np.power(beta, 1.73),
            "depth_sqrt": np.sqrt(d),
            "depth_ratio": np.power(d / (l * np.sin(beta)), 0.77),
            "bracket": 1.05 * np.power(d / w, 1.11) + 1.26 * v**2 / (g * l) + 3.91,
        }


def clay_force_terms(rho, g, c, w, l, d, beta, v):
    """Factors of the clay force, in multiplication order."""
    with np.errstate(all="ignore"):
        cohesion_group = (
            np.power(11.5 * c / (rho * g * d), 1.21)
            * np.power(2.0 * v / (3.0 * w), 0.121)
            * (0.055 * np.power(d / w, 0.78) + 0.065)
        )
        return {
            "prefactor": rho * g * w * np.power(l, 1.5),
            "rake_power": np.power(beta, 1.15),
            "depth_sqrt": np.sqrt(d),
            "depth_ratio": np.power(d / (l * np.sin(beta)), 1.21),
            "bracket": cohesion_group + 0.64 * (v**2 / (g * l)),
        }


def _product(terms):
    out = 1.0
    for value in terms.values():
        out = out * value
    return out


def sand_force_kernel(rho, g, w, l, d, beta, v):
    """Array-friendly sand force, no validation."""
    return _product(sand_force_terms(rho, g, w, l, d, beta, v))


def clay_force_kernel(rho, g, c, w, l, d, beta, v):
    """Array-friendly clay force, no validation."""
    return _product(clay_force_terms(rho, g, c, w, l, d, beta, v))


def _finish(kind: str, terms: dict) -> float:
    for name, value in terms.items():
        if not math.isfinite(float(value)):
            raise NonFiniteError(f"{kind} force term {name!r} is not finite ({value})", name)
    force = float(_product(terms))
    if not math.isfinite(force):
        raise NonFiniteError(f"{kind} force product overflowed ({force})", "product")
    if force < 0:
        if force >= -FORCE_CLAMP_TOL:
            return 0.0
        raise DomainError(f"{kind} force evaluated negative ({force} N)")
    return force


def sand_force(env: SoilEnvironment, geom: CutGeometry, kin: CutKinematics) -> float:
    """Cutting force in cohesionless sand, N."""
    terms = sand_force_terms(
        env.density, env.gravity, geom.bucket_width, geom.cut_face_length,
        geom.penetration_depth, geom.rake_angle, kin.cut_velocity,
    )
    return _finish("sand", terms)


def clay_force(env: SoilEnvironment, geom: CutGeometry, kin: CutKinematics) -> float:
    """Cutting force in cohesive clay, N.

    Raises:
        SingularInputError: zero cut velocity or zero penetration depth.
    """
    if kin.cut_velocity == 0:
        raise SingularInputError("clay force needs cut_velocity > 0 (base of the 0.121 power)")
    if geom.penetration_depth == 0:
        raise SingularInputError("clay force needs penetration_depth > 0 (cohesion group divides by d)")
    terms = clay_force_terms(
        env.density, env.gravity, env.cohesion, geom.bucket_width, geom.cut_face_length,
        geom.penetration_depth, geom.rake_angle, kin.cut_velocity,
    )
    return _finish("clay", terms)


def total_cut_force(env: SoilEnvironment, geom: CutGeometry, kin: CutKinematics) -> float:
    """Sand plus clay force, N."""
    return sand_force(env, geom, kin) + clay_force(env, geom, kin)

"""Scenario configuration: a flat TOML document of ``key = value`` pairs.

Keys use the units of the published tables (kW, percent, degrees Celsius,
degrees of angle); :meth:`ScenarioConfig.to_problem` converts to SI.  A key
that is absent takes its default, and the defaults reproduce the baseline
environment, efficiencies and mission requirements.  Design files use the
same format with the keys in :data:`DESIGN_KEYS`.
"""

from __future__ import annotations

import difflib
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, DomainError
from .excavation import CONVENTIONS
from .problem import (
    DesignBounds,
    DesignVector,
    MissionRequirements,
    OptimizationProblem,
    SolverConfig,
)
from .resources import ProcessEfficiencies
from .soil import SoilEnvironment


def _positive(v):
    return v > 0


def _non_negative(v):
    return v >= 0


def _percent(v):
    return 0 < v <= 100


def _percent_closed(v):
    return 0 <= v <= 100


@dataclass(frozen=True)
class Key:
    default: Any
    kind: type
    check: Callable[[Any], bool] | None = None
    choices: tuple[str, ...] | None = None
    doc: str = ""


SCHEMA: dict[str, Key] = {
    # mission requirements
    "required_water_kg": Key(7.5, float, _non_negative, doc="water to be extracted, kg"),
    "max_solar_power_kw": Key(10.0, float, _positive, doc="maximum solar power, kW"),
    "water_weight": Key(0.1, float, _non_negative, doc="weight of the water term in the cost"),
    # surface parameters
    "soil_density": Key(1876.0, float, _positive, doc="kg/m^3"),
    "gravity": Key(0.0057, float, _positive, doc="m/s^2"),
    "cohesion": Key(147.0, float, _non_negative, doc="Pa"),
    "specific_heat": Key(1430.0, float, _positive, doc="J/(kg C)"),
    "surface_temperature": Key(200.0, float, doc="regolith surface temperature, C"),
    "extraction_temperature": Key(1000.0, float, doc="water extraction temperature, C"),
    "water_content_percent": Key(10.0, float, _percent_closed, doc="water mass fraction, %"),
    # system efficiencies, percent
    "battery_efficiency_percent": Key(75.0, float, _percent),
    "solar_efficiency_percent": Key(29.0, float, _percent),
    "motor_efficiency_percent": Key(70.0, float, _percent),
    "drivetrain_efficiency_percent": Key(70.0, float, _percent),
    "fill_efficiency_percent": Key(45.0, float, _percent),
    "water_extraction_efficiency_percent": Key(90.0, float, _percent),
    "hydrogen_efficiency_percent": Key(90.0, float, _percent),
    "oxygen_efficiency_percent": Key(90.0, float, _percent),
    # model switches
    "electrolysis_energy_j_per_mol": Key(23710.0, float, _positive),
    "efficiency_convention": Key("as_printed", str, choices=CONVENTIONS),
    # solver
    "objective": Key("cost", str, choices=("cost", "time"), doc="objective of `optimize`"),
    "sweep_objective": Key("time", str, choices=("cost", "time"), doc="objective of sweep points"),
    "seed": Key(0, int, _non_negative),
    "restarts": Key(16, int, _positive),
    "penalty_initial": Key(10.0, float, _positive),
    "penalty_growth": Key(10.0, float, lambda v: v >= 1),
    "outer_loops": Key(5, int, _positive),
    "fd_step": Key(1e-6, float, _positive),
    "rel_tolerance": Key(1e-8, float, _positive),
    "stall_iterations": Key(5, int, _positive),
    "max_iterations": Key(10_000, int, _positive),
    "feasibility_tolerance": Key(1e-6, float, _non_negative),
    "constraint_margin": Key(1e-7, float, _non_negative),
    # bound box
    "wheel_count_min": Key(2, int, _positive),
    "wheel_count_max": Key(4, int, _positive),
    "bucket_count_min": Key(2, int, _positive),
    "bucket_count_max": Key(300, int, _positive),
    "wheel_diameter_min_m": Key(0.1, float, _positive),
    "wheel_diameter_max_m": Key(2.0, float, _positive),
    "bucket_width_min_m": Key(0.01, float, _positive),
    "bucket_width_max_m": Key(0.3, float, _positive),
    "cut_face_length_min_m": Key(0.01, float, _positive),
    "cut_face_length_max_m": Key(0.3, float, _positive),
    "penetration_depth_min_m": Key(0.001, float, _positive),
    "rake_angle_min_deg": Key(2.0, float, lambda v: 0 < v < 90),
    "rake_angle_max_deg": Key(45.0, float, lambda v: 0 < v < 90),
    "cut_velocity_min_m_s": Key(0.01, float, _positive),
    "cut_velocity_max_m_s": Key(0.5, float, _positive),
    "time_min_s": Key(10.0, float, _positive),
    "time_max_s": Key(360_000.0, float, _positive),
}

RANGE_PAIRS = (
    ("wheel_count_min", "wheel_count_max"),
    ("bucket_count_min", "bucket_count_max"),
    ("wheel_diameter_min_m", "wheel_diameter_max_m"),
    ("bucket_width_min_m", "bucket_width_max_m"),
    ("cut_face_length_min_m", "cut_face_length_max_m"),
    ("rake_angle_min_deg", "rake_angle_max_deg"),
    ("cut_velocity_min_m_s", "cut_velocity_max_m_s"),
    ("time_min_s", "time_max_s"),
    ("surface_temperature", "extraction_temperature"),
)

DESIGN_KEYS: dict[str, Key] = {
    "wheel_count": Key(None, int, _positive),
    "bucket_count": Key(None, int, _positive),
    "wheel_diameter_m": Key(None, float, _positive),
    "bucket_width_m": Key(None, float, _positive),
    "cut_face_length_m": Key(None, float, _positive),
    "penetration_depth_m": Key(None, float, _positive),
    "rake_angle_deg": Key(None, float, lambda v: 0 < v < 90),
    "cut_velocity_m_s": Key(None, float, _positive),
    "excavation_time_s": Key(None, float, _non_negative),
    "heating_time_s": Key(None, float, _positive),
    "electrolysis_time_s": Key(None, float, _positive),
}


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    pattern = re.compile(rf"^\s*[\"']?{re.escape(key)}[\"']?\s*=")
    for number, line in enumerate(text.splitlines(), start=1):
        if pattern.match(line):
            return number
    return None


def _coerce(key: str, spec: Key, value: Any, line: int | None):
    if spec.kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {type(value).__name__}", key, line)
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError("must be finite", key, line)
    elif spec.kind is int:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {type(value).__name__}", key, line)
    elif spec.kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {type(value).__name__}", key, line)
        if spec.choices and value not in spec.choices:
            raise ConfigError(f"must be one of {spec.choices}, got {value!r}", key, line)
    if spec.check is not None and not spec.check(value):
        raise ConfigError(f"value {value!r} is out of range", key, line)
    return value


def _parse_toml(text: str, source: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"cannot parse {source}: {err}") from err


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario in file units, with per-key provenance."""

    values: Mapping[str, Any]
    provenance: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __getitem__(self, key: str):
        return self.values[key]

    def with_values(self, source: str = "override", **updates) -> "ScenarioConfig":
        return config_from_mapping({**self.values, **updates}, source=source, base=self)

    def to_problem(self, objective: str | None = None) -> OptimizationProblem:
        v = self.values
        try:
            return OptimizationProblem(
                requirements=MissionRequirements(
                    required_water_mass=v["required_water_kg"],
                    max_solar_power=v["max_solar_power_kw"] * 1000.0,
                    water_weight=v["water_weight"],
                ),
                environment=SoilEnvironment(
                    density=v["soil_density"], gravity=v["gravity"], cohesion=v["cohesion"],
                    specific_heat=v["specific_heat"], surface_temperature=v["surface_temperature"],
                    extraction_temperature=v["extraction_temperature"],
                    water_fraction=v["water_content_percent"] / 100.0,
                ),
                efficiencies=ProcessEfficiencies(
                    battery=v["battery_efficiency_percent"] / 100.0,
                    solar=v["solar_efficiency_percent"] / 100.0,
                    motor=v["motor_efficiency_percent"] / 100.0,
                    drivetrain=v["drivetrain_efficiency_percent"] / 100.0,
                    water_extraction=v["water_extraction_efficiency_percent"] / 100.0,
                    hydrogen=v["hydrogen_efficiency_percent"] / 100.0,
                    oxygen=v["oxygen_efficiency_percent"] / 100.0,
                ),
                fill_efficiency=v["fill_efficiency_percent"] / 100.0,
                bounds=DesignBounds(
                    wheel_count=(v["wheel_count_min"], v["wheel_count_max"]),
                    bucket_count=(v["bucket_count_min"], v["bucket_count_max"]),
                    wheel_diameter=(v["wheel_diameter_min_m"], v["wheel_diameter_max_m"]),
                    bucket_width=(v["bucket_width_min_m"], v["bucket_width_max_m"]),
                    cut_face_length=(v["cut_face_length_min_m"], v["cut_face_length_max_m"]),
                    penetration_depth_min=v["penetration_depth_min_m"],
                    rake_angle=(math.radians(v["rake_angle_min_deg"]),
                                math.radians(v["rake_angle_max_deg"])),
                    cut_velocity=(v["cut_velocity_min_m_s"], v["cut_velocity_max_m_s"]),
                    time=(v["time_min_s"], v["time_max_s"]),
                ),
                solver=SolverConfig(
                    objective=objective or v["objective"], restarts=v["restarts"], seed=v["seed"],
                    penalty_initial=v["penalty_initial"], penalty_growth=v["penalty_growth"],
                    outer_loops=v["outer_loops"], fd_step=v["fd_step"],
                    rel_tolerance=v["rel_tolerance"], stall_iterations=v["stall_iterations"],
                    max_iterations=v["max_iterations"],
                    feasibility_tolerance=v["feasibility_tolerance"],
                    constraint_margin=v["constraint_margin"],
                ),
                efficiency_convention=v["efficiency_convention"],
                electrolysis_energy=v["electrolysis_energy_j_per_mol"],
            )
        except DomainError as err:
            raise ConfigError(f"invalid scenario: {err}") from err

    def dumps(self) -> str:
        return dumps_flat(self.values)


def dumps_flat(values: Mapping[str, Any]) -> str:
    """Serialise a flat mapping as TOML."""
    lines = []
    for key, value in values.items():
        if isinstance(value, str):
            text = '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
        elif isinstance(value, bool):
            text = "true" if value else "false"
        else:
            text = repr(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def config_from_mapping(data: Mapping[str, Any], source: str = "file", text: str | None = None,
                        base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Validate ``data`` against the schema and fill the gaps with defaults."""
    values = {key: spec.default for key, spec in SCHEMA.items()}
    provenance = {key: "default" for key in SCHEMA}
    if base is not None:
        values.update(base.values)
        provenance.update(base.provenance)
    for key, raw in data.items():
        line = _line_of(text, key)
        if key not in SCHEMA:
            close = difflib.get_close_matches(key, SCHEMA, n=1)
            hint = f"; did you mean '{close[0]}'?" if close else ""
            raise ConfigError("unknown key" + hint, key, line)
        if isinstance(raw, dict):
            raise ConfigError("nested tables are not supported; use flat keys", key, line)
        value = _coerce(key, SCHEMA[key], raw, line)
        if base is None or value != base.values.get(key):
            provenance[key] = source
        values[key] = value
    for low, high in RANGE_PAIRS:
        strict = low == "surface_temperature"
        if values[low] > values[high] or (strict and values[low] == values[high]):
            key = low if provenance[low] != "default" else high
            raise ConfigError(f"{low} must be below {high}", key, _line_of(text, key))
    config = ScenarioConfig(values=values, provenance=provenance)
    config.to_problem()
    return config


def load_config(path: str | Path | None) -> ScenarioConfig:
    """Load a scenario file; ``None`` or an empty file yields the default preset."""
    if path is None:
        return config_from_mapping({})
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    return config_from_mapping(_parse_toml(text, str(path)), source="file", text=text)


def loads_config(text: str) -> ScenarioConfig:
    return config_from_mapping(_parse_toml(text, "<string>"), source="file", text=text)


def design_from_mapping(data: Mapping[str, Any], text: str | None = None) -> DesignVector:
    """Build a design from file units (degrees for the rake angle, seconds for times)."""
    for key in data:
        if key not in DESIGN_KEYS:
            raise ConfigError("unknown design key", key, _line_of(text, key))
    missing = [key for key in DESIGN_KEYS if key not in data]
    if missing:
        raise ConfigError(f"design is missing keys {missing}")
    v = {key: _coerce(key, spec, data[key], _line_of(text, key)) for key, spec in DESIGN_KEYS.items()}
    if v["penetration_depth_m"] > v["cut_face_length_m"]:
        raise ConfigError("penetration depth exceeds the cut face length",
                          "penetration_depth_m", _line_of(text, "penetration_depth_m"))
    return DesignVector(
        wheel_count=float(v["wheel_count"]), bucket_count=float(v["bucket_count"]),
        wheel_diameter=v["wheel_diameter_m"], bucket_width=v["bucket_width_m"],
        cut_face_length=v["cut_face_length_m"], penetration_depth=v["penetration_depth_m"],
        rake_angle=math.radians(v["rake_angle_deg"]), cut_velocity=v["cut_velocity_m_s"],
        excavation_time=v["excavation_time_s"], heating_time=v["heating_time_s"],
        electrolysis_time=v["electrolysis_time_s"],
    )


def design_to_mapping(x: DesignVector) -> dict[str, Any]:
    return {
        "wheel_count": int(round(x.wheel_count)),
        "bucket_count": int(round(x.bucket_count)),
        "wheel_diameter_m": x.wheel_diameter,
        "bucket_width_m": x.bucket_width,
        "cut_face_length_m": x.cut_face_length,
        "penetration_depth_m": x.penetration_depth,
        "rake_angle_deg": math.degrees(x.rake_angle),
        "cut_velocity_m_s": x.cut_velocity,
        "excavation_time_s": x.excavation_time,
        "heating_time_s": x.heating_time,
        "electrolysis_time_s": x.electrolysis_time,
    }


def load_design(path: str | Path) -> DesignVector:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read design {path}: {err}") from err
    return design_from_mapping(_parse_toml(text, str(path)), text)


def reference_design() -> DesignVector:
    """The published optimal wheel with the recovered face length and schedule."""
    text = (Path(__file__).parent / "data" / "reference_design.toml").read_text(encoding="utf-8")
    return design_from_mapping(_parse_toml(text, "reference_design.toml"), text)

import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracle  # noqa: E402
from regolith_opt import OptimizationProblem  # noqa: E402
from regolith_opt.problem import DesignVector  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


def fast_problem(restarts=4, seed=0, objective="cost", **kwargs) -> OptimizationProblem:
    problem = OptimizationProblem(**kwargs)
    return replace(problem, solver=replace(problem.solver, restarts=restarts, seed=seed,
                                           objective=objective))


def random_design(rng: np.random.Generator, problem: OptimizationProblem | None = None) -> DesignVector:
    """Uniform draw from the bound box (log-uniform for lengths and times)."""
    b = (problem or OptimizationProblem()).bounds

    def logu(lo, hi):
        return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))

    l = logu(*b.cut_face_length)
    return DesignVector(
        wheel_count=float(rng.integers(b.wheel_count[0], b.wheel_count[1] + 1)),
        bucket_count=float(rng.integers(b.bucket_count[0], b.bucket_count[1] + 1)),
        wheel_diameter=logu(*b.wheel_diameter),
        bucket_width=logu(*b.bucket_width),
        cut_face_length=l,
        penetration_depth=logu(b.penetration_depth_min, max(l, b.penetration_depth_min)),
        rake_angle=float(rng.uniform(*b.rake_angle)),
        cut_velocity=logu(*b.cut_velocity),
        excavation_time=logu(*b.time),
        heating_time=logu(*b.time),
        electrolysis_time=logu(*b.time),
    )


def oracle_inputs(problem: OptimizationProblem):
    env, eff, req = problem.environment, problem.efficiencies, problem.requirements
    return dict(
        env=dict(rho=env.density, g=env.gravity, c=env.cohesion, cp=env.specific_heat,
                 ts=env.surface_temperature, text=env.extraction_temperature, wfr=env.water_fraction),
        eff=dict(bat=eff.battery, solar=eff.solar, motor=eff.motor, drive=eff.drivetrain,
                 water=eff.water_extraction, h=eff.hydrogen, o=eff.oxygen),
        fill=problem.fill_efficiency,
        req=dict(m_req=req.required_water_mass, p_max=req.max_solar_power, weight=req.water_weight),
        q_e=problem.electrolysis_energy,
        convention=problem.efficiency_convention,
    )


@pytest.fixture
def baseline_problem():
    return OptimizationProblem()


@pytest.fixture(scope="session")
def oracle_module():
    return oracle


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])

import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import fast_problem, random_design
from regolith_opt import OptimizationProblem, evaluate_design, fd_gradient, optimize
from regolith_opt.config import reference_design
from regolith_opt.optimizer import GradientError, start_points
from regolith_opt.problem import INTEGER_VARIABLES, IDX, MissionRequirements, evaluate_batch

# Lower bound on t_net at 10 kW when excavation draws no power (analysis in README).
TIME_BOUND_HR = 1.0090541671


@pytest.fixture(scope="module")
def cost_result():
    return optimize(fast_problem(restarts=4, seed=0))


def test_fd_gradient_quadratic():
    g = fd_gradient(lambda x: float(np.sum(x**2)), np.array([1.0, 2.0]))
    assert g == pytest.approx([2.0, 4.0], abs=1e-6)


def test_fd_gradient_constant():
    g = fd_gradient(lambda x: 3.0, np.array([1.0, -5.0, 1e6]))
    assert np.all(np.abs(g) <= 1e-9)


def test_fd_gradient_fixed_mask_and_batch():
    f = lambda X: np.sum(np.atleast_2d(X) ** 2, axis=1)  # noqa: E731
    g = fd_gradient(f, np.array([1.0, 2.0, 3.0]), fixed=[False, True, False], batch=True)
    assert g == pytest.approx([2.0, 0.0, 6.0], abs=1e-6)


def test_fd_gradient_shrinks_step_once_then_fails():
    # finite only within 5e-7 of the origin: a 1e-6 probe fails, 1e-7 succeeds
    f = lambda x: float(x[0] ** 2) if abs(x[0]) < 5e-7 else math.inf  # noqa: E731
    assert fd_gradient(f, np.array([0.0]))[0] == pytest.approx(0.0, abs=1e-9)
    g = lambda x: math.inf if x[0] != 0 else 0.0  # noqa: E731
    with pytest.raises(GradientError) as info:
        fd_gradient(g, np.array([0.0]))
    assert info.value.index == 0


def test_fd_gradient_step_halving_consistency():
    problem = OptimizationProblem()
    rng = np.random.default_rng(11)
    fixed = np.zeros(11, bool)
    for name in INTEGER_VARIABLES:
        fixed[IDX[name]] = True

    def J(X):
        return evaluate_batch(X, problem)["cost"]

    for _ in range(20):
        x = random_design(rng, problem).to_array()
        h = np.maximum(1e-6, 1e-6 * np.abs(x))
        g1 = fd_gradient(J, x, steps=h, fixed=fixed, batch=True)
        g2 = fd_gradient(J, x, steps=h / 10, fixed=fixed, batch=True)
        scale = np.abs(g2) + 1e-6 * np.linalg.norm(g2)
        assert np.all(np.abs(g1 - g2) <= 1e-3 * scale)


def test_cost_optimum_is_feasible(cost_result):
    r = cost_result
    assert r.feasible
    assert r.evaluation.water_mass >= 7.5 - 1e-6
    assert r.evaluation.solar_power <= 10_000.0 + 1e-6
    assert r.cost < 1e-6
    for name in INTEGER_VARIABLES:
        assert getattr(r.design, name) == round(getattr(r.design, name))
    assert problem_bounds_contain(r.design)


def problem_bounds_contain(x):
    return OptimizationProblem().bounds.contains(x)


def test_feasibility_rechecked_independently(cost_result):
    ev = evaluate_design(cost_result.design, OptimizationProblem())
    assert ev.residuals == cost_result.residuals
    assert max(ev.residuals.values()) <= 1e-6
    assert ev.rotations >= 0 and ev.residuals["rim_fit"] <= 1e-6


def test_same_seed_is_bit_identical(cost_result):
    again = optimize(fast_problem(restarts=4, seed=0))
    assert np.array_equal(again.design.to_array(), cost_result.design.to_array())
    assert again.cost == cost_result.cost
    assert again.starts == cost_result.starts


def test_monotone_improvement_over_starts(cost_result):
    assert all(cost_result.cost <= s.initial_cost for s in cost_result.starts)
    assert all(s.cost <= s.initial_cost for s in cost_result.starts if s.feasible)


def test_argmin_invariant_under_cost_scaling(cost_result):
    scaled = optimize(replace(fast_problem(restarts=4, seed=0), cost_scale=4.0))
    assert np.array_equal(scaled.design.to_array(), cost_result.design.to_array())
    assert scaled.cost == pytest.approx(4.0 * cost_result.cost, rel=1e-12, abs=1e-300)


def test_restart_superset_never_worse(cost_result):
    more = optimize(fast_problem(restarts=8, seed=0))
    assert more.feasible
    assert more.cost <= cost_result.cost


def test_start_streams_do_not_depend_on_restart_count():
    few = start_points(fast_problem(restarts=3, seed=5))
    many = start_points(fast_problem(restarts=9, seed=5))
    for a, b in zip(few, many):
        assert np.array_equal(a, b)


def test_different_seeds_both_feasible(cost_result):
    other = optimize(fast_problem(restarts=4, seed=1))
    assert other.feasible and cost_result.feasible


def test_zero_requirement_drives_power_to_budget():
    problem = replace(fast_problem(restarts=4),
                      requirements=MissionRequirements(required_water_mass=0.0, max_solar_power=1e6))
    r = optimize(problem)
    assert r.feasible
    assert r.evaluation.solar_power == pytest.approx(1e6, rel=1e-4)
    # Power needs regolith, and any water produced now costs 0.1*M^2; with the
    # 10 s time floor the best J is ~1.2e-6 * P_max^2, i.e. zero on the P_max^2 scale.
    assert r.cost / 1000.0**2 < 2e-6


def test_impossible_budget_is_flagged_infeasible():
    problem = replace(fast_problem(restarts=2),
                      requirements=MissionRequirements(max_solar_power=1.0))  # 0.001 kW
    r = optimize(problem)
    assert not r.feasible
    assert max(r.residuals.values()) > 1e-6
    assert set(r.residuals) == set(evaluate_design(r.design, problem).residuals)


def test_time_objective_reaches_analytic_bound():
    r = optimize(fast_problem(restarts=4, objective="time"))
    assert r.feasible
    assert r.objective == "time"
    t_hr = r.evaluation.total_time / 3600
    assert t_hr >= TIME_BOUND_HR * (1 - 1e-9)
    assert t_hr == pytest.approx(TIME_BOUND_HR, rel=1e-4)


def test_initial_guess_is_start_zero():
    guess = reference_design()
    r = optimize(fast_problem(restarts=2), initial_guess=guess)
    assert r.restarts == 3
    assert r.starts[0].initial_cost == pytest.approx(evaluate_design(guess, OptimizationProblem()).cost)


def test_fixed_variables_are_held():
    problem = fast_problem(restarts=2, objective="time").with_fixed(bucket_count=16.0)
    r = optimize(problem)
    assert r.design.bucket_count == 16.0

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regolith_opt import resources as res
from regolith_opt.errors import DomainError
from regolith_opt.resources import OperationSchedule, ProcessEfficiencies
from regolith_opt.soil import SoilEnvironment

ENV = SoilEnvironment()
EFF = ProcessEfficiencies()


def test_baseline_efficiencies():
    assert (EFF.battery, EFF.solar, EFF.motor, EFF.drivetrain) == (0.75, 0.29, 0.70, 0.70)
    assert (EFF.water_extraction, EFF.hydrogen, EFF.oxygen) == (0.90, 0.90, 0.90)


def test_water_mass_examples():
    assert res.water_mass(100.0, SoilEnvironment(water_fraction=0.0), EFF) == 0.0
    assert res.water_mass(83.33, ENV, EFF) == pytest.approx(7.5, rel=1e-3)
    assert res.water_mass(100.0, SoilEnvironment(water_fraction=0.05), EFF) == pytest.approx(4.5)


def test_heating_power_examples():
    # the environment forbids T_s == T_ext, so the no-lift case goes through the kernel
    assert res.heating_power_kernel(0.75, 83.33, 1430.0, 1000.0, 1000.0, 3600.0) == 0.0
    assert res.heating_power(83.33, ENV, EFF, 3600.0) == pytest.approx(1.986e4, rel=1e-3)
    assert res.heating_power(83.33, ENV, EFF, 1800.0) == pytest.approx(2 * res.heating_power(83.33, ENV, EFF, 3600.0))
    with pytest.raises(DomainError):
        res.heating_power(83.33, ENV, EFF, 0.0)


def test_electrolysis_split_examples():
    assert res.electrolysis_split(0.0, EFF) == (0.0, 0.0)
    h, o = res.electrolysis_split(7.5, EFF)
    assert (h, o) == (pytest.approx(0.7553, abs=1e-4), pytest.approx(5.9933, abs=1e-4))
    h, o = res.electrolysis_split(1.0, ProcessEfficiencies(hydrogen=1.0, oxygen=1.0))
    assert (h, o) == (0.1119, 0.8879)
    assert h + o == pytest.approx(0.9998)


def test_electrolysis_power_examples():
    assert res.electrolysis_power(0.0, EFF, 3600.0) == 0.0
    assert 7.5 / res.WATER_MOLAR_MASS == pytest.approx(416.3, abs=0.05)
    p = res.electrolysis_power(7.5, EFF, 3600.0)
    assert p == pytest.approx(2056, rel=1e-3)
    assert res.electrolysis_power(7.5, EFF, 3600.0, 2 * res.ELECTROLYSIS_ENERGY) == pytest.approx(2 * p)
    with pytest.raises(DomainError):
        res.electrolysis_power(7.5, EFF, -1.0)


def test_solar_power_examples():
    assert res.solar_power(0.0, 0.0, 0.0, EFF) == 0.0
    assert res.solar_power(2000.0, 5000.0, 3000.0, EFF) == pytest.approx(2900.0)
    assert res.solar_power(1.0, 2.0, 3.0, ProcessEfficiencies(solar=1.0)) == 6.0
    assert res.solar_power(2000.0, 5000.0, 3000.0, EFF, "divide") == pytest.approx(10_000 / 0.29)


def test_total_time_examples():
    assert res.total_time(OperationSchedule(172.0, 3600.0, 3600.0)) == 7372.0
    assert res.total_time(OperationSchedule(1e-9, 1e-9, 1e-9)) == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(DomainError):
        OperationSchedule(0.0, 1.0, 1.0)


def test_performance_metrics_examples():
    m = res.performance_metrics(83.33, 7.5, 0.7553, 5.9933, 10_000.0)
    assert m.m1 == pytest.approx(8.333)
    assert m.m2 == pytest.approx(0.75)
    half = res.performance_metrics(83.33, 7.5, 0.7553, 5.9933, 20_000.0)
    assert (half.m1, half.m2, half.m3, half.m4) == pytest.approx((m.m1 / 2, m.m2 / 2, m.m3 / 2, m.m4 / 2))
    with pytest.raises(DomainError):
        res.performance_metrics(1.0, 1.0, 1.0, 1.0, 0.0)


def test_water_rate_examples():
    assert res.water_rate_metric(7.5, 17.05 * 3600, 10_000.0) == pytest.approx(0.044, abs=5e-4)
    assert res.water_rate_metric(7.5, 36.6 * 3600, 5_000.0) == pytest.approx(0.041, abs=5e-4)
    assert res.water_rate_metric(0.0, 3600.0, 1000.0) == 0.0
    with pytest.raises(DomainError):
        res.water_rate_metric(1.0, 0.0, 1000.0)
    with pytest.raises(DomainError):
        res.water_rate_metric(1.0, 10.0, 0.0)


def test_efficiency_invariant():
    with pytest.raises(DomainError):
        ProcessEfficiencies(solar=0.0)
    with pytest.raises(DomainError):
        ProcessEfficiencies(battery=1.01)


effs = st.floats(0.05, 1.0)


@settings(max_examples=200, deadline=None)
@given(m_net=st.floats(0.0, 1e4), wfr=st.floats(0.0, 1.0), ew=effs, eh=effs, eo=effs)
def test_mass_chain_identity(m_net, wfr, ew, eh, eo):
    eff = ProcessEfficiencies(water_extraction=ew, hydrogen=eh, oxygen=eo)
    env = SoilEnvironment(water_fraction=wfr)
    water = res.water_mass(m_net, env, eff)
    assert water == pytest.approx(ew * wfr * m_net, rel=1e-12, abs=1e-300)
    h, o = res.electrolysis_split(water, eff)
    assert h + o <= water * max(eh, eo) * 0.9998 * (1 + 1e-12) + 1e-300
    assert h <= 0.1119 * water + 1e-300 and o <= 0.8879 * water + 1e-300


@settings(max_examples=200, deadline=None)
@given(m_net=st.floats(1e-3, 1e4), t=st.floats(1.0, 1e6), k=st.floats(0.1, 10.0))
def test_power_homogeneity(m_net, t, k):
    heat = res.heating_power(m_net, ENV, EFF, t)
    assert res.heating_power(m_net, ENV, EFF, t * k) == pytest.approx(heat / k, rel=1e-12)
    assert res.heating_power(m_net * k, ENV, EFF, t) == pytest.approx(heat * k, rel=1e-12)
    elec = res.electrolysis_power(m_net, EFF, t)
    assert res.electrolysis_power(m_net, EFF, t * k) == pytest.approx(elec / k, rel=1e-12)
    assert res.electrolysis_power(m_net * k, EFF, t) == pytest.approx(elec * k, rel=1e-12)
    assert res.electrolysis_power(m_net, EFF, t, res.ELECTROLYSIS_ENERGY * k) == pytest.approx(elec * k, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(m_net=st.floats(1e-3, 1e4), p=st.floats(1.0, 1e6), wfr=st.floats(0.01, 1.0), ew=effs)
def test_metric_ratio_identity(m_net, p, wfr, ew):
    eff = ProcessEfficiencies(water_extraction=ew)
    water = res.water_mass(m_net, SoilEnvironment(water_fraction=wfr), eff)
    h, o = res.electrolysis_split(water, eff)
    m = res.performance_metrics(m_net, water, h, o, p)
    assert m.m2 / m.m1 == pytest.approx(ew * wfr, rel=1e-12)
    assert m.m3 == pytest.approx(0.1119 * eff.hydrogen * m.m2, rel=1e-12)
    assert m.m4 == pytest.approx(0.8879 * eff.oxygen * m.m2, rel=1e-12)


@pytest.mark.parametrize("convention", ["as_printed", "divide"])
def test_energy_bookkeeping_identity(convention):
    m_net, t_heat, t_elec = 83.33, 2750.0, 885.0
    water = res.water_mass(m_net, ENV, EFF)
    ideal_heat = m_net * ENV.specific_heat * 800.0
    ideal_elec = water / res.WATER_MOLAR_MASS * res.ELECTROLYSIS_ENERGY
    heat_energy = res.heating_power(m_net, ENV, EFF, t_heat, convention) * t_heat
    elec_energy = res.electrolysis_power(water, EFF, t_elec, convention=convention) * t_elec
    scale = EFF.battery if convention == "as_printed" else 1 / EFF.battery
    assert heat_energy == pytest.approx(ideal_heat * scale, rel=1e-12)
    assert elec_energy == pytest.approx(ideal_elec * scale, rel=1e-12)
    if convention == "divide":
        assert heat_energy + elec_energy >= ideal_heat + ideal_elec

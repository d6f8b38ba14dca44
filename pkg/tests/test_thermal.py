import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satops import astro
from satops.astro import OrbitState
from satops.core import EARTH, CentralBody, Epoch, ValidationError
from satops.thermal import (
    STEFAN_BOLTZMANN,
    HeatFluxes,
    ThermalProperties,
    ThermalState,
    equilibrium_temperature,
    heat_fluxes,
    step_temperature,
)

from conftest import A_550

# the constellation spacecraft
PROPS = ThermalProperties(
    mass=50.0,
    thermal_capacity=1000.0,
    solar_absorptance=1.0,
    infrared_absorptance=1.0,
    area_facing_sun=2.0,
    area_facing_albedo=2.0,
    area_facing_body=2.0,
    emissive_area=4.0,
    power_to_heat_ratio=0.5,
    solar_irradiance=1360.0,
)
BODY = CentralBody("earth", 6371000.0, 3.986004418e14, 0.0, 288.0, 0.6, 0.3)


def test_eclipse_cold_body_only_infrared():
    f = heat_fluxes(ThermalState(0.0, PROPS), False, A_550, 0.0, BODY)
    assert f.solar == f.albedo == f.activity == f.dissipation == 0.0
    assert f.infrared > 0.0


def test_constellation_fluxes():
    f = heat_fluxes(ThermalState(273.15, PROPS), True, A_550, 100.0, BODY)
    assert f.solar == pytest.approx(2720.0)
    assert f.albedo == pytest.approx(408.0)
    assert f.infrared == pytest.approx(395.86327184990904, rel=1e-12)
    assert f.activity == pytest.approx(50.0)
    assert f.dissipation == pytest.approx(4 * STEFAN_BOLTZMANN * 273.15**4)


def test_no_flux_no_change():
    s = ThermalState(300.0, PROPS)
    assert step_temperature(s, HeatFluxes(0, 0, 0, 0, 0), 10.0).temperature == 300.0


@pytest.mark.parametrize("q_in, t_start", [(300.0, 250.0), (300.0, 120.0), (3000.0, 273.15)])
def test_converges_to_equilibrium(q_in, t_start):
    props = ThermalProperties(1000.0, 1000.0, 1.0, 1.0, 1.0, 0.0, 0.0, 4.0, 0.0)
    t_eq = (q_in / (4.0 * STEFAN_BOLTZMANN)) ** 0.25
    assert equilibrium_temperature(q_in, props) == pytest.approx(t_eq)
    if q_in == 300.0:
        assert t_eq == pytest.approx(190.705, abs=1e-3)
    state = ThermalState(t_start, props)
    fluxes = None
    prev_gap = None
    for _ in range(200000):
        fluxes = HeatFluxes(q_in, 0.0, 0.0, 0.0, 4.0 * STEFAN_BOLTZMANN * state.temperature**4)
        state = step_temperature(state, fluxes, 10.0)
        gap = abs(state.temperature - t_eq)
        if prev_gap is not None and gap < 50.0:
            assert gap <= prev_gap + 1e-12
        prev_gap = gap
        if gap < 1e-3:
            break
    assert abs(state.temperature - t_eq) < 0.1


def _orbit_temperature(dt, revolutions=1.0):
    orbit = OrbitState(A_550, 0.0, 0.0, 0.0, 0.0, 0.0, Epoch(0.0), EARTH)
    sun = (astro.AU_M, 0.0, 0.0)
    state = ThermalState(273.15, PROPS)
    steps = int(round(revolutions * orbit.period / dt))
    for k in range(steps):
        pos = astro.propagate(orbit, k * dt).position
        sunlit = not astro.is_in_eclipse(pos, sun, EARTH)
        state = step_temperature(state, heat_fluxes(state, sunlit, A_550, 100.0, BODY), dt)
    return state.temperature


def test_dt_halving_one_orbit():
    coarse = _orbit_temperature(1.0)
    fine = _orbit_temperature(0.5)
    assert abs(coarse - fine) < 0.5


def test_full_sun_heats_initially():
    f = heat_fluxes(ThermalState(273.15, PROPS), True, A_550, 100.0, BODY)
    assert f.net > 0
    assert step_temperature(ThermalState(273.15, PROPS), f, 1.0).temperature > 273.15


@settings(max_examples=100)
@given(
    t=st.floats(0, 1000),
    net=st.floats(-1e9, 1e9),
    dt=st.floats(1e-3, 1e4),
)
def test_never_below_zero(t, net, dt):
    s = step_temperature(ThermalState(t, PROPS), HeatFluxes(0, 0, 0, 0, -net), dt)
    assert s.temperature >= 0.0


@given(kappa=st.floats(0, 1), t=st.floats(0, 500))
def test_kappa_irrelevant_without_activity(kappa, t):
    a = ThermalProperties(50, 1000, 1, 1, 2, 2, 2, 4, kappa)
    b = ThermalProperties(50, 1000, 1, 1, 2, 2, 2, 4, 0.0)
    fa = heat_fluxes(ThermalState(t, a), True, A_550, 0.0, BODY)
    fb = heat_fluxes(ThermalState(t, b), True, A_550, 0.0, BODY)
    assert fa == fb


def test_property_validation():
    with pytest.raises(ValidationError):
        ThermalProperties(0.0, 1.0, 1, 1, 1, 1, 1, 1, 0.5)
    with pytest.raises(ValidationError):
        ThermalProperties(1.0, 1.0, 1.2, 1, 1, 1, 1, 1, 0.5)
    with pytest.raises(ValidationError):
        ThermalProperties(1.0, 1.0, 1, 1, -1, 1, 1, 1, 0.5)
    with pytest.raises(ValidationError):
        ThermalState(-1.0, PROPS)


def test_step_requires_positive_dt():
    with pytest.raises(ValueError):
        step_temperature(ThermalState(1.0, PROPS), HeatFluxes(0, 0, 0, 0, 0), 0.0)

import pytest
from hypothesis import given
from hypothesis import strategies as st

from satops.core import ValidationError
from satops.power import Battery, charge, discharge


def test_half_battery_fills_in_8100_s():
    b = charge(Battery.from_soc(0.162e6, 0.5, 10.0), True, 8100.0)
    assert b.state_of_charge == pytest.approx(1.0)


def test_eclipse_does_not_charge():
    b = Battery.from_soc(1e6, 0.3, 50.0)
    assert charge(b, False, 1e5) == b


def test_full_battery_clamps():
    b = charge(Battery.from_soc(1e6, 1.0, 50.0), True, 10.0)
    assert b.state_of_charge == 1.0


def test_discharge_100w_for_600s():
    b, depleted = discharge(Battery.from_soc(1e6, 1.0, 50.0), 100.0, 600.0)
    assert b.state_of_charge == pytest.approx(0.94)
    assert not depleted


def test_zero_power_unchanged():
    b = Battery.from_soc(1e6, 0.4, 50.0)
    assert discharge(b, 0.0, 10.0) == (b, False)


def test_depletion_clamps():
    b, depleted = discharge(Battery(1000.0, 50.0, 0.0), 100.0, 1.0)
    assert b.level == 0.0 and depleted


def test_invalid_batteries():
    with pytest.raises(ValidationError):
        Battery(0.0, 0.0, 1.0)
    with pytest.raises(ValidationError):
        Battery(1.0, 2.0, 1.0)
    with pytest.raises(ValidationError):
        Battery(1.0, 0.5, -1.0)
    with pytest.raises(ValueError):
        discharge(Battery(1.0, 0.5, 0.0), -1.0, 1.0)


ops = st.lists(
    st.tuples(st.booleans(), st.floats(0, 500), st.floats(1e-3, 1e4)),
    max_size=40,
)


@given(soc=st.floats(0, 1), rate=st.floats(0, 200), seq=ops)
def test_soc_bounded(soc, rate, seq):
    b = Battery.from_soc(1e5, soc, rate)
    for sunlit, power, dt in seq:
        b = charge(b, sunlit, dt)
        b, _ = discharge(b, power, dt)
        assert 0.0 <= b.state_of_charge <= 1.0


@given(n=st.integers(1, 64), dt=st.floats(1.0, 100.0), sunlit=st.booleans())
def test_substeps_additive_without_clamp(n, dt, sunlit):
    b = Battery(1e9, 5e8, 4.0)
    whole, _ = discharge(charge(b, sunlit, dt * n), 2.0, dt * n)
    parts = b
    for _ in range(n):
        parts, _ = discharge(charge(parts, sunlit, dt), 2.0, dt)
    assert parts.level == pytest.approx(whole.level, rel=1e-12)

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satops import astro, comms
from satops.astro import OrbitState
from satops.comms import LinkBudget, SerializationError
from satops.core import Epoch, make_ground_station, make_spacecraft
from satops.power import Battery
from satops.radiation import RadiationConfig
from satops.scenarios.benchmarks import observer_pair
from satops.thermal import ThermalProperties, ThermalState

from oracles import brute_force_windows

PROPS = ThermalProperties(50.0, 1000.0, 1.0, 1.0, 2.0, 2.0, 2.0, 4.0, 0.5)


def _full_actor(t0, name="sat1"):
    sc = make_spacecraft(name, t0, OrbitState(7.1e6, 0.01, 1.2, 0.4, 2.2, 3.3, t0))
    sc.set_thermal_model(ThermalState(281.123456789, PROPS))
    sc.set_battery(Battery(1e6, 123456.789, 50.0))
    sc.set_radiation_model(RadiationConfig(1e-3, 2e-4, 1e-7, 99))
    sc.add_comm_device("isl", 1e6)
    return sc


# --- visibility ---------------------------------------------------------------

def test_zenith_pass_visible(t0):
    gs = make_ground_station("gs", t0, 27.7629, -15.6338, 205.1, 5.0)
    pos = astro.station_position(gs, t0)
    r = math.sqrt(sum(c * c for c in pos))
    ra = math.atan2(pos[1], pos[0])
    dec = math.asin(pos[2] / r)
    # polar orbit with its node at the station's right ascension, advanced to its declination
    orbit = OrbitState(7e6, 0.0, math.pi / 2, ra, 0.0, dec, t0)
    sc = make_spacecraft("sc", t0, orbit)
    assert comms.is_visible(sc, gs, t0)
    assert comms.is_visible(gs, sc, t0)


def test_antipodal_satellites_blocked(t0):
    a = make_spacecraft("a", t0, OrbitState.circular(550e3, 0, 0, 0, t0))
    b = make_spacecraft("b", t0, OrbitState.circular(550e3, 0, 0, 180, t0))
    assert not comms.is_visible(a, b, t0)


def test_ground_pair_unsupported(t0):
    g1 = make_ground_station("g1", t0, 0, 0)
    g2 = make_ground_station("g2", t0, 1, 1)
    with pytest.raises(comms.UnsupportedPairError):
        comms.is_visible(g1, g2, t0)


@settings(max_examples=40, deadline=None)
@given(dt=st.floats(0, 86400), nu=st.floats(0, 360), inc=st.floats(0, 180))
def test_visibility_symmetric(dt, nu, inc):
    t0 = Epoch(7e8)
    a = make_spacecraft("a", t0, OrbitState.circular(550e3, 10, 0, 0, t0))
    b = make_spacecraft("b", t0, OrbitState.circular(800e3, inc, 40, nu, t0))
    gs = make_ground_station("gs", t0, 27.7629, -15.6338, 205.1, 5.0)
    t = t0 + dt
    assert comms.is_visible(a, b, t) == comms.is_visible(b, a, t)
    assert comms.is_visible(a, gs, t) == comms.is_visible(gs, a, t)


# --- windows -----------------------------------------------------------------

def test_colocated_always_visible(t0):
    orbit = OrbitState.circular(550e3, 30, 0, 0, t0)
    a, b = make_spacecraft("a", t0, orbit), make_spacecraft("b", t0, orbit)
    windows = comms.find_windows(a, b, t0, t0 + 7200)
    assert len(windows) == 1
    assert windows[0].start == t0 and windows[0].end == t0 + 7200


def test_windows_match_brute_force_sampling():
    sat, gs = observer_pair()
    t0 = sat.local_time.seconds
    t1 = t0 + 86400.0
    windows = comms.find_windows(sat, gs, t0, t1)
    reference = brute_force_windows(lambda s: comms.is_visible(sat, gs, s), t0, t1, 1.0)
    assert 2 <= len(windows) <= 5
    assert len(windows) == len(reference)
    for w, (first, last) in zip(windows, reference):
        assert abs(w.start.seconds - first) <= 1.0
        assert abs(w.end.seconds - last) <= 1.0
        # overhead passes at 786 km with a 5 deg mask last up to ~12.5 min
        assert 180.0 <= w.duration <= 780.0


def test_window_boundary_properties():
    sat, gs = observer_pair()
    t0 = sat.local_time.seconds
    t1 = t0 + 86400.0
    windows = comms.find_windows(sat, gs, t0, t1)
    for w in windows:
        assert comms.is_visible(sat, gs, w.start.seconds + 0.05)
        assert comms.is_visible(sat, gs, w.end.seconds - 0.05)
        if w.start.seconds - 1 > t0:
            assert not comms.is_visible(sat, gs, w.start.seconds - 1)
        if w.end.seconds + 1 < t1:
            assert not comms.is_visible(sat, gs, w.end.seconds + 1)
    for a, b in zip(windows, windows[1:]):
        assert a.end < b.start


def test_window_requires_ordered_bounds(t0):
    sat, gs = observer_pair()
    with pytest.raises(ValueError):
        comms.find_windows(sat, gs, 10.0, 10.0)


# --- transmission -----------------------------------------------------------

@pytest.mark.parametrize("bits, rate, expected", [(1312, 1e6, 0.001312), (0, 1e6, 0.0), (8e9, 1e6, 8000.0)])
def test_transmission_duration(bits, rate, expected):
    assert comms.transmission_duration(bits, LinkBudget(rate)) == expected


def test_link_budget_positive():
    with pytest.raises(ValueError):
        LinkBudget(0.0)


# --- serialization ------------------------------------------------------------

def test_round_trip_all_models(t0):
    sc = _full_actor(t0)
    sc.radiation_state.cumulative_bitflips = 17
    sc.known_peers = {"sat2", "sat3"}
    back = comms.deserialize_actor(comms.serialize_actor(sc))
    assert comms.actors_equal(sc, back)
    assert back.orbit == sc.orbit
    assert back.thermal == sc.thermal
    assert back.battery == sc.battery
    assert back.radiation == sc.radiation
    assert back.comm_devices == sc.comm_devices
    assert back.known_peers == sc.known_peers
    assert back.local_time == sc.local_time


def test_round_trip_station(t0):
    gs = make_ground_station("maspalomas", t0, 27.7629, -15.6338, 205.1, 5.0)
    back = comms.deserialize_actor(comms.serialize_actor(gs))
    assert back.geodetic_position == gs.geodetic_position
    assert back.minimum_elevation == 5.0


def test_minimal_schema(t0, sat):
    doc = json.loads(comms.serialize_actor(sat))
    assert doc["schema_version"] == 1
    for key in ("thermal", "battery", "radiation", "geodetic", "comm_devices"):
        assert key not in doc
    assert set(doc["orbit"]) >= {"a_m", "e", "i_rad", "raan_rad", "argp_rad", "nu_rad", "epoch_s", "central_body"}


def test_byte_stable(t0):
    assert comms.serialize_actor(_full_actor(t0)) == comms.serialize_actor(_full_actor(t0))


@pytest.mark.parametrize("cut", [1, 10, 50, -1])
def test_truncated_payload_rejected(t0, cut):
    payload = comms.serialize_actor(_full_actor(t0))
    with pytest.raises(SerializationError) as info:
        comms.deserialize_actor(payload[:cut])
    assert info.value.position is not None


def test_unknown_version_rejected(t0, sat):
    doc = json.loads(comms.serialize_actor(sat))
    doc["schema_version"] = 2
    with pytest.raises(SerializationError, match="schema_version"):
        comms.deserialize_actor(json.dumps(doc).encode())


def test_missing_field_rejected(t0, sat):
    doc = json.loads(comms.serialize_actor(sat))
    del doc["orbit"]["a_m"]
    with pytest.raises(SerializationError):
        comms.deserialize_actor(json.dumps(doc).encode())


@settings(max_examples=50)
@given(
    a=st.floats(6.6e6, 4.3e7),
    e=st.floats(0, 0.9),
    ang=st.lists(st.floats(0, 6.28), min_size=4, max_size=4),
    temp=st.floats(0, 1000),
    soc=st.floats(0, 1),
)
def test_round_trip_property(a, e, ang, temp, soc):
    t0 = Epoch(7.2e8 + 0.123)
    sc = make_spacecraft("x", t0, OrbitState(a, e, *ang, t0))
    sc.set_thermal_model(ThermalState(temp, PROPS))
    sc.set_battery(Battery.from_soc(1e5, soc, 10.0))
    back = comms.deserialize_actor(comms.serialize_actor(sc))
    assert comms.actors_equal(sc, back)


# --- peers ---------------------------------------------------------------------

def test_empty_peer_list(t0, sat):
    sat.known_peers = {"old"}
    comms.update_known_peers(sat, [], t0)
    assert sat.known_peers == set()


def test_failed_peer_excluded(t0, sat):
    live1, live2, dead = _full_actor(t0, "p1"), _full_actor(t0, "p2"), _full_actor(t0, "p3")
    dead.radiation_state.failed = True
    payloads = [comms.serialize_actor(p) for p in (live1, live2, dead)]
    comms.update_known_peers(sat, payloads, t0)
    assert sat.known_peers == {"p1", "p2"}


def test_self_in_peer_list_rejected(t0, sat):
    with pytest.raises(ValueError):
        comms.update_known_peers(sat, [comms.serialize_actor(sat)], t0)


def test_peer_visibility_uses_propagated_orbits(t0, sat):
    other = make_spacecraft("p1", t0, OrbitState.circular(550e3, 80, 30, 120, t0))
    comms.update_known_peers(sat, [comms.serialize_actor(other)], t0)
    for dt in range(0, 6000, 300):
        t = t0 + dt
        expected = ["p1"] if comms.is_visible(sat, other, t) else []
        assert comms.available_peers(sat, t) == expected

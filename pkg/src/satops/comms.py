"""Communication windows, link accounting and actor exchange.

Visibility is purely geometric: spacecraft pairs need an unobstructed
segment past the central body sphere, spacecraft/ground pairs need the
spacecraft above the station's minimum elevation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from . import astro
from .core import (
    BODIES,
    Actor,
    ActorKind,
    CentralBody,
    Epoch,
    GeodeticPosition,
    ValidationError,
)
from .power import Battery
from .radiation import RadiationConfig, RadiationState
from .thermal import ThermalProperties, ThermalState

SCHEMA_VERSION = 1

COARSE_STEP_S = 10.0
REFINE_TOL_S = 0.1


class UnsupportedPairError(ValueError):
    pass


class SerializationError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        where = "" if position is None else f" at byte {position}"
        super().__init__(f"{message}{where}")
        self.position = position


@dataclass(frozen=True)
class Window:
    start: Epoch
    end: Epoch
    from_actor: str
    to_actor: str

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError("window must have start < end")

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class LinkBudget:
    data_rate: float  # bits/s

    def __post_init__(self):
        if not self.data_rate > 0:
            raise ValueError("data rate must be positive")


def is_visible(a: Actor, b: Actor, t: Epoch | float, margin: float = 0.0) -> bool:
    seconds = t.seconds if isinstance(t, Epoch) else float(t)
    if a.is_spacecraft and b.is_spacecraft:
        return astro.line_of_sight(
            astro.propagate(a.orbit, seconds).position,
            astro.propagate(b.orbit, seconds).position,
            a.central_body,
            margin,
        )
    if a.is_spacecraft != b.is_spacecraft:
        sc, gs = (a, b) if a.is_spacecraft else (b, a)
        elevation = astro.ground_station_elevation(
            gs, astro.propagate(sc.orbit, seconds).position, seconds
        )
        return elevation >= gs.minimum_elevation
    raise UnsupportedPairError(f"visibility between ground stations {a.id!r} and {b.id!r}")


def find_windows(
    a: Actor,
    b: Actor,
    t0: Epoch | float,
    t1: Epoch | float,
    step: float = COARSE_STEP_S,
    tol: float = REFINE_TOL_S,
    margin: float = 0.0,
) -> list[Window]:
    """Maximal visibility intervals inside [t0, t1].

    A coarse scan at ``step`` seconds is refined by bisection to ``tol``.
    Window bounds are the visible side of each refined bracket. Passes
    shorter than ``step`` can fall between two samples and be missed.
    """
    start_s = t0.seconds if isinstance(t0, Epoch) else float(t0)
    end_s = t1.seconds if isinstance(t1, Epoch) else float(t1)
    if not start_s < end_s:
        raise ValueError("t0 must be before t1")

    def visible(s):
        return is_visible(a, b, s, margin)

    def refine(lo, hi):
        # lo and hi have different visibility; return the visible-side bound
        lo_vis = visible(lo)
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if visible(mid) == lo_vis:
                lo = mid
            else:
                hi = mid
        return lo if lo_vis else hi

    windows = []
    n = max(1, int(-(-(end_s - start_s) // step)))
    times = [min(start_s + k * step, end_s) for k in range(n + 1)]
    prev_t = times[0]
    prev_v = visible(prev_t)
    opened = prev_t if prev_v else None
    for cur_t in times[1:]:
        cur_v = visible(cur_t)
        if cur_v and not prev_v:
            opened = refine(prev_t, cur_t)
        elif prev_v and not cur_v:
            closed = refine(prev_t, cur_t)
            if closed > opened:
                windows.append(Window(Epoch(opened), Epoch(closed), a.id, b.id))
            opened = None
        prev_t, prev_v = cur_t, cur_v
    if prev_v and end_s > opened:
        windows.append(Window(Epoch(opened), Epoch(end_s), a.id, b.id))
    return windows


def transmission_duration(bits: float, link: LinkBudget | float) -> float:
    if bits < 0:
        raise ValueError("bits must be >= 0")
    rate = link.data_rate if isinstance(link, LinkBudget) else float(link)
    if not rate > 0:
        raise ValueError("data rate must be positive")
    return bits / rate


# --- actor exchange ---------------------------------------------------------

def _body_to_dict(body: CentralBody) -> dict:
    return {
        "name": body.name,
        "radius_m": body.radius,
        "mu_m3_s2": body.gravitational_parameter,
        "rotation_rate_rad_s": body.rotation_rate,
        "surface_temperature_K": body.surface_temperature,
        "infrared_emissivity": body.infrared_emissivity,
        "solar_reflectance": body.solar_reflectance,
        "equatorial_radius_m": body.equatorial_radius,
    }


def _body_from(data) -> CentralBody:
    if isinstance(data, str):
        try:
            return BODIES[data]
        except KeyError:
            raise SerializationError(f"unknown central body {data!r}") from None
    return CentralBody(
        name=data["name"],
        radius=data["radius_m"],
        gravitational_parameter=data["mu_m3_s2"],
        rotation_rate=data["rotation_rate_rad_s"],
        surface_temperature=data["surface_temperature_K"],
        infrared_emissivity=data["infrared_emissivity"],
        solar_reflectance=data["solar_reflectance"],
        equatorial_radius=data.get("equatorial_radius_m"),
    )


_THERMAL_FIELDS = (
    "mass",
    "thermal_capacity",
    "solar_absorptance",
    "infrared_absorptance",
    "area_facing_sun",
    "area_facing_albedo",
    "area_facing_body",
    "emissive_area",
    "power_to_heat_ratio",
    "solar_irradiance",
)


def actor_to_dict(actor: Actor) -> dict:
    out: dict = {
        "schema_version": SCHEMA_VERSION,
        "id": actor.id,
        "kind": actor.kind.value,
        "epoch_s": actor.local_time.seconds,
    }
    if actor.orbit is not None:
        o = actor.orbit
        out["orbit"] = {
            "a_m": o.semi_major_axis,
            "e": o.eccentricity,
            "i_rad": o.inclination,
            "raan_rad": o.raan,
            "argp_rad": o.argument_of_periapsis,
            "nu_rad": o.true_anomaly_at_epoch,
            "epoch_s": o.epoch.seconds,
            "central_body": _body_to_dict(o.central_body),
        }
    if actor.geodetic_position is not None:
        g = actor.geodetic_position
        out["geodetic"] = {
            "lat_deg": g.latitude_deg,
            "lon_deg": g.longitude_deg,
            "elev_m": g.elevation_m,
            "min_elev_deg": actor.minimum_elevation,
        }
    if actor.thermal is not None:
        props = actor.thermal.properties
        thermal = {name: getattr(props, name) for name in _THERMAL_FIELDS}
        thermal["temperature_K"] = actor.thermal.temperature
        out["thermal"] = thermal
    if actor.battery is not None:
        b = actor.battery
        out["battery"] = {
            "capacity_j": b.capacity,
            "level_j": b.level,
            "charging_rate_w": b.charging_rate,
        }
    if actor.radiation is not None:
        r = actor.radiation
        state = actor.radiation_state or RadiationState()
        out["radiation"] = {
            "r_d": r.data_corruption_rate,
            "r_i": r.interruption_rate,
            "r_f": r.failure_rate,
            "failed": state.failed,
            "seed": r.rng_seed,
            "bitflips": state.cumulative_bitflips,
        }
    if actor.comm_devices:
        out["comm_devices"] = dict(actor.comm_devices)
    if actor.known_peers:
        out["known_peers"] = sorted(actor.known_peers)
    return out


def actor_from_dict(data: dict) -> Actor:
    from .astro import OrbitState

    if not isinstance(data, dict):
        raise SerializationError("actor document must be a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SerializationError(f"unsupported schema_version {version!r}")
    try:
        actor = Actor(
            id=data["id"],
            kind=ActorKind(data["kind"]),
            local_time=Epoch(float(data["epoch_s"])),
        )
        if "orbit" in data:
            o = data["orbit"]
            actor.orbit = OrbitState(
                o["a_m"],
                o["e"],
                o["i_rad"],
                o["raan_rad"],
                o["argp_rad"],
                o["nu_rad"],
                Epoch(float(o["epoch_s"])),
                _body_from(o["central_body"]),
            )
        if "geodetic" in data:
            g = data["geodetic"]
            actor.geodetic_position = GeodeticPosition(g["lat_deg"], g["lon_deg"], g["elev_m"])
            actor.minimum_elevation = g["min_elev_deg"]
        if "thermal" in data:
            t = data["thermal"]
            props = ThermalProperties(**{name: t[name] for name in _THERMAL_FIELDS})
            actor.thermal = ThermalState(t["temperature_K"], props)
        if "battery" in data:
            b = data["battery"]
            actor.battery = Battery(b["capacity_j"], b["level_j"], b["charging_rate_w"])
        if "radiation" in data:
            r = data["radiation"]
            actor.radiation = RadiationConfig(r["r_d"], r["r_i"], r["r_f"], int(r.get("seed", 0)))
            actor.radiation_state = RadiationState.seeded(actor.radiation.rng_seed, actor.id)
            actor.radiation_state.failed = bool(r["failed"])
            actor.radiation_state.cumulative_bitflips = int(r.get("bitflips", 0))
        for name, rate in data.get("comm_devices", {}).items():
            actor.comm_devices[name] = float(rate)
        actor.known_peers = set(data.get("known_peers", ()))
        actor.validate()
    except SerializationError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializationError(f"invalid actor document: {exc!r}") from exc
    return actor


def serialize_actor(actor: Actor) -> bytes:
    actor.validate()
    return json.dumps(actor_to_dict(actor), separators=(",", ":")).encode("utf-8")


def deserialize_actor(payload: bytes) -> Actor:
    try:
        text = payload.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SerializationError("payload is not UTF-8", exc.start) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(f"malformed actor JSON: {exc.msg}", exc.pos) from exc
    return actor_from_dict(data)


def actors_equal(a: Actor, b: Actor) -> bool:
    """Field-for-field comparison of the exchanged state."""
    return actor_to_dict(a) == actor_to_dict(b)


def update_known_peers(actor: Actor, peers: Iterable[bytes], t: Epoch | float) -> Actor:
    """Replace the actor's peer set with the live peers among ``peers``.

    Failed peers are dropped; the stored snapshots carry full orbits so later
    visibility queries propagate them to the query time.
    """
    seconds = t.seconds if isinstance(t, Epoch) else float(t)
    live = {}
    for payload in peers:
        peer = deserialize_actor(payload)
        if peer.id == actor.id:
            raise ValueError(f"peer list contains the actor itself ({actor.id!r})")
        if peer.local_time.seconds > seconds:
            raise ValueError(f"peer {peer.id!r} is from the future")
        if peer.failed:
            continue
        live[peer.id] = peer
    actor.peers = live
    actor.known_peers = set(live)
    return actor


def available_peers(actor: Actor, t: Epoch | float) -> list[str]:
    """Known peers that are currently visible from ``actor``."""
    return sorted(
        pid for pid, peer in actor.peers.items()
        if not peer.failed and is_visible(actor, peer, t)
    )

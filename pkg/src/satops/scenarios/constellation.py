"""Walker constellation operations with a ground station and a GEO relay.

Each satellite runs in its own simulation instance. Every decision
interval a satellite either processes (high power) or stands by; a
processing run that violates the SoC or temperature limit drops to standby
for the rest of the interval.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .. import astro, comms
from ..astro import OrbitState
from ..core import Actor, Epoch, make_ground_station, make_spacecraft
from ..power import Battery
from ..runtime import Activity, EventLog, Simulation, SimulationConfig, timed_action
from ..thermal import ThermalState
from .config import ScenarioConfig, build_actors, thermal_properties

GEO_RADIUS_M = 42164e3

DEFAULT_THERMAL = {
    "mass_kg": 50.0,
    "thermal_capacity": 1000.0,
    "solar_absorptance": 1.0,
    "infrared_absorptance": 1.0,
    "area_facing_sun_m2": 2.0,
    "area_facing_albedo_m2": 2.0,
    "area_facing_body_m2": 2.0,
    "emissive_area_m2": 4.0,
    "power_to_heat_ratio": 0.5,
    "solar_irradiance": 1360.0,
}

MASPALOMAS = {
    "id": "maspalomas",
    "kind": "ground_station",
    "lat_deg": 27.7629,
    "lon_deg": -15.6338,
    "elev_m": 205.1,
    "min_elev_deg": 5.0,
}

QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass
class ConstellationParams:
    battery_capacity_j: float = 1e6
    soc_range: tuple[float, float] = (0.1, 1.0)
    charging_rate_w: float = 50.0
    initial_temperature_K: float = 273.15
    thermal: dict = field(default_factory=lambda: dict(DEFAULT_THERMAL))
    standby_w: float = 2.0
    processing_w: float = 100.0
    min_soc: float = 0.2
    max_temperature_K: float = 330.0
    decision_interval_s: float = 600.0
    ground_station: dict = field(default_factory=lambda: dict(MASPALOMAS))
    geosat_radius_m: float = GEO_RADIUS_M

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> ConstellationParams:
        params = cls(**{k: v for k, v in config.params.items() if k != "thermal"})
        params.thermal = {**DEFAULT_THERMAL, **config.params.get("thermal", {})}
        params.soc_range = tuple(params.soc_range)
        return params


@dataclass
class ConstellationResult:
    log: EventLog
    times: np.ndarray  # step end times, s since J2000
    soc: np.ndarray  # (steps, satellites)
    temperature: np.ndarray
    eclipse: np.ndarray
    processing: np.ndarray
    los_ground: np.ndarray
    los_geo: np.ndarray
    orbital_period: float
    wall_time_s: float
    satellite_ids: list[str]

    @property
    def no_los(self) -> np.ndarray:
        return ~(self.los_ground | self.los_geo)

    def summary(self) -> dict:
        after_first_rev = self.times - self.times[0] >= self.orbital_period - 1e-9
        soc_after = self.soc[after_first_rev]
        return {
            "satellites": len(self.satellite_ids),
            "steps": int(self.times.size),
            "processing_fraction": float(self.processing.mean()),
            "eclipse_fraction": float(self.eclipse.mean()),
            "no_los_fraction": float(self.no_los.mean()),
            "ground_los_fraction": float(self.los_ground.mean()),
            "geo_los_fraction": float(self.los_geo.mean()),
            "min_soc_after_first_revolution": float(soc_after.min()) if soc_after.size else math.nan,
            "max_soc": float(self.soc.max()),
            "max_temperature_K": float(self.temperature.max()),
            "min_temperature_K": float(self.temperature.min()),
            "wall_time_s": self.wall_time_s,
            "wall_time_per_satellite_s": self.wall_time_s / len(self.satellite_ids),
        }

    def quantile_traces(self, quantiles=QUANTILES) -> dict[str, np.ndarray]:
        return {
            "soc": np.quantile(self.soc, quantiles, axis=1),
            "temperature": np.quantile(self.temperature, quantiles, axis=1),
        }


def make_geosat(station: Actor, epoch: Epoch, radius_m: float = GEO_RADIUS_M) -> Actor:
    """Equatorial geosynchronous relay placed over the station's meridian at ``epoch``."""
    lon = astro.sidereal_angle(epoch) + math.radians(station.geodetic_position.longitude_deg)
    orbit = OrbitState(radius_m, 0.0, 0.0, 0.0, 0.0, lon, epoch, station.central_body)
    return make_spacecraft("geosat", epoch, orbit)


def _copy(actor: Actor) -> Actor:
    return comms.deserialize_actor(comms.serialize_actor(actor))


def run_constellation(config: ScenarioConfig, params: ConstellationParams | None = None) -> ConstellationResult:
    params = params or ConstellationParams.from_config(config)
    epoch, body = config.epoch, config.body
    rng = np.random.default_rng(config.seed)
    satellites = [a for a in build_actors(config) if a.is_spacecraft]
    if not satellites:
        raise ValueError("constellation scenario needs at least one satellite")
    gs = params.ground_station
    station = make_ground_station(
        gs["id"], epoch, gs["lat_deg"], gs["lon_deg"], gs.get("elev_m", 0.0), gs.get("min_elev_deg", 0.0)
    )
    geosat = make_geosat(station, epoch, params.geosat_radius_m)
    props = thermal_properties(params.thermal)
    socs = rng.uniform(params.soc_range[0], params.soc_range[1], size=len(satellites))

    n_steps = int(round(config.duration_s / config.physics_dt))
    n_sats = len(satellites)
    times = np.empty(n_steps)
    arrays = {
        name: np.zeros((n_steps, n_sats), dtype=dtype)
        for name, dtype in (
            ("soc", float), ("temperature", float), ("eclipse", bool),
            ("processing", bool), ("los_ground", bool), ("los_geo", bool),
        )
    }
    sim_config = SimulationConfig(
        physics_dt=config.physics_dt,
        constraint_check_interval=config.constraint_check_interval,
        seed=config.seed,
        log_interval=config.log_interval_s,
    )

    start_wall = time.perf_counter()
    sims = []
    for col, (sat, soc) in enumerate(zip(satellites, socs)):
        sat.set_battery(Battery.from_soc(params.battery_capacity_j, float(soc), params.charging_rate_w))
        sat.set_thermal_model(ThermalState(params.initial_temperature_K, props))
        sim = Simulation(sim_config, [sat, _copy(station), _copy(geosat)])
        sim.logged_actors = {sat.id}
        sim.watch_visibility(sat, station.id)
        sim.watch_visibility(sat, geosat.id)
        sim.step_hooks.append(_recorder(sat.id, station.id, geosat.id, col, times, arrays, epoch, config.physics_dt))

        def limits_ok(actor, p=params):
            return actor.state_of_charge >= p.min_soc and actor.temperature <= p.max_temperature_K

        sim.register_activity(sat, Activity("processing", params.processing_w, timed_action(0.0), limits_ok))
        sim.register_activity(sat, Activity("standby", params.standby_w, timed_action(0.0)))
        sims.append((sim, sat))

    elapsed = 0.0
    while elapsed < config.duration_s - 1e-9:
        length = min(params.decision_interval_s, config.duration_s - elapsed)
        for sim, sat in sims:
            _run_interval(sim, sat, length, params)
        elapsed += length
    wall = time.perf_counter() - start_wall

    log = EventLog.merge(sim.log for sim, _ in sims)
    return ConstellationResult(
        log=log,
        times=times,
        orbital_period=satellites[0].orbit.period,
        wall_time_s=wall,
        satellite_ids=[s.id for s in satellites],
        **arrays,
    )


def _run_interval(sim: Simulation, sat: Actor, length: float, params: ConstellationParams):
    acts = sim.activities[sat.id]
    remaining = length
    if sat.state_of_charge >= params.min_soc and sat.temperature <= params.max_temperature_K:
        acts["processing"].action = timed_action(length)
        sim.perform_activity(sat, "processing")
        remaining = length - sim.last_report.elapsed
    if remaining > 1e-9:
        acts["standby"].action = timed_action(remaining)
        sim.perform_activity(sat, "standby")


def _recorder(sat_id, gs_id, geo_id, col, times, arrays, epoch, dt):
    soc, temp, ecl = arrays["soc"], arrays["temperature"], arrays["eclipse"]
    proc, los_g, los_geo = arrays["processing"], arrays["los_ground"], arrays["los_geo"]
    t0 = epoch.seconds

    def hook(sim, actor, t, sunlit, step_dt):
        if actor.id != sat_id:
            return
        row = int(round((t - t0) / dt)) - 1
        if row >= len(times):
            return
        times[row] = t
        soc[row, col] = actor.state_of_charge
        temp[row, col] = actor.temperature
        ecl[row, col] = not sunlit
        proc[row, col] = actor.current_activity == "processing"
        los_g[row, col] = bool(sim.link_state(sat_id, gs_id))
        los_geo[row, col] = bool(sim.link_state(sat_id, geo_id))

    return hook

"""Scenario configuration files (JSON) and actor construction."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ..astro import OrbitState
from ..core import (
    EARTH,
    Actor,
    CentralBody,
    Epoch,
    ValidationError,
    make_ground_station,
    make_spacecraft,
)
from ..power import Battery
from ..radiation import RadiationConfig
from ..thermal import ThermalProperties, ThermalState

KINDS = ("overhead", "constellation", "fedavg", "custom")


class ConfigError(ValueError):
    pass


@dataclass
class WalkerConfig:
    total_satellites: int
    planes: int
    altitude_m: float
    inclination_deg: float

    def __post_init__(self):
        if self.planes <= 0 or self.total_satellites <= 0:
            raise ConfigError("Walker sizes must be positive")
        if self.total_satellites % self.planes:
            raise ConfigError(
                f"{self.total_satellites} satellites cannot be split evenly into {self.planes} planes"
            )


@dataclass
class ScenarioConfig:
    kind: str
    duration_s: float
    start_epoch: str = "2022-10-27T12:30:00Z"
    physics_dt: float = 1.0
    constraint_check_interval: float = 1.0
    seed: int = 0
    log_path: str | None = None
    log_interval_s: float | None = 60.0
    central_body: dict = field(default_factory=dict)
    walker: WalkerConfig | None = None
    actors: list[dict] = field(default_factory=list)
    # model parameters per actor class and scenario-specific settings
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}; expected one of {KINDS}")
        if not self.duration_s > 0:
            raise ConfigError("duration_s must be positive")
        if isinstance(self.walker, dict):
            self.walker = WalkerConfig(**self.walker)

    @property
    def epoch(self) -> Epoch:
        return Epoch.from_iso(self.start_epoch)

    @property
    def body(self) -> CentralBody:
        if not self.central_body:
            return EARTH
        merged = {f.name: getattr(EARTH, f.name) for f in fields(CentralBody)}
        merged.update(self.central_body)
        try:
            return CentralBody(**merged)
        except TypeError as exc:
            raise ConfigError(f"bad central_body block: {exc}") from exc

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(data, source=str(path))


def config_from_dict(data: dict, source: str = "<dict>") -> ScenarioConfig:
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{source}: unknown keys {sorted(unknown)}")
    try:
        return ScenarioConfig(**data)
    except TypeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def thermal_properties(params: dict) -> ThermalProperties:
    return ThermalProperties(
        mass=params["mass_kg"],
        thermal_capacity=params["thermal_capacity"],
        solar_absorptance=params["solar_absorptance"],
        infrared_absorptance=params["infrared_absorptance"],
        area_facing_sun=params["area_facing_sun_m2"],
        area_facing_albedo=params["area_facing_albedo_m2"],
        area_facing_body=params["area_facing_body_m2"],
        emissive_area=params["emissive_area_m2"],
        power_to_heat_ratio=params["power_to_heat_ratio"],
        solar_irradiance=params.get("solar_irradiance", 1360.0),
    )


def orbit_from_dict(data: dict, epoch: Epoch, body: CentralBody) -> OrbitState:
    if "a_m" in data:
        a = data["a_m"]
    elif "altitude_m" in data:
        a = body.equatorial_radius + data["altitude_m"]
    else:
        raise ConfigError("orbit needs a_m or altitude_m")
    return OrbitState(
        a,
        data.get("e", 0.0),
        math.radians(data.get("i_deg", 0.0)),
        math.radians(data.get("raan_deg", 0.0)),
        math.radians(data.get("argp_deg", 0.0)),
        math.radians(data.get("nu_deg", 0.0)),
        epoch,
        body,
    )


def actor_from_definition(defn: dict, epoch: Epoch, body: CentralBody, seed: int = 0) -> Actor:
    """Build an actor from a config-file definition."""
    try:
        kind = defn.get("kind", "spacecraft")
        if kind == "ground_station":
            return make_ground_station(
                defn["id"],
                epoch,
                defn["lat_deg"],
                defn["lon_deg"],
                defn.get("elev_m", 0.0),
                defn.get("min_elev_deg", 0.0),
            )
        if kind != "spacecraft":
            raise ConfigError(f"unknown actor kind {kind!r}")
        actor = make_spacecraft(defn["id"], epoch, orbit_from_dict(defn["orbit"], epoch, body))
        if "battery" in defn:
            b = defn["battery"]
            actor.set_battery(Battery.from_soc(b["capacity_j"], b.get("soc", 1.0), b["charging_rate_w"]))
        if "thermal" in defn:
            t = defn["thermal"]
            actor.set_thermal_model(ThermalState(t.get("initial_temperature_K", 273.15), thermal_properties(t)))
        if "radiation" in defn:
            r = defn["radiation"]
            actor.set_radiation_model(
                RadiationConfig(r.get("r_d", 0.0), r.get("r_i", 0.0), r.get("r_f", 0.0), seed)
            )
        for name, rate in defn.get("comm_devices", {}).items():
            actor.add_comm_device(name, rate)
        return actor
    except KeyError as exc:
        raise ConfigError(f"actor definition {defn.get('id', '?')!r} is missing {exc}") from exc
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def build_actors(config: ScenarioConfig) -> list[Actor]:
    """All actors named by a config, including generated Walker satellites."""
    from .walker import walker_actor_ids, generate_walker

    epoch, body = config.epoch, config.body
    actors = [actor_from_definition(d, epoch, body, config.seed) for d in config.actors]
    if config.walker is not None:
        w = config.walker
        orbits = generate_walker(w.total_satellites, w.planes, w.altitude_m, w.inclination_deg, body, epoch)
        for sat_id, orbit in zip(walker_actor_ids(w.total_satellites, w.planes), orbits):
            actors.append(make_spacecraft(sat_id, epoch, orbit))
    ids = [a.id for a in actors]
    if len(ids) != len(set(ids)):
        raise ConfigError("duplicate actor ids in config")
    return actors

"""Shared domain types: central bodies, epochs and actors.

Time is kept as seconds since J2000 (2000-01-01T12:00:00 TT) in double
precision. All positions are in the inertial equatorial frame of the
actor's central body.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .astro import OrbitState
    from .power import Battery
    from .radiation import RadiationConfig, RadiationState
    from .thermal import ThermalState

SIDEREAL_DAY_S = 86164.0905

_J2000 = datetime(2000, 1, 1, 12, 0, 0, tzinfo=timezone.utc)


class ValidationError(ValueError):
    """Raised when a model parameter or actor definition is invalid."""


@dataclass(frozen=True)
class CentralBody:
    name: str
    radius: float  # m
    gravitational_parameter: float  # m^3/s^2
    rotation_rate: float = 0.0  # rad/s
    surface_temperature: float = 0.0  # K
    infrared_emissivity: float = 0.0
    solar_reflectance: float = 0.0
    # reference for altitudes; defaults to ``radius``
    equatorial_radius: float | None = None

    def __post_init__(self):
        if self.equatorial_radius is None:
            object.__setattr__(self, "equatorial_radius", self.radius)
        if not self.radius > 0:
            raise ValidationError(f"body radius must be positive, got {self.radius}")
        if not self.gravitational_parameter > 0:
            raise ValidationError("gravitational parameter must be positive")
        if not 0.0 <= self.infrared_emissivity <= 1.0:
            raise ValidationError("infrared_emissivity must lie in [0, 1]")
        if not 0.0 <= self.solar_reflectance <= 1.0:
            raise ValidationError("solar_reflectance must lie in [0, 1]")
        if self.surface_temperature < 0:
            raise ValidationError("surface_temperature must be >= 0 K")


# Rotation rate is 2*pi per sidereal day so station geometry repeats exactly.
EARTH = CentralBody(
    name="earth",
    radius=6371000.0,
    gravitational_parameter=3.986004418e14,
    rotation_rate=2.0 * math.pi / SIDEREAL_DAY_S,
    surface_temperature=288.0,
    infrared_emissivity=0.6,
    solar_reflectance=0.3,
    equatorial_radius=6378137.0,
)

BODIES = {"earth": EARTH}


@dataclass(frozen=True, order=True)
class Epoch:
    """A point in time, seconds since J2000."""

    seconds: float

    def __add__(self, dt: float) -> Epoch:
        return Epoch(self.seconds + float(dt))

    def __sub__(self, other):
        if isinstance(other, Epoch):
            return self.seconds - other.seconds
        return Epoch(self.seconds - float(other))

    @classmethod
    def from_datetime(cls, when: datetime) -> Epoch:
        """Convert a datetime (naive values are taken as UTC).

        The TT-UTC offset is ignored; the difference is about a minute and
        immaterial for the low-precision models used here.
        """
        if when.tzinfo is None:
            when = when.replace(tzinfo=timezone.utc)
        return cls((when - _J2000).total_seconds())

    @classmethod
    def from_iso(cls, text: str) -> Epoch:
        return cls.from_datetime(datetime.fromisoformat(text.replace("Z", "+00:00")))

    def to_datetime(self) -> datetime:
        from datetime import timedelta

        return _J2000 + timedelta(seconds=self.seconds)


J2000 = Epoch(0.0)


class ActorKind(str, Enum):
    SPACECRAFT = "spacecraft"
    GROUND_STATION = "ground_station"


@dataclass(frozen=True)
class GeodeticPosition:
    latitude_deg: float
    longitude_deg: float
    elevation_m: float = 0.0


@dataclass(eq=False)
class Actor:
    """A spacecraft or ground station with optional physical models.

    Models are attached after construction with the ``set_*`` methods,
    which enforce the kind-specific invariants.
    """

    id: str
    kind: ActorKind
    local_time: Epoch
    orbit: OrbitState | None = None
    geodetic_position: GeodeticPosition | None = None
    minimum_elevation: float = 0.0
    thermal: ThermalState | None = None
    battery: Battery | None = None
    radiation: RadiationConfig | None = None
    radiation_state: RadiationState | None = None
    comm_devices: dict[str, float] = field(default_factory=dict)
    known_peers: set[str] = field(default_factory=set)
    # latest peer snapshots by id, filled by comms.update_known_peers
    peers: dict[str, Actor] = field(default_factory=dict, repr=False)
    current_activity: str | None = None

    @property
    def is_spacecraft(self) -> bool:
        return self.kind is ActorKind.SPACECRAFT

    @property
    def central_body(self) -> CentralBody:
        if self.orbit is not None:
            return self.orbit.central_body
        return EARTH

    def set_geodetic_position(self, latitude_deg, longitude_deg, elevation_m=0.0):
        if self.is_spacecraft:
            raise ValidationError(f"{self.id}: spacecraft cannot have a geodetic position")
        _check_coordinates(latitude_deg, longitude_deg)
        self.geodetic_position = GeodeticPosition(
            float(latitude_deg), float(longitude_deg), float(elevation_m)
        )

    def set_orbit(self, orbit: OrbitState):
        if not self.is_spacecraft:
            raise ValidationError(f"{self.id}: ground stations do not have orbits")
        self.orbit = orbit

    def set_thermal_model(self, thermal: ThermalState):
        self._require_spacecraft("thermal")
        self.thermal = thermal

    def set_battery(self, battery: Battery):
        self._require_spacecraft("battery")
        self.battery = battery

    def set_radiation_model(self, config: RadiationConfig, seed: int | None = None):
        from .radiation import RadiationState

        self._require_spacecraft("radiation")
        self.radiation = config
        self.radiation_state = RadiationState.seeded(
            config.rng_seed if seed is None else seed, self.id
        )

    def add_comm_device(self, name: str, data_rate: float):
        if not data_rate > 0:
            raise ValidationError(f"{self.id}: data rate of {name!r} must be > 0")
        self.comm_devices[name] = float(data_rate)

    @property
    def state_of_charge(self) -> float | None:
        return None if self.battery is None else self.battery.state_of_charge

    @property
    def temperature(self) -> float | None:
        return None if self.thermal is None else self.thermal.temperature

    @property
    def failed(self) -> bool:
        return self.radiation_state is not None and self.radiation_state.failed

    def advance_clock(self, dt: float):
        if dt < 0:
            raise ValueError("local time cannot move backwards")
        self.local_time = self.local_time + dt

    def validate(self):
        if self.is_spacecraft:
            if self.orbit is None or self.geodetic_position is not None:
                raise ValidationError(f"{self.id}: spacecraft needs an orbit and no geodetic position")
        else:
            if self.geodetic_position is None or self.orbit is not None:
                raise ValidationError(f"{self.id}: ground station needs a geodetic position and no orbit")
            if self.thermal or self.battery or self.radiation:
                raise ValidationError(f"{self.id}: ground stations carry no physical models")
        for name, rate in self.comm_devices.items():
            if not rate > 0:
                raise ValidationError(f"{self.id}: data rate of {name!r} must be > 0")

    def _require_spacecraft(self, what):
        if not self.is_spacecraft:
            raise ValidationError(f"{self.id}: ground stations cannot carry a {what} model")


def _check_coordinates(latitude_deg, longitude_deg):
    if not -90.0 <= latitude_deg <= 90.0:
        raise ValidationError(f"latitude {latitude_deg} outside [-90, 90]")
    if not -180.0 <= longitude_deg <= 180.0:
        raise ValidationError(f"longitude {longitude_deg} outside [-180, 180]")


def make_spacecraft(id: str, epoch: Epoch, orbit: OrbitState) -> Actor:
    if not id:
        raise ValidationError("actor id must be nonempty")
    actor = Actor(id=id, kind=ActorKind.SPACECRAFT, local_time=epoch, orbit=orbit)
    actor.validate()
    return actor


def make_ground_station(
    id: str,
    epoch: Epoch,
    latitude_deg: float,
    longitude_deg: float,
    elevation_m: float = 0.0,
    minimum_elevation_deg: float = 0.0,
) -> Actor:
    if not id:
        raise ValidationError("actor id must be nonempty")
    _check_coordinates(latitude_deg, longitude_deg)
    actor = Actor(
        id=id,
        kind=ActorKind.GROUND_STATION,
        local_time=epoch,
        geodetic_position=GeodeticPosition(
            float(latitude_deg), float(longitude_deg), float(elevation_m)
        ),
        minimum_elevation=float(minimum_elevation_deg),
    )
    return actor

"""Two-body propagation, analytic Sun ephemeris and visibility geometry.

Vectors are plain 3-tuples of floats in metres (or m/s). Everything here is
a pure function of its arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .core import EARTH, Actor, CentralBody, Epoch, ValidationError

TWO_PI = 2.0 * math.pi
AU_M = 1.495978707e11

KEPLER_TOL = 1e-12
KEPLER_MAX_ITER = 50

# WGS84 ellipsoid, used only for ground station placement
WGS84_A = 6378137.0
WGS84_F = 1.0 / 298.257223563
WGS84_E2 = WGS84_F * (2.0 - WGS84_F)

# mean sidereal angle of the prime meridian at J2000
GMST_J2000_DEG = 280.46061837


class KeplerConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class StateVector:
    position: tuple[float, float, float]
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def radius(self) -> float:
        return _norm(self.position)


@dataclass(frozen=True)
class OrbitState:
    """Keplerian elements (SI units, radians) at a reference epoch."""

    semi_major_axis: float
    eccentricity: float
    inclination: float
    raan: float
    argument_of_periapsis: float
    true_anomaly_at_epoch: float
    epoch: Epoch
    central_body: CentralBody = EARTH

    def __post_init__(self):
        if not self.semi_major_axis > 0:
            raise ValidationError(f"semi-major axis must be positive, got {self.semi_major_axis}")
        if not 0.0 <= self.eccentricity < 1.0:
            raise ValidationError(f"only elliptical orbits are supported (e={self.eccentricity})")
        for name in ("inclination", "raan", "argument_of_periapsis", "true_anomaly_at_epoch"):
            object.__setattr__(self, name, float(getattr(self, name)) % TWO_PI)

    @classmethod
    def circular(cls, altitude_m, inclination_deg, raan_deg, anomaly_deg, epoch, body=EARTH):
        return cls(
            body.equatorial_radius + altitude_m,
            0.0,
            math.radians(inclination_deg),
            math.radians(raan_deg),
            0.0,
            math.radians(anomaly_deg),
            epoch,
            body,
        )

    @property
    def period(self) -> float:
        return TWO_PI * math.sqrt(self.semi_major_axis**3 / self.central_body.gravitational_parameter)

    @cached_property
    def mean_motion(self) -> float:
        return math.sqrt(self.central_body.gravitational_parameter / self.semi_major_axis**3)

    @cached_property
    def mean_anomaly_at_epoch(self) -> float:
        e, nu = self.eccentricity, self.true_anomaly_at_epoch
        ecc_anom = math.atan2(math.sqrt(1.0 - e * e) * math.sin(nu), e + math.cos(nu))
        return ecc_anom - e * math.sin(ecc_anom)

    @cached_property
    def _frame(self):
        # perifocal P and Q axes expressed in the inertial frame
        co, so = math.cos(self.raan), math.sin(self.raan)
        cw, sw = math.cos(self.argument_of_periapsis), math.sin(self.argument_of_periapsis)
        ci, si = math.cos(self.inclination), math.sin(self.inclination)
        p = (co * cw - so * sw * ci, so * cw + co * sw * ci, sw * si)
        q = (-co * sw - so * cw * ci, -so * sw + co * cw * ci, cw * si)
        return p, q

    @property
    def specific_energy(self) -> float:
        return -self.central_body.gravitational_parameter / (2.0 * self.semi_major_axis)

    @property
    def angular_momentum(self) -> float:
        return math.sqrt(
            self.central_body.gravitational_parameter
            * self.semi_major_axis
            * (1.0 - self.eccentricity**2)
        )


def solve_kepler(mean_anomaly: float, e: float) -> float:
    """Eccentric anomaly for ``M = E - e sin E`` by Newton-Raphson."""
    m = math.fmod(mean_anomaly, TWO_PI)
    if m < 0:
        m += TWO_PI
    if e == 0.0:
        return m
    ecc = m if e < 0.8 else math.pi
    for _ in range(KEPLER_MAX_ITER):
        step = (ecc - e * math.sin(ecc) - m) / (1.0 - e * math.cos(ecc))
        ecc -= step
        if abs(step) < KEPLER_TOL:
            return ecc
    raise KeplerConvergenceError(
        f"Kepler solver did not converge in {KEPLER_MAX_ITER} iterations "
        f"(M={mean_anomaly!r}, e={e!r}, last step={step!r})"
    )


def propagate(orbit: OrbitState, t: Epoch | float) -> StateVector:
    """Exact two-body state of ``orbit`` at time ``t``."""
    seconds = t.seconds if isinstance(t, Epoch) else t
    dt = seconds - orbit.epoch.seconds
    a, e = orbit.semi_major_axis, orbit.eccentricity
    mu = orbit.central_body.gravitational_parameter
    ecc = solve_kepler(orbit.mean_anomaly_at_epoch + orbit.mean_motion * dt, e)
    cos_e, sin_e = math.cos(ecc), math.sin(ecc)
    root = math.sqrt(1.0 - e * e)
    x = a * (cos_e - e)
    y = a * root * sin_e
    r = a * (1.0 - e * cos_e)
    k = math.sqrt(mu * a) / r
    vx = -k * sin_e
    vy = k * root * cos_e
    p, q = orbit._frame
    return StateVector(
        (x * p[0] + y * q[0], x * p[1] + y * q[1], x * p[2] + y * q[2]),
        (vx * p[0] + vy * q[0], vx * p[1] + vy * q[1], vx * p[2] + vy * q[2]),
    )


def sun_position_xyz(seconds: float) -> tuple[float, float, float]:
    # low-precision solar coordinates from mean elements
    t = seconds / (86400.0 * 36525.0)
    mean_lon = math.radians((280.46646 + 36000.76983 * t + 0.0003032 * t * t) % 360.0)
    mean_anom = math.radians((357.52911 + 35999.05029 * t - 0.0001537 * t * t) % 360.0)
    ecc = 0.016708634 - 0.000042037 * t - 0.0000001267 * t * t
    center = math.radians(
        (1.914602 - 0.004817 * t - 0.000014 * t * t) * math.sin(mean_anom)
        + (0.019993 - 0.000101 * t) * math.sin(2.0 * mean_anom)
        + 0.000289 * math.sin(3.0 * mean_anom)
    )
    true_lon = mean_lon + center
    true_anom = mean_anom + center
    dist = 1.000001018 * (1.0 - ecc * ecc) / (1.0 + ecc * math.cos(true_anom)) * AU_M
    obliquity = math.radians(23.439291 - 0.0130042 * t)
    cl, sl = math.cos(true_lon), math.sin(true_lon)
    return (
        dist * cl,
        dist * sl * math.cos(obliquity),
        dist * sl * math.sin(obliquity),
    )


def sun_position(t: Epoch | float) -> StateVector:
    """Geocentric Sun position (m) in the equatorial frame of J2000."""
    seconds = t.seconds if isinstance(t, Epoch) else t
    pos = sun_position_xyz(seconds)
    before = sun_position_xyz(seconds - 60.0)
    after = sun_position_xyz(seconds + 60.0)
    vel = tuple((b - a) / 120.0 for a, b in zip(before, after))
    return StateVector(pos, vel)


def is_in_eclipse(sc_position, sun, body: CentralBody = EARTH) -> bool:
    """Cylindrical umbra test: behind the body and within its radius of the Sun axis."""
    r = _xyz(sc_position)
    s = _xyz(sun)
    s_norm = _norm(s)
    ux, uy, uz = s[0] / s_norm, s[1] / s_norm, s[2] / s_norm
    along = r[0] * ux + r[1] * uy + r[2] * uz
    if along >= 0.0:
        return False
    perp2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2] - along * along
    return perp2 < body.radius * body.radius


def line_of_sight(p1, p2, body: CentralBody = EARTH, margin: float = 0.0) -> bool:
    """True iff the segment p1-p2 clears the body sphere (radius + margin)."""
    a = _xyz(p1)
    b = _xyz(p2)
    dx, dy, dz = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    dd = dx * dx + dy * dy + dz * dz
    if dd == 0.0:
        s = 0.0
    else:
        s = -(a[0] * dx + a[1] * dy + a[2] * dz) / dd
        s = 0.0 if s < 0.0 else (1.0 if s > 1.0 else s)
    cx, cy, cz = a[0] + s * dx, a[1] + s * dy, a[2] + s * dz
    radius = body.radius + margin
    return cx * cx + cy * cy + cz * cz >= radius * radius


def geodetic_to_ecef(latitude_deg, longitude_deg, elevation_m=0.0):
    lat = math.radians(latitude_deg)
    lon = math.radians(longitude_deg)
    sl = math.sin(lat)
    n = WGS84_A / math.sqrt(1.0 - WGS84_E2 * sl * sl)
    return (
        (n + elevation_m) * math.cos(lat) * math.cos(lon),
        (n + elevation_m) * math.cos(lat) * math.sin(lon),
        (n * (1.0 - WGS84_E2) + elevation_m) * sl,
    )


def sidereal_angle(t: Epoch | float, body: CentralBody = EARTH) -> float:
    seconds = t.seconds if isinstance(t, Epoch) else t
    return (math.radians(GMST_J2000_DEG) + body.rotation_rate * seconds) % TWO_PI


def _station_frame(station: Actor, seconds: float):
    geo = station.geodetic_position
    if geo is None:
        raise ValidationError(f"{station.id} is not a ground station")
    theta = sidereal_angle(seconds, station.central_body)
    ct, st = math.cos(theta), math.sin(theta)
    x, y, z = geodetic_to_ecef(geo.latitude_deg, geo.longitude_deg, geo.elevation_m)
    pos = (ct * x - st * y, st * x + ct * y, z)
    lat = math.radians(geo.latitude_deg)
    lon = math.radians(geo.longitude_deg) + theta
    zenith = (math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat))
    return pos, zenith


def station_position(station: Actor, t: Epoch | float) -> tuple[float, float, float]:
    """Inertial position of a ground station, rotating with its body."""
    seconds = t.seconds if isinstance(t, Epoch) else t
    return _station_frame(station, seconds)[0]


def ground_station_elevation(station: Actor, sc_position, t: Epoch | float) -> float:
    """Elevation (deg) of a spacecraft above the station's geodetic horizon."""
    seconds = t.seconds if isinstance(t, Epoch) else t
    pos, zenith = _station_frame(station, seconds)
    r = _xyz(sc_position)
    v = (r[0] - pos[0], r[1] - pos[1], r[2] - pos[2])
    dist = _norm(v)
    if dist == 0.0:
        return 90.0
    s = (v[0] * zenith[0] + v[1] * zenith[1] + v[2] * zenith[2]) / dist
    return math.degrees(math.asin(max(-1.0, min(1.0, s))))


def position_at(actor: Actor, t: Epoch | float) -> tuple[float, float, float]:
    if actor.orbit is not None:
        return propagate(actor.orbit, t).position
    return station_position(actor, t)


def _xyz(v):
    if isinstance(v, StateVector):
        return v.position
    return v


def _norm(v) -> float:
    return math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])

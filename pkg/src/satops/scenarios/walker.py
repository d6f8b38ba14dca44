"""Walker constellation layout."""
from __future__ import annotations

import math

from ..astro import OrbitState
from ..core import EARTH, CentralBody, Epoch, J2000, ValidationError


def generate_walker(
    total: int,
    planes: int,
    altitude_m: float,
    inclination_deg: float,
    body: CentralBody = EARTH,
    epoch: Epoch = J2000,
) -> list[OrbitState]:
    """Circular orbits: planes evenly spread in RAAN, satellites evenly phased per plane.

    Ordered plane by plane. Altitude is measured from the body's equatorial
    radius.
    """
    if planes <= 0 or total <= 0:
        raise ValidationError("total and planes must be positive")
    if total % planes:
        raise ValidationError(f"{total} satellites cannot be split evenly into {planes} planes")
    per_plane = total // planes
    a = body.equatorial_radius + altitude_m
    inc = math.radians(inclination_deg)
    orbits = []
    for p in range(planes):
        raan = 2.0 * math.pi * p / planes
        for s in range(per_plane):
            nu = 2.0 * math.pi * s / per_plane
            orbits.append(OrbitState(a, 0.0, inc, raan, 0.0, nu, epoch, body))
    return orbits


def walker_actor_ids(total: int, planes: int) -> list[str]:
    per_plane = total // planes
    return [f"sat_p{p}_s{s}" for p in range(planes) for s in range(per_plane)]

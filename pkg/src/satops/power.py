"""Constant-rate battery accounting."""
from __future__ import annotations

from dataclasses import dataclass

from .core import ValidationError


@dataclass(frozen=True)
class Battery:
    capacity: float  # J
    level: float  # J
    charging_rate: float  # W, only while sunlit

    def __post_init__(self):
        if not self.capacity > 0:
            raise ValidationError("battery capacity must be positive")
        if self.charging_rate < 0:
            raise ValidationError("charging rate must be >= 0")
        if not 0.0 <= self.level <= self.capacity:
            raise ValidationError(f"battery level {self.level} outside [0, {self.capacity}]")

    @classmethod
    def from_soc(cls, capacity, state_of_charge, charging_rate):
        return cls(float(capacity), float(capacity) * float(state_of_charge), float(charging_rate))

    @property
    def state_of_charge(self) -> float:
        return self.level / self.capacity


def charge(battery: Battery, sunlit: bool, dt: float) -> Battery:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not sunlit or battery.charging_rate == 0.0:
        return battery
    level = min(battery.capacity, battery.level + battery.charging_rate * dt)
    return Battery(battery.capacity, level, battery.charging_rate)


def discharge(battery: Battery, activity_power: float, dt: float) -> tuple[Battery, bool]:
    """Draw ``activity_power`` for ``dt``; the flag is set when the level hit zero."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if activity_power < 0:
        raise ValueError("activity power must be >= 0")
    if activity_power == 0.0:
        return battery, False
    level = battery.level - activity_power * dt
    depleted = level < 0.0
    return Battery(battery.capacity, max(0.0, level), battery.charging_rate), depleted

"""Single-node spacecraft temperature model.

The spacecraft is one isothermal mass exchanging heat with the Sun, the
central body (albedo and infrared) and deep space, plus the share of
activity power that ends up as heat. Integration is explicit Euler.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

from .core import CentralBody, ValidationError

STEFAN_BOLTZMANN = 5.670374419e-8  # W m^-2 K^-4

# back-scattered fraction used in place of a Sun/body/spacecraft view factor
ALBEDO_FACTOR = 0.5


@dataclass(frozen=True)
class ThermalProperties:
    mass: float  # kg
    thermal_capacity: float  # J kg^-1 K^-1
    solar_absorptance: float
    infrared_absorptance: float
    area_facing_sun: float  # m^2
    area_facing_albedo: float
    area_facing_body: float
    emissive_area: float
    power_to_heat_ratio: float
    solar_irradiance: float = 1360.0  # W m^-2

    def __post_init__(self):
        if not self.mass > 0 or not self.thermal_capacity > 0:
            raise ValidationError("mass and thermal capacity must be positive")
        for name in ("area_facing_sun", "area_facing_albedo", "area_facing_body", "emissive_area"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        for name in ("solar_absorptance", "infrared_absorptance", "power_to_heat_ratio"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1]")
        if self.solar_irradiance < 0:
            raise ValidationError("solar irradiance must be >= 0")

    @property
    def heat_capacity(self) -> float:
        return self.mass * self.thermal_capacity


@dataclass(frozen=True)
class ThermalState:
    temperature: float  # K
    properties: ThermalProperties

    def __post_init__(self):
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0 K")


class HeatFluxes(NamedTuple):
    solar: float
    albedo: float
    infrared: float
    activity: float
    dissipation: float

    @property
    def net(self) -> float:
        return self.solar + self.albedo + self.infrared + self.activity - self.dissipation


def heat_fluxes(
    state: ThermalState,
    sunlit: bool,
    distance_to_body_center: float,
    activity_power: float,
    body: CentralBody,
) -> HeatFluxes:
    p = state.properties
    if sunlit:
        solar = p.solar_absorptance * p.solar_irradiance * p.area_facing_sun
        albedo = (
            ALBEDO_FACTOR
            * p.solar_absorptance
            * body.solar_reflectance
            * p.solar_irradiance
            * p.area_facing_albedo
        )
    else:
        solar = albedo = 0.0
    infrared = (
        body.radius**2
        * p.infrared_absorptance
        * body.infrared_emissivity
        * STEFAN_BOLTZMANN
        * body.surface_temperature**4
        * p.area_facing_body
        / distance_to_body_center**2
    )
    activity = p.power_to_heat_ratio * activity_power
    # spacecraft surface emissivity, not the body's
    dissipation = p.infrared_absorptance * p.emissive_area * STEFAN_BOLTZMANN * state.temperature**4
    return HeatFluxes(solar, albedo, infrared, activity, dissipation)


def step_temperature(state: ThermalState, fluxes: HeatFluxes, dt: float) -> ThermalState:
    if not dt > 0:
        raise ValueError("dt must be positive")
    temperature = state.temperature + dt * fluxes.net / state.properties.heat_capacity
    return replace(state, temperature=max(0.0, temperature))


def equilibrium_temperature(absorbed_power: float, properties: ThermalProperties) -> float:
    """Radiative equilibrium for a constant absorbed power (W)."""
    return (
        absorbed_power
        / (properties.infrared_absorptance * properties.emissive_area * STEFAN_BOLTZMANN)
    ) ** 0.25

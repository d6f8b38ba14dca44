"""Generic scenario: propagate the configured actors and log their state."""
from __future__ import annotations

from itertools import combinations

from ..runtime import EventLog, Simulation, SimulationConfig
from .config import ScenarioConfig, build_actors


def run_custom(config: ScenarioConfig) -> tuple[EventLog, dict]:
    actors = build_actors(config)
    sim = Simulation(
        SimulationConfig(
            physics_dt=config.physics_dt,
            constraint_check_interval=config.constraint_check_interval,
            seed=config.seed,
            log_interval=config.log_interval_s,
        ),
        actors,
    )
    for a, b in combinations(actors, 2):
        if a.is_spacecraft or b.is_spacecraft:
            sc, other = (a, b) if a.is_spacecraft else (b, a)
            sim.watch_visibility(sc, other)
    sim.advance_time(config.duration_s)
    sim.snapshot()
    opens = sim.log.of_kind("window_open")
    summary = {
        "duration_s": config.duration_s,
        "actors": len(actors),
        "window_opens": len(opens),
        "final": {
            a.id: {"state_of_charge": a.state_of_charge, "temperature_K": a.temperature}
            for a in actors if a.is_spacecraft
        },
    }
    return sim.log, summary

"""Simulation engine.

A :class:`Simulation` owns a set of actors that share one clock. Physics is
stepped in lockstep for all actors; user work runs as activities whose
actions are called in bounded slices. Between slices the engine advances
the models, samples radiation and evaluates the activity constraint.

Per physics step and actor the update order is fixed: position, eclipse
flag, thermal, battery (charge then discharge), radiation.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

from . import astro, comms
from .core import Actor, Epoch, ValidationError
from .power import charge, discharge
from .radiation import RadiationState, sample_events
from .thermal import heat_fluxes, step_temperature

log = logging.getLogger(__name__)

CSV_HEADER = (
    "time_s",
    "actor_id",
    "pos_x_m",
    "pos_y_m",
    "pos_z_m",
    "temperature_K",
    "state_of_charge",
    "is_in_eclipse",
    "current_activity",
    "event",
)

EVENT_KINDS = frozenset({
    "snapshot",
    "activity_start",
    "activity_end",
    "interrupted",
    "window_open",
    "window_close",
    "radiation_bitflip",
    "radiation_interrupt",
    "device_failure",
})


class ActivityError(RuntimeError):
    pass


class Mode(str, Enum):
    SIMULATED = "simulated"
    REAL_TIME = "real_time"


class ActivityOutcome(str, Enum):
    COMPLETED = "completed"
    CONSTRAINT_VIOLATED = "constraint_violated"
    RADIATION_INTERRUPTED = "radiation_interrupted"
    ABORTED = "aborted"


@dataclass
class SimulationConfig:
    physics_dt: float = 1.0
    constraint_check_interval: float = 1.0
    mode: Mode = Mode.SIMULATED
    seed: int = 0
    # periodic snapshot cadence in model seconds; None disables snapshots
    log_interval: float | None = None

    def __post_init__(self):
        self.mode = Mode(self.mode)
        if not self.physics_dt > 0:
            raise ValidationError("physics_dt must be positive")
        if not self.constraint_check_interval > 0:
            raise ValidationError("constraint_check_interval must be positive")
        if self.log_interval is not None and not self.log_interval > 0:
            raise ValidationError("log_interval must be positive")


@dataclass
class ActivityContext:
    """Handed to every action slice."""

    simulation: Simulation
    actor: Actor
    slice_s: float
    elapsed: float = 0.0
    consumed: float | None = None
    abort_requested: bool = False

    def finish(self, consumed: float | None = None):
        """Mark the activity done, optionally after only ``consumed`` seconds."""
        self.consumed = consumed
        return True

    def abort(self):
        self.abort_requested = True


Action = Callable[[ActivityContext], Any]


@dataclass
class Activity:
    name: str
    power_consumption: float  # W
    action: Action
    constraint: Callable[[Actor], bool] | None = None
    on_termination: Callable[[ActivityOutcome], None] | None = None

    def __post_init__(self):
        if not self.name:
            raise ValidationError("activity name must be nonempty")
        if self.power_consumption < 0:
            raise ValidationError("activity power consumption must be >= 0")


def timed_action(duration: float, work: Callable[[ActivityContext], None] | None = None) -> Action:
    """Action lasting ``duration`` model seconds; ``work`` runs on the last slice."""

    def action(ctx: ActivityContext):
        remaining = duration - ctx.elapsed
        if remaining <= ctx.slice_s:
            if work is not None:
                work(ctx)
            return ctx.finish(max(remaining, 0.0))
        return False

    return action


@dataclass
class ActivityReport:
    actor_id: str
    name: str
    outcome: ActivityOutcome
    elapsed: float
    constraint_checks: int
    sunlit_seconds: float


@dataclass(frozen=True)
class LogRecord:
    time: float
    actor_id: str
    event: str
    position: tuple[float, float, float] | None = None
    temperature: float | None = None
    state_of_charge: float | None = None
    in_eclipse: bool | None = None
    activity: str | None = None
    payload: Any = None


@dataclass
class EventLog:
    records: list[LogRecord] = field(default_factory=list)

    def append(self, record: LogRecord):
        if record.event not in EVENT_KINDS:
            raise ValueError(f"unknown log event {record.event!r}")
        if self.records and record.time < self.records[-1].time:
            raise ValueError("log records must be appended in time order")
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def of_kind(self, event: str) -> list[LogRecord]:
        return [r for r in self.records if r.event == event]

    @classmethod
    def merge(cls, logs: Iterable[EventLog]) -> EventLog:
        """Time-ordered union; ties keep the order of ``logs``."""
        merged = [r for lg in logs for r in lg.records]
        merged.sort(key=lambda r: r.time)
        return cls(merged)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_log(event_log: EventLog, path: str | Path):
    """Write the log as CSV (UTF-8, LF line endings)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in event_log.records:
            pos = r.position or (None, None, None)
            writer.writerow([
                _fmt(float(r.time)),
                r.actor_id,
                _fmt(pos[0]),
                _fmt(pos[1]),
                _fmt(pos[2]),
                _fmt(r.temperature),
                _fmt(r.state_of_charge),
                _fmt(r.in_eclipse),
                r.activity or "",
                r.event,
            ])


def read_log(path: str | Path) -> list[dict]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


@dataclass
class Profile:
    """Cumulative wall time per engine category, in seconds."""

    seconds: dict[str, float] = field(default_factory=lambda: defaultdict(float))
    counts: dict[str, int] = field(default_factory=lambda: defaultdict(int))

    def add(self, category: str, dt: float):
        self.seconds[category] += dt
        self.counts[category] += 1

    MODEL_CATEGORIES = ("orbit", "eclipse", "thermal", "power", "radiation", "other")

    @property
    def model_update(self) -> float:
        return sum(self.seconds.get(c, 0.0) for c in self.MODEL_CATEGORIES)


@dataclass
class _Watch:
    actor_id: str
    other_id: str
    margin: float
    visible: bool | None = None


class Simulation:
    """One simulation instance: actors, activities, clock and log."""

    def __init__(self, config: SimulationConfig | None = None, actors: Iterable[Actor] = ()):
        self.config = config or SimulationConfig()
        self.actors: dict[str, Actor] = {}
        self.activities: dict[str, dict[str, Activity]] = defaultdict(dict)
        self.log = EventLog()
        self.profile = Profile()
        self.reports: list[ActivityReport] = []
        self.step_hooks: list[Callable[[Simulation, Actor, float, bool, float], None]] = []
        self.clock: Epoch | None = None
        # ids included in periodic snapshots; None means every actor
        self.logged_actors: set[str] | None = None
        self._running: set[str] = set()
        self._watches: list[_Watch] = []
        self._sunlit: dict[str, bool] = {}
        self._sun_cache: tuple[float, tuple] | None = None
        self._next_snapshot: float | None = None
        self._pending: dict[str, dict] = {}
        for actor in actors:
            self.add_actor(actor)

    # --- registration -------------------------------------------------------

    def add_actor(self, actor: Actor) -> Actor:
        if actor.id in self.actors:
            raise ValidationError(f"duplicate actor id {actor.id!r}")
        actor.validate()
        if self.clock is None:
            self.clock = actor.local_time
        elif actor.local_time != self.clock:
            raise ValidationError(
                f"{actor.id!r} local time {actor.local_time.seconds} differs from "
                f"simulation clock {self.clock.seconds}"
            )
        if actor.radiation is not None and actor.radiation_state is None:
            actor.radiation_state = RadiationState.seeded(self.config.seed, actor.id)
        self.actors[actor.id] = actor
        return actor

    def register_activity(self, actor: Actor | str, activity: Activity):
        actor = self._actor(actor)
        if activity.name in self.activities[actor.id]:
            raise ActivityError(f"{actor.id!r} already has an activity named {activity.name!r}")
        self.activities[actor.id][activity.name] = activity

    def watch_visibility(self, actor: Actor | str, other: Actor | str, margin: float = 0.0):
        """Log window_open/window_close for ``actor`` as visibility to ``other`` changes."""
        a, b = self._actor(actor), self._actor(other)
        self._watches.append(_Watch(a.id, b.id, margin))

    def link_state(self, actor_id: str, other_id: str) -> bool | None:
        for w in self._watches:
            if w.actor_id == actor_id and w.other_id == other_id:
                return w.visible
        return None

    def _actor(self, actor: Actor | str) -> Actor:
        key = actor if isinstance(actor, str) else actor.id
        try:
            return self.actors[key]
        except KeyError:
            raise ActivityError(f"unknown actor {key!r}") from None

    # --- state queries ------------------------------------------------------

    @property
    def time(self) -> float:
        return self.clock.seconds

    def position(self, actor: Actor | str, t: float | None = None):
        actor = self._actor(actor)
        return astro.position_at(actor, self.time if t is None else t)

    def sun_position(self, t: float | None = None):
        t = self.time if t is None else t
        if self._sun_cache is None or self._sun_cache[0] != t:
            self._sun_cache = (t, astro.sun_position_xyz(t))
        return self._sun_cache[1]

    def is_in_eclipse(self, actor: Actor | str, t: float | None = None) -> bool:
        actor = self._actor(actor)
        if not actor.is_spacecraft:
            return False
        return astro.is_in_eclipse(self.position(actor, t), self.sun_position(t), actor.central_body)

    def is_visible(self, a: Actor | str, b: Actor | str, margin: float = 0.0) -> bool:
        return comms.is_visible(self._actor(a), self._actor(b), self.time, margin)

    def snapshot(self, actor: Actor | str | None = None, event: str = "snapshot", payload=None):
        if actor is None:
            targets = [
                a for a in self.actors.values()
                if self.logged_actors is None or a.id in self.logged_actors
            ]
        else:
            targets = [self._actor(actor)]
        for a in targets:
            self._record(a, event, payload)

    def _record(self, actor: Actor, event: str, payload=None):
        t = self.time
        pos = astro.position_at(actor, t)
        eclipse = None
        if actor.is_spacecraft:
            eclipse = astro.is_in_eclipse(pos, self.sun_position(t), actor.central_body)
        self.log.append(LogRecord(
            time=t,
            actor_id=actor.id,
            event=event,
            position=pos,
            temperature=actor.temperature,
            state_of_charge=actor.state_of_charge,
            in_eclipse=eclipse,
            activity=actor.current_activity,
            payload=payload,
        ))

    # --- physics --------------------------------------------------------------

    def _step_actor(self, actor: Actor, dt: float, power: float, flags: dict):
        perf = time.perf_counter
        prof = self.profile
        t = self.time
        if not actor.is_spacecraft or (
            actor.thermal is None and actor.battery is None and actor.radiation is None
        ):
            return
        t0 = perf()
        pos = astro.propagate(actor.orbit, t).position
        t1 = perf()
        prof.add("orbit", t1 - t0)
        sunlit = not astro.is_in_eclipse(pos, self.sun_position(t), actor.central_body)
        t2 = perf()
        prof.add("eclipse", t2 - t1)
        if actor.thermal is not None:
            r = math.sqrt(pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2])
            fluxes = heat_fluxes(actor.thermal, sunlit, r, power, actor.central_body)
            actor.thermal = step_temperature(actor.thermal, fluxes, dt)
        t3 = perf()
        prof.add("thermal", t3 - t2)
        if actor.battery is not None:
            battery = charge(actor.battery, sunlit, dt)
            actor.battery, depleted = discharge(battery, power, dt)
            if depleted:
                flags["depleted"] = True
        t4 = perf()
        prof.add("power", t4 - t3)
        if actor.radiation is not None and not actor.radiation_state.failed:
            _, bitflips, interrupted, failed_now = sample_events(
                actor.radiation_state, actor.radiation, dt
            )
            if bitflips:
                flags["bitflips"] = flags.get("bitflips", 0) + bitflips
            if interrupted:
                flags["interrupted"] = True
            if failed_now:
                flags["failed"] = True
        prof.add("radiation", perf() - t4)
        self._sunlit[actor.id] = sunlit
        if sunlit:
            flags["sunlit_s"] = flags.get("sunlit_s", 0.0) + dt

    def _advance_physics(
        self, duration: float, power: Mapping[str, float], steps: int | None = None
    ) -> dict[str, dict]:
        """Step every actor through ``duration`` seconds; returns per-actor event flags.

        By default steps are ``physics_dt`` long with a shorter last step;
        ``steps`` instead splits the duration into that many equal steps.
        """
        flags: dict[str, dict] = {aid: {} for aid in self.actors}
        remaining = duration
        dt_nominal = self.config.physics_dt if steps is None else duration / steps
        while remaining > 1e-12:
            dt = dt_nominal if remaining > dt_nominal * (1 + 1e-9) else remaining
            self._maybe_snapshot()
            for aid, actor in self.actors.items():
                self._step_actor(actor, dt, power.get(aid, 0.0), flags[aid])
            t0 = time.perf_counter()
            self.clock = self.clock + dt
            for actor in self.actors.values():
                actor.local_time = self.clock
            remaining -= dt
            self._after_step(dt, flags)
            self.profile.add("other", time.perf_counter() - t0)
        return flags

    def _after_step(self, dt: float, flags: dict[str, dict]):
        for aid, f in flags.items():
            actor = self.actors[aid]
            if f.pop("bitflips", 0):
                self._record(actor, "radiation_bitflip")
            if f.get("interrupted") and not f.get("_interrupt_logged"):
                f["_interrupt_logged"] = True
                self._record(actor, "radiation_interrupt")
            if f.get("failed") and not f.get("_failure_logged"):
                f["_failure_logged"] = True
                self._record(actor, "device_failure")
        for w in self._watches:
            now = comms.is_visible(self.actors[w.actor_id], self.actors[w.other_id], self.time, w.margin)
            if w.visible is not None and now != w.visible:
                self._record(
                    self.actors[w.actor_id],
                    "window_open" if now else "window_close",
                    payload=w.other_id,
                )
            w.visible = now
        for hook in self.step_hooks:
            for actor in self.actors.values():
                hook(self, actor, self.time, self._sunlit.get(actor.id, False), dt)

    def _maybe_snapshot(self):
        interval = self.config.log_interval
        if interval is None:
            return
        if self._next_snapshot is None:
            self._next_snapshot = self.time
        if self.time >= self._next_snapshot - 1e-9:
            self.snapshot()
            while self._next_snapshot <= self.time + 1e-9:
                self._next_snapshot += interval

    def _init_watches(self):
        for w in self._watches:
            if w.visible is None:
                w.visible = comms.is_visible(
                    self.actors[w.actor_id], self.actors[w.other_id], self.time, w.margin
                )

    # --- time advance -------------------------------------------------------

    def advance_time(
        self,
        duration: float,
        interrupt_conditions: Mapping[str, Callable[[Simulation], bool]]
        | Iterable[Callable[[Simulation], bool]]
        | None = None,
        power: Mapping[str, float] | None = None,
    ) -> tuple[float, str | int | None]:
        """Advance all actors by up to ``duration`` seconds.

        Conditions are checked at entry and after every physics step; the
        first one that holds stops the advance. Returns ``(elapsed, fired)``
        where ``fired`` is the condition's key (or index) or None.
        """
        if not duration > 0:
            raise ValueError("duration must be positive")
        if interrupt_conditions is None:
            conditions = []
        elif isinstance(interrupt_conditions, Mapping):
            conditions = list(interrupt_conditions.items())
        else:
            conditions = list(enumerate(interrupt_conditions))
        power = power or {}
        self._init_watches()

        def fired():
            for key, cond in conditions:
                if cond(self):
                    return key
            return None

        hit = fired()
        if hit is not None:
            return 0.0, hit
        start = self.time
        if not conditions:
            self._advance_physics(duration, power)
            return self.time - start, None
        remaining = duration
        while remaining > 1e-12:
            dt = min(self.config.physics_dt, remaining)
            self._advance_physics(dt, power)
            remaining -= dt
            hit = fired()
            if hit is not None:
                break
        return self.time - start, hit

    # --- activities -----------------------------------------------------------

    def _begin(self, actor: Actor, name: str) -> Activity:
        if actor.id in self._running:
            raise ActivityError(f"{actor.id!r} is already performing an activity")
        try:
            activity = self.activities[actor.id][name]
        except KeyError:
            raise ActivityError(f"{actor.id!r} has no activity {name!r}") from None
        if actor.failed:
            raise ActivityError(f"{actor.id!r} has suffered a device failure")
        self._running.add(actor.id)
        self._init_watches()
        actor.current_activity = name
        self._record(actor, "activity_start")
        return activity

    def _end(self, actor: Actor, activity: Activity, outcome: ActivityOutcome, report: ActivityReport):
        self._record(
            actor,
            "activity_end" if outcome is ActivityOutcome.COMPLETED else "interrupted",
            payload=outcome.value,
        )
        actor.current_activity = None
        self._running.discard(actor.id)
        self.reports.append(report)
        if activity.on_termination is not None:
            activity.on_termination(outcome)

    def _check_slice(self, actor, activity, flags, done, ctx, report) -> ActivityOutcome | None:
        if flags.get("failed"):
            return ActivityOutcome.ABORTED
        if flags.get("interrupted"):
            return ActivityOutcome.RADIATION_INTERRUPTED
        if ctx.abort_requested:
            return ActivityOutcome.ABORTED
        if done:
            return ActivityOutcome.COMPLETED
        if activity.constraint is not None:
            t0 = time.perf_counter()
            ok = activity.constraint(actor)
            self.profile.add("constraint", time.perf_counter() - t0)
            report.constraint_checks += 1
            if not ok:
                return ActivityOutcome.CONSTRAINT_VIOLATED
        return None

    def perform_activity(self, actor: Actor | str, name: str) -> ActivityOutcome:
        """Run an activity to completion or interruption in model time."""
        actor = self._actor(actor)
        activity = self._begin(actor, name)
        interval = self.config.constraint_check_interval
        report = ActivityReport(actor.id, name, ActivityOutcome.ABORTED, 0.0, 0, 0.0)
        ctx = ActivityContext(self, actor, interval)
        outcome = ActivityOutcome.ABORTED
        try:
            while True:
                ctx.slice_s = interval
                ctx.consumed = None
                t0 = time.perf_counter()
                done = bool(activity.action(ctx))
                self.profile.add("activity", time.perf_counter() - t0)
                step = interval if ctx.consumed is None else min(ctx.consumed, interval)
                flags = {}
                if step > 0:
                    flags = self._advance_physics(step, {actor.id: activity.power_consumption})[actor.id]
                report.elapsed += step
                report.sunlit_seconds += flags.get("sunlit_s", 0.0)
                ctx.elapsed = report.elapsed
                result = self._check_slice(actor, activity, flags, done, ctx, report)
                if result is not None:
                    outcome = result
                    break
        finally:
            report.outcome = outcome
            self._end(actor, activity, outcome, report)
        return outcome

    def run_real_time(self, actor: Actor | str, name: str, clock=None) -> ActivityOutcome:
        """Run an activity with model time driven by the host's monotonic clock."""
        if self.config.mode is not Mode.REAL_TIME:
            raise ActivityError("run_real_time requires a REAL_TIME simulation config")
        clock = clock or time.perf_counter
        actor = self._actor(actor)
        activity = self._begin(actor, name)
        interval = self.config.constraint_check_interval
        report = ActivityReport(actor.id, name, ActivityOutcome.ABORTED, 0.0, 0, 0.0)
        ctx = ActivityContext(self, actor, interval)
        outcome = ActivityOutcome.ABORTED
        last_update = last_check = clock()
        try:
            while True:
                t0 = clock()
                done = bool(activity.action(ctx))
                now = clock()
                self.profile.add("activity", now - t0)
                if not done and now - last_check < interval and not ctx.abort_requested:
                    continue
                wall = now - last_update
                last_update = last_check = now
                flags = {}
                if wall > 0:
                    # equal sub-steps so a slice slightly over the interval stays one step
                    n = max(1, round(wall / self.config.physics_dt))
                    flags = self._advance_physics(wall, {actor.id: activity.power_consumption}, steps=n)[actor.id]
                report.elapsed += wall
                report.sunlit_seconds += flags.get("sunlit_s", 0.0)
                ctx.elapsed = report.elapsed
                result = self._check_slice(actor, activity, flags, done, ctx, report)
                if result is not None:
                    outcome = result
                    break
        finally:
            report.outcome = outcome
            self._end(actor, activity, outcome, report)
        return outcome

    @property
    def last_report(self) -> ActivityReport | None:
        return self.reports[-1] if self.reports else None

"""Two counter-rotating satellites learning a circles classifier together.

Each satellite holds half of a heterogeneously split training set and a
small dense network. Per tick a satellite is in one of three modes, in
descending priority:

* standby when its SoC is below the threshold,
* model sharing when the pair is in line of sight and has not yet
  exchanged during the current window (both must be out of standby),
* training otherwise: one SGD epoch lasting ``epoch_duration_s`` of model time.

Mode decisions are taken when a satellite's current task ends. An exchange
preempts training epochs in progress; their compute is discarded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import comms
from ..astro import OrbitState
from ..core import Actor, make_spacecraft
from ..power import Battery
from ..runtime import EventLog, Simulation, SimulationConfig
from .config import ScenarioConfig

PARAMETER_COUNT = 41
BITS_PER_PARAMETER = 32


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


class TinyNet:
    """2-10-1 dense network with sigmoid activations on both layers."""

    def __init__(self, w1, b1, w2, b2):
        self.w1 = np.asarray(w1, dtype=np.float64).reshape(2, 10)
        self.b1 = np.asarray(b1, dtype=np.float64).reshape(10)
        self.w2 = np.asarray(w2, dtype=np.float64).reshape(10)
        self.b2 = np.asarray(b2, dtype=np.float64).reshape(1)

    @classmethod
    def initialize(cls, rng: np.random.Generator) -> TinyNet:
        # Glorot uniform
        l1 = math.sqrt(6.0 / (2 + 10))
        l2 = math.sqrt(6.0 / (10 + 1))
        return cls(rng.uniform(-l1, l1, (2, 10)), np.zeros(10), rng.uniform(-l2, l2, 10), np.zeros(1))

    @property
    def parameter_count(self) -> int:
        return self.w1.size + self.b1.size + self.w2.size + self.b2.size

    def parameters(self) -> np.ndarray:
        return np.concatenate([self.w1.ravel(), self.b1, self.w2, self.b2])

    @classmethod
    def from_parameters(cls, flat) -> TinyNet:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != PARAMETER_COUNT:
            raise ValueError(f"expected {PARAMETER_COUNT} parameters, got {flat.size}")
        return cls(flat[:20], flat[20:30], flat[30:40], flat[40:])

    def to_bytes(self) -> bytes:
        """Wire format: little-endian float32 per parameter."""
        return self.parameters().astype("<f4").tobytes()

    @classmethod
    def from_bytes(cls, payload: bytes) -> TinyNet:
        return cls.from_parameters(np.frombuffer(payload, dtype="<f4"))

    @property
    def size_bits(self) -> int:
        return len(self.to_bytes()) * 8

    def copy(self) -> TinyNet:
        return TinyNet.from_parameters(self.parameters().copy())

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        h = _sigmoid(x @ self.w1 + self.b1)
        return _sigmoid(h @ self.w2 + self.b2[0])

    def accuracy(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.mean((self.predict_proba(x) >= 0.5) == (y >= 0.5)))

    def loss(self, x: np.ndarray, y: np.ndarray) -> float:
        p = np.clip(self.predict_proba(x), 1e-12, 1 - 1e-12)
        return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))

    def sgd_epoch(self, x: np.ndarray, y: np.ndarray, lr: float, batch_size: int, rng: np.random.Generator):
        """One shuffled pass of mini-batch SGD on binary cross-entropy."""
        order = rng.permutation(len(x))
        for start in range(0, len(x), batch_size):
            idx = order[start:start + batch_size]
            xb, yb = x[idx], y[idx]
            h = _sigmoid(xb @ self.w1 + self.b1)
            p = _sigmoid(h @ self.w2 + self.b2[0])
            # d(BCE)/d(logit) for a sigmoid output
            g = (p - yb) / len(idx)
            gh = np.outer(g, self.w2) * h * (1.0 - h)
            self.w2 -= lr * (h.T @ g)
            self.b2 -= lr * g.sum()
            self.w1 -= lr * (xb.T @ gh)
            self.b1 -= lr * gh.sum(axis=0)


def federated_average(models: list[TinyNet]) -> TinyNet:
    return TinyNet.from_parameters(np.mean([m.parameters() for m in models], axis=0))


@dataclass
class CirclesDataset:
    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    partitions: tuple[np.ndarray, np.ndarray]  # index arrays into the training set

    def partition(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        idx = self.partitions[k]
        return self.x_train[idx], self.y_train[idx]


def _circles(n: int, outer_radius: float, noise: float, rng: np.random.Generator):
    y = (np.arange(n) % 2).astype(np.float64)
    rng.shuffle(y)
    radius = np.where(y == 1, outer_radius, 0.5 * outer_radius)
    radius = radius + rng.normal(0.0, noise * outer_radius, n)
    angle = rng.uniform(0.0, 2.0 * math.pi, n)
    x = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    return x, y


def make_circles_dataset(
    n_train: int = 4166,
    n_test: int = 3300,
    seed: int = 0,
    outer_radius: float = 1.0,
    noise: float = 0.05,
    split: float = 0.5,
) -> CirclesDataset:
    """Inner (y=0, radius R/2) and outer (y=1, radius R) rings with radial noise.

    ``noise`` is the radial standard deviation as a fraction of R. Training
    samples with first feature above ``split`` go to satellite 1, those
    below ``-split`` to satellite 2; the rest are unused.
    """
    rng = np.random.default_rng(seed)
    x_train, y_train = _circles(n_train, outer_radius, noise, rng)
    x_test, y_test = _circles(n_test, outer_radius, noise, rng)
    parts = (np.flatnonzero(x_train[:, 0] > split), np.flatnonzero(x_train[:, 0] < -split))
    return CirclesDataset(x_train, y_train, x_test, y_test, parts)


@dataclass
class FedAvgParams:
    altitude_m: float = 550e3
    inclination_deg: float = 98.62
    raan_deg: float = -148.17  # orbit plane close to the Sun direction at the default epoch
    phase_deg: float = 157.5  # in-plane offset of satellite 2; puts both meetings near the terminator
    battery_capacity_j: float = 1e5
    soc_range: tuple[float, float] = (0.6, 0.8)
    charging_rate_w: float = 50.0
    isl_rate_bps: float = 1e6
    standby_w: float = 2.0
    sharing_w: float = 100.0
    training_w: float = 100.0
    standby_soc: float = 0.5
    epoch_duration_s: float = 30.0
    revolutions: float = 30.0
    silent_revolutions: float = 10.0
    communication: bool = True
    learning_rate: float = 0.1
    batch_size: int = 32
    n_train: int = 4166
    n_test: int = 3300
    outer_radius: float = 1.0
    noise: float = 0.05

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> FedAvgParams:
        params = cls(**config.params)
        params.soc_range = tuple(params.soc_range)
        return params


@dataclass
class Exchange:
    time: float
    accuracy_before: tuple[float, float]
    accuracy_after: float
    duration: float


@dataclass
class FedAvgResult:
    log: EventLog
    satellite_ids: tuple[str, str]
    orbital_period: float
    start_time: float
    # (time, accuracy) after every completed epoch, per satellite
    epoch_accuracy: dict[str, list[tuple[float, float]]] = field(default_factory=dict)
    exchanges: list[Exchange] = field(default_factory=list)
    epochs: dict[str, int] = field(default_factory=dict)
    final_accuracy: dict[str, float] = field(default_factory=dict)
    window_opens: list[float] = field(default_factory=list)

    def exchange_gain_fraction(self) -> float:
        """Share of (exchange, satellite) pairs whose accuracy did not drop."""
        pairs = [(b, e.accuracy_after) for e in self.exchanges for b in e.accuracy_before]
        if not pairs:
            return math.nan
        return sum(after >= before for before, after in pairs) / len(pairs)

    def summary(self) -> dict:
        return {
            "orbital_period_s": self.orbital_period,
            "exchanges": len(self.exchanges),
            "epochs": dict(self.epochs),
            "final_accuracy": dict(self.final_accuracy),
            "exchange_gain_fraction": self.exchange_gain_fraction() if self.exchanges else None,
        }


def make_pair(params: FedAvgParams, epoch, body) -> tuple[Actor, Actor]:
    """Coplanar circular orbits flown in opposite directions.

    Satellite 2 uses the supplementary inclination and the opposite node, which
    is the same plane traversed retrograde. ``phase_deg`` places it ahead of
    satellite 1 along satellite 1's direction of motion.
    """
    o1 = OrbitState.circular(params.altitude_m, params.inclination_deg, params.raan_deg, 0.0, epoch, body)
    o2 = OrbitState.circular(
        params.altitude_m,
        180.0 - params.inclination_deg,
        params.raan_deg + 180.0,
        180.0 - params.phase_deg,
        epoch,
        body,
    )
    return make_spacecraft("sat1", epoch, o1), make_spacecraft("sat2", epoch, o2)


class _Agent:
    def __init__(self, actor, model, data, rng):
        self.actor = actor
        self.model = model
        self.x, self.y = data
        self.rng = rng
        self.mode: str | None = None
        self.remaining = 0.0
        self.epochs = 0


def run_fedavg(config: ScenarioConfig, params: FedAvgParams | None = None) -> FedAvgResult:
    params = params or FedAvgParams.from_config(config)
    epoch, body = config.epoch, config.body
    rng = np.random.default_rng(config.seed)
    data = make_circles_dataset(
        params.n_train, params.n_test, config.seed, params.outer_radius, params.noise
    )
    sat1, sat2 = make_pair(params, epoch, body)
    socs = rng.uniform(*params.soc_range, size=2)
    for sat, soc in zip((sat1, sat2), socs):
        sat.set_battery(Battery.from_soc(params.battery_capacity_j, float(soc), params.charging_rate_w))
        sat.add_comm_device("isl", params.isl_rate_bps)
    # both satellites start from the same initial model
    init = TinyNet.initialize(rng)
    agents = [
        _Agent(sat, init.copy(), data.partition(k), np.random.default_rng([config.seed, k]))
        for k, sat in enumerate((sat1, sat2))
    ]

    sim = Simulation(
        SimulationConfig(physics_dt=config.physics_dt, seed=config.seed, log_interval=config.log_interval_s),
        [sat1, sat2],
    )
    sim.watch_visibility(sat1, sat2)
    period = sat1.orbit.period
    t0 = sim.time
    # the config duration can only shorten the run
    duration = min(params.revolutions * period, config.duration_s)
    silent_until = t0 + params.silent_revolutions * period
    transfer = comms.transmission_duration(init.size_bits, sat1.comm_devices["isl"])

    result = FedAvgResult(sim.log, (sat1.id, sat2.id), period, t0)
    result.epoch_accuracy = {a.actor.id: [] for a in agents}
    shared_this_window = False
    was_visible = False
    dt = config.physics_dt

    def accuracy(agent):
        return agent.model.accuracy(data.x_test, data.y_test)

    elapsed = 0.0
    while duration - elapsed > 1e-6:
        visible = bool(sim.is_visible(sat1, sat2))
        if visible and not was_visible:
            result.window_opens.append(sim.time)
            shared_this_window = False
        was_visible = visible

        if (
            params.communication
            and visible
            and not shared_this_window
            and sim.time >= silent_until
            and all(a.mode != "standby" or a.actor.state_of_charge >= params.standby_soc for a in agents)
        ):
            before = tuple(accuracy(a) for a in agents)
            for a in agents:
                if a.mode == "training":
                    sim.snapshot(a.actor, "interrupted", payload="exchange")
                a.mode = "sharing"
                a.actor.current_activity = "sharing"
                sim.snapshot(a.actor, "activity_start")
            sim.advance_time(transfer, power={a.actor.id: params.sharing_w for a in agents})
            elapsed += transfer
            # models travel in their float32 wire format
            averaged = federated_average([TinyNet.from_bytes(a.model.to_bytes()) for a in agents])
            for a in agents:
                a.model = averaged.copy()
                sim.snapshot(a.actor, "activity_end")
                a.actor.current_activity = None
                a.mode = None
                a.remaining = 0.0
            result.exchanges.append(Exchange(sim.time, before, accuracy(agents[0]), transfer))
            shared_this_window = True
            continue

        for a in agents:
            if a.remaining > 1e-6:
                continue
            if a.actor.state_of_charge < params.standby_soc:
                a.mode, a.remaining = "standby", dt
            else:
                a.mode, a.remaining = "training", params.epoch_duration_s
                a.actor.current_activity = "training"
                sim.snapshot(a.actor, "activity_start")
            a.actor.current_activity = a.mode

        step = min(dt, duration - elapsed, *(a.remaining for a in agents))
        power = {
            a.actor.id: params.standby_w if a.mode == "standby" else params.training_w for a in agents
        }
        sim.advance_time(step, power=power)
        elapsed += step
        for a in agents:
            a.remaining -= step
            if a.mode == "training" and a.remaining <= 1e-6:
                a.model.sgd_epoch(a.x, a.y, params.learning_rate, params.batch_size, a.rng)
                a.epochs += 1
                result.epoch_accuracy[a.actor.id].append((sim.time, accuracy(a)))
                sim.snapshot(a.actor, "activity_end")
                a.actor.current_activity = None
                a.mode = None
                a.remaining = 0.0

    result.epochs = {a.actor.id: a.epochs for a in agents}
    result.final_accuracy = {a.actor.id: accuracy(a) for a in agents}
    return result

"""Single event effects as independent Poisson processes.

Three event streams are modelled per actor: bit flips (data corruption),
activity interruptions (software faults) and permanent device failure.
Each actor owns one generator so that its event stream does not depend on
the order in which actors are stepped.
"""
from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field

from .core import ValidationError

# Poisson sampling switches from inversion to a normal approximation here.
INVERSION_LIMIT = 10.0


class DeviceFailedError(RuntimeError):
    """The device suffered a permanent failure and cannot be sampled again."""


@dataclass(frozen=True)
class RadiationConfig:
    data_corruption_rate: float = 0.0  # events/s
    interruption_rate: float = 0.0
    failure_rate: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("data_corruption_rate", "interruption_rate", "failure_rate"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")


@dataclass
class RadiationState:
    failed: bool = False
    cumulative_bitflips: int = 0
    rng: random.Random = field(default_factory=random.Random, repr=False, compare=False)

    @classmethod
    def seeded(cls, seed: int, actor_id: str = "") -> RadiationState:
        return cls(rng=random.Random(actor_seed(seed, actor_id)))


def actor_seed(seed: int, actor_id: str) -> int:
    """Scenario seed mixed with a stable 64-bit digest of the actor id."""
    digest = hashlib.blake2b(actor_id.encode("utf-8"), digest_size=8).digest()
    return (int(seed) & 0xFFFFFFFFFFFFFFFF) ^ int.from_bytes(digest, "little")


def sample_poisson(lam: float, rng: random.Random) -> int:
    if lam < 0:
        raise ValueError("Poisson mean must be >= 0")
    if lam == 0.0:
        return 0
    if lam >= INVERSION_LIMIT:
        return max(0, int(round(rng.gauss(lam, math.sqrt(lam)))))
    u = rng.random()
    p = math.exp(-lam)
    cdf = p
    k = 0
    # the k cap only guards against round-off in the tail sum
    while u > cdf and k < 1000:
        k += 1
        p *= lam / k
        cdf += p
    return k


def sample_events(state: RadiationState, config: RadiationConfig, dt: float):
    """Draw the events of one interval.

    Returns ``(state, bitflips, interrupted, failed_now)``. The generator in
    ``state`` is advanced in place; draws happen in the order corruption,
    interruption, failure.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if state.failed:
        raise DeviceFailedError("device has failed permanently")
    rng = state.rng
    bitflips = sample_poisson(config.data_corruption_rate * dt, rng)
    interrupted = sample_poisson(config.interruption_rate * dt, rng) >= 1
    failed_now = sample_poisson(config.failure_rate * dt, rng) >= 1
    state.cumulative_bitflips += bitflips
    if failed_now:
        state.failed = True
    return state, bitflips, interrupted, failed_now


def corrupt_buffer(buffer: bytes, bitflips: int, rng: random.Random) -> bytes:
    """Flip ``bitflips`` uniformly drawn bit positions (with replacement)."""
    if bitflips < 0:
        raise ValueError("bitflips must be >= 0")
    if bitflips == 0:
        return bytes(buffer)
    if len(buffer) == 0:
        raise ValueError("cannot corrupt an empty buffer")
    out = bytearray(buffer)
    nbits = len(out) * 8
    for _ in range(bitflips):
        pos = rng.randrange(nbits)
        out[pos // 8] ^= 1 << (pos % 8)
    return bytes(out)

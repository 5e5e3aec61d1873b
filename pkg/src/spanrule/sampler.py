"""Active sampling: pick the next document by label-model uncertainty."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

POLICIES = ("entropy", "random", "entropy_eps")
EPSILON = 0.1
_TIE_TOL = 1e-12


class SamplerError(Exception):
    pass


def entropy(p: Sequence[float]) -> float:
    """Shannon entropy in nats; 0 * ln 0 taken as 0."""
    total = 0.0
    s = 0.0
    for x in p:
        if x < 0:
            raise SamplerError("negative probability component")
        s += x
        if x > 0:
            total -= x * math.log(x)
    if abs(s - 1.0) > 1e-9:
        raise SamplerError("probabilities must sum to 1")
    return total


@dataclass
class SamplerState:
    policy: str = "entropy"
    seed: int = 0
    shown: set[str] = field(default_factory=set)
    draws: int = 0

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise SamplerError(f"unknown policy {self.policy!r}")

    def _rng(self) -> random.Random:
        # stateless across calls: the stream is a pure function of
        # (seed, draws), so replaying the same history reproduces picks
        return random.Random(self.seed * 1_000_003 + self.draws)

    def to_dict(self) -> dict:
        return {"policy": self.policy, "seed": self.seed,
                "shown": sorted(self.shown), "draws": self.draws}

    @classmethod
    def from_dict(cls, data: dict) -> "SamplerState":
        return cls(policy=data["policy"], seed=data["seed"],
                   shown=set(data["shown"]), draws=data["draws"])


def peek_example(posteriors: Mapping[str, Sequence[float]], state: SamplerState,
                 uncovered: Optional[set[str]] = None) -> str:
    """The uid next_example would return, without mutating state."""
    pool = sorted(u for u in posteriors if u not in state.shown)
    if not pool:
        raise SamplerError("document pool exhausted")
    rng = state._rng()
    if state.policy == "random":
        return rng.choice(pool)
    if state.policy == "entropy_eps" and uncovered:
        eligible = sorted(set(uncovered) & set(pool))
        if eligible and rng.random() < EPSILON:
            return rng.choice(eligible)
    ents = {u: entropy(posteriors[u]) for u in pool}
    best = max(ents.values())
    ties = [u for u in pool if ents[u] >= best - _TIE_TOL]
    return rng.choice(ties)


def next_example(posteriors: Mapping[str, Sequence[float]], state: SamplerState,
                 uncovered: Optional[set[str]] = None) -> str:
    """Highest-entropy unshown document; ties broken seeded-uniformly.
    Marks the returned uid as shown."""
    uid = peek_example(posteriors, state, uncovered)
    state.shown.add(uid)
    state.draws += 1
    return uid

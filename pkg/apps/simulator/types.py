from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from apps.core.exceptions import InvalidSimConfig
from apps.core.types import PathConfig

MAX_SEED = 2**64 - 1


class Estimate(NamedTuple):
    """Mean over repetitions and the across-repetition standard deviation."""

    mean: float
    sd: float


@dataclass(frozen=True, eq=False)
class EmpiricalDist:
    """Observed receiver ages; ``counts[d]`` is how often age d was seen."""

    counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64, copy=True).reshape(-1)
        if np.any(counts < 0):
            raise ValueError("Age counts must be non-negative.")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_mapping(cls, counts_by_age):
        if not counts_by_age:
            return cls()
        if min(counts_by_age) < 0:
            raise ValueError("Ages must be non-negative.")
        counts = np.zeros(max(counts_by_age) + 1, dtype=np.int64)
        for age, count in counts_by_age.items():
            counts[age] = count
        return cls(counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def max_age(self) -> int | None:
        observed = np.flatnonzero(self.counts)
        return int(observed[-1]) if observed.size else None

    def mean(self) -> float:
        return float(np.dot(np.arange(self.counts.size), self.counts) / self.total)

    def as_dict(self) -> dict[int, int]:
        return {int(age): int(self.counts[age]) for age in np.flatnonzero(self.counts)}


@dataclass(frozen=True)
class SimConfig:
    path: PathConfig
    periods: int
    repetitions: int
    seed: int = 0
    warmup: int = 0

    def __post_init__(self):
        if self.periods < 1:
            raise InvalidSimConfig(f"periods must be at least 1, got {self.periods}.")
        if self.repetitions < 1:
            raise InvalidSimConfig(f"repetitions must be at least 1, got {self.repetitions}.")
        if not 0 <= self.seed <= MAX_SEED:
            raise InvalidSimConfig(f"seed must be a 64-bit unsigned integer, got {self.seed}.")
        if not 0 <= self.warmup < self.periods:
            raise InvalidSimConfig(
                f"warmup must lie in 0..{self.periods - 1}, got {self.warmup}."
            )

    @property
    def recorded_periods(self) -> int:
        return self.periods - self.warmup

    def as_dict(self) -> dict:
        return {
            "loss_probs": list(self.path.loss_probs),
            "slots_per_period": self.path.slots_per_period,
            "periods": self.periods,
            "repetitions": self.repetitions,
            "seed": self.seed,
            "warmup": self.warmup,
        }


@dataclass(frozen=True, eq=False)
class SimResult:
    config: SimConfig
    empirical: EmpiricalDist
    mean_age: Estimate
    # None when no repetition saw a single end-to-end delivery
    mean_peak_age: Estimate | None
    deliveries: int

    @property
    def sample_count(self) -> int:
        return self.empirical.total

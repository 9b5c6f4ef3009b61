"""Domain types shared by the analytic engine, the simulator and the comparison code.

Ages are dimensionless counts of sampling periods. All types are immutable once
built; arrays handed out by :class:`AgePmf` are read-only views.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import EmptyPath, InfeasibleSchedule, InvalidPath, ProbOutOfRange, UnnormalizedPmf

NORMALIZATION_TOL = 1e-12


def _readonly(values, dtype=np.float64) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class PathConfig:
    """Ordered per-link loss probabilities of a line network, source side first."""

    loss_probs: tuple[float, ...]
    slots_per_period: int | None = None

    def __post_init__(self):
        if len(self.loss_probs) == 0:
            raise EmptyPath()
        for index, p in enumerate(self.loss_probs):
            if not 0.0 <= p < 1.0:
                raise ProbOutOfRange(index, p)
        m = self.slots_per_period
        if m is not None:
            if m < 1:
                raise InfeasibleSchedule(f"slots_per_period must be positive, got {m}.")
            if m < self.hops:
                raise InfeasibleSchedule(
                    f"{self.hops} links need at least {self.hops} slots per period, got {m}."
                )

    @property
    def hops(self) -> int:
        return len(self.loss_probs)

    @property
    def max_loss(self) -> float:
        """Dominant geometric rate of the age tail."""
        return max(self.loss_probs)

    def prefix(self, hops: int) -> PathConfig:
        """The path as seen by the node ``hops`` links away from the source."""
        if not 1 <= hops <= self.hops:
            raise InvalidPath(f"Hop must lie in 1..{self.hops}, got {hops}.")
        return PathConfig(self.loss_probs[:hops], self.slots_per_period)

    def as_dict(self) -> dict:
        return {
            "loss_probs": list(self.loss_probs),
            "slots_per_period": self.slots_per_period,
        }


@dataclass(frozen=True)
class LinkBudget:
    """``slot_count`` consecutive transmission slots on one link."""

    per_slot_loss: float
    slot_count: int

    def __post_init__(self):
        if not 0.0 <= self.per_slot_loss < 1.0:
            raise ProbOutOfRange(0, self.per_slot_loss)
        if self.slot_count < 1:
            raise InvalidPath(f"slot_count must be at least 1, got {self.slot_count}.")


@dataclass(frozen=True, eq=False)
class AgePmf:
    """Truncated PMF over ages ``0..delta_max`` plus the mass strictly above ``delta_max``."""

    probs: np.ndarray
    tail_mass: float = 0.0
    _survival: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        probs = _readonly(self.probs)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("An age PMF needs a non-empty one-dimensional probability vector.")
        if not np.all((probs >= 0.0) & (probs <= 1.0)):
            raise ValueError("Every age probability must lie in [0, 1].")
        if not 0.0 <= self.tail_mass <= 1.0:
            raise ValueError(f"tail_mass must lie in [0, 1], got {self.tail_mass!r}.")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))
        if not self.is_normalized():
            raise UnnormalizedPmf(self.normalization_error)

    @property
    def delta_max(self) -> int:
        return self.probs.size - 1

    @property
    def normalization_error(self) -> float:
        return abs(math.fsum(self.probs) + self.tail_mass - 1.0)

    def is_normalized(self, tol: float = NORMALIZATION_TOL) -> bool:
        return self.normalization_error <= tol

    def survival(self) -> np.ndarray:
        """Pr[age > d] for d = 0..delta_max, built from suffix sums so small tails keep their digits."""
        if self._survival is None:
            suffix = np.cumsum(self.probs[::-1])[::-1]
            survival = np.empty_like(suffix)
            survival[:-1] = suffix[1:]
            survival[-1] = 0.0
            survival += self.tail_mass
            survival.setflags(write=False)
            object.__setattr__(self, "_survival", survival)
        return self._survival

    def cdf(self) -> np.ndarray:
        return 1.0 - self.survival()

    def padded(self, delta_max: int) -> np.ndarray:
        """Probabilities extended with zeros up to ``delta_max`` (never shortened)."""
        if delta_max <= self.delta_max:
            return self.probs
        return np.concatenate([self.probs, np.zeros(delta_max - self.delta_max)])


class MeanEstimate(NamedTuple):
    value: float
    tail_correction: float


def pmf_mean(pmf: AgePmf, tail_bound_rate: float) -> MeanEstimate:
    """Mean of a truncated PMF, with the truncated tail accounted for.

    The mass above ``delta_max`` is treated as a geometric tail of rate
    ``tail_bound_rate`` (the largest loss probability of the generating path),
    which contributes ``tail_mass * (delta_max + 1 / (1 - rate))``. For a single
    link the correction is exact.
    """
    if not 0.0 <= tail_bound_rate < 1.0:
        raise ValueError(f"tail_bound_rate must lie in [0, 1), got {tail_bound_rate!r}.")
    ages = np.arange(pmf.probs.size, dtype=np.float64)
    body = float(np.dot(ages, pmf.probs))
    correction = 0.0
    if pmf.tail_mass > 0.0:
        correction = pmf.tail_mass * (pmf.delta_max + 1.0 / (1.0 - tail_bound_rate))
    return MeanEstimate(body + correction, correction)

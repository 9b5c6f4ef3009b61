from dataclasses import dataclass

import numpy as np

from apps.core.exceptions import OutOfHorizon
from apps.core.types import AgePmf, PathConfig

from .evaluator import pmf_auto_truncate

DEFAULT_TARGETS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


@dataclass(frozen=True)
class QuantileQuery:
    """Tail probabilities eps; each answer is the smallest age d with Pr[age > d] <= eps."""

    targets: tuple[float, ...] = DEFAULT_TARGETS

    def __post_init__(self):
        targets = tuple(float(t) for t in self.targets)
        if not targets:
            raise ValueError("A quantile query needs at least one target.")
        for t in targets:
            if not 0.0 < t < 1.0:
                raise ValueError(f"Targets must lie in (0, 1), got {t!r}.")
        object.__setattr__(self, "targets", targets)

    @property
    def tail_tol(self):
        return min(self.targets) / 100.0


def _check_horizon(pmf, delta):
    if delta < 0:
        raise ValueError(f"Age must be non-negative, got {delta}.")
    if delta > pmf.delta_max:
        raise OutOfHorizon(delta, pmf.delta_max)


def ccdf(pmf: AgePmf, delta):
    """Pr[age > delta], tail mass included."""
    _check_horizon(pmf, delta)
    return float(pmf.survival()[delta])


def cdf(pmf: AgePmf, delta):
    _check_horizon(pmf, delta)
    return float(pmf.cdf()[delta])


def quantiles_of(pmf: AgePmf, targets):
    """Smallest ages meeting each target on an already truncated PMF.

    Raises OutOfHorizon when a target lies below the PMF's tail mass.
    """
    survival = pmf.survival()
    ages = []
    for eps in targets:
        meets = np.flatnonzero(survival <= eps)
        if meets.size == 0:
            raise OutOfHorizon(pmf.delta_max + 1, pmf.delta_max)
        ages.append(int(meets[0]))
    return ages


def icdf(path: PathConfig, query: QuantileQuery, horizon_cap=None):
    pmf = pmf_auto_truncate(path, query.tail_tol, horizon_cap=horizon_cap)
    return quantiles_of(pmf, query.targets)

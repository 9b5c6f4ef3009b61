"""Analytic-versus-simulated age distributions.

Total variation is the headline number; per-age residuals are kept for
plotting. Chi-square is left out on purpose: sparse tail bins make it
unstable at the sample sizes a single run produces.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from apps.analytic.evaluator import expected_age, pmf_auto_truncate
from apps.core.exceptions import EmptySample
from apps.core.types import AgePmf, PathConfig
from apps.simulator.types import EmpiricalDist, SimResult

logger = logging.getLogger(__name__)

COMPARE_TAIL_TOL = 1e-12


class Residual(NamedTuple):
    age: int
    empirical: float
    analytic: float

    @property
    def difference(self):
        return self.empirical - self.analytic


@dataclass(frozen=True)
class ComparisonReport:
    tv_distance: float
    mean_gap: float
    per_age_residuals: tuple[Residual, ...]
    sample_count: int

    def __post_init__(self):
        if not 0.0 <= self.tv_distance <= 1.0:
            raise ValueError(f"tv_distance must lie in [0, 1], got {self.tv_distance!r}.")
        if self.sample_count <= 0:
            raise ValueError("A comparison needs at least one sample.")


def normalize(emp: EmpiricalDist) -> AgePmf:
    """Relative frequencies up to the largest observed age; no tail."""
    total = emp.total
    if total <= 0:
        raise EmptySample()
    counts = emp.counts[: emp.max_age + 1]
    return AgePmf(counts / total, 0.0)


def total_variation(a: AgePmf, b: AgePmf) -> float:
    """Half the L1 distance, each tail mass counted as one extra atom."""
    horizon = max(a.delta_max, b.delta_max)
    body = np.abs(a.padded(horizon) - b.padded(horizon)).sum()
    distance = 0.5 * body + 0.5 * abs(a.tail_mass - b.tail_mass)
    return float(min(distance, 1.0))


def fold_to_horizon(pmf: AgePmf, delta_max) -> AgePmf:
    """Move mass above ``delta_max`` into the tail so supports line up."""
    if pmf.delta_max <= delta_max:
        return pmf
    beyond = pmf.probs[delta_max + 1:].sum()
    return AgePmf(pmf.probs[: delta_max + 1], pmf.tail_mass + float(beyond))


def compare(path: PathConfig, sim: SimResult, tail_tol=COMPARE_TAIL_TOL) -> ComparisonReport:
    analytic = pmf_auto_truncate(path, tail_tol)
    empirical = fold_to_horizon(normalize(sim.empirical), analytic.delta_max)

    tv = total_variation(empirical, analytic)
    emp_probs = empirical.padded(analytic.delta_max)
    residuals = tuple(
        Residual(age, float(emp_probs[age]), float(analytic.probs[age]))
        for age in range(analytic.delta_max + 1)
    )
    report = ComparisonReport(
        tv_distance=tv,
        mean_gap=abs(sim.mean_age.mean - expected_age(path)),
        per_age_residuals=residuals,
        sample_count=sim.sample_count,
    )
    logger.info("compared %s: tv=%.5f mean_gap=%.5f", path.loss_probs, tv, report.mean_gap)
    return report

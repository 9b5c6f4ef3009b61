"""Discrete-time Monte Carlo simulation of an N-hop line network.

Every sampling period the links are tried once each, in path order, so a
fresh update can cross all N hops within the period it was generated in.
The age vector (source first) evolves as

    age[n] <- age[n - 1]      if link n succeeds
    age[n] <- age[n] + 1      otherwise

with age[0] = 0 because the source discards every update but the newest.

Randomness: repetition r of a run draws from
``Generator(PCG64(SeedSequence(seed, spawn_key=(r,))))`` one
``random((periods, N))`` matrix, row per period and column per link; link n
succeeds in period k when ``u[k, n] >= p_n``. The matrix depends only on
(seed, r, periods, N), so repetitions can run in any order or in parallel.
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings

from apps.core.types import PathConfig

from .types import EmpiricalDist, Estimate, SimConfig, SimResult

logger = logging.getLogger(__name__)


def step(ages, outcomes):
    """Advance the per-hop ages by one sampling period."""
    if len(ages) != len(outcomes) + 1:
        raise ValueError(
            f"Need one age per node ({len(outcomes) + 1}), got {len(ages)}."
        )
    if ages[0] != 0:
        raise ValueError(f"The source age is always 0, got {ages[0]}.")
    updated = [0]
    for n, success in enumerate(outcomes, start=1):
        updated.append(updated[n - 1] if success else ages[n] + 1)
    return tuple(updated)


def trajectory(outcomes, initial=None):
    """Ages of every node for a whole (periods x N) matrix of link outcomes.

    Row k of the result equals ``step`` applied k + 1 times from ``initial``
    (all zeros by default). Link n's age in period k is the upstream age in
    the last period L <= k it succeeded, plus k - L; before its first success
    it is ``initial[n] + k + 1``.
    """
    outcomes = np.asarray(outcomes, dtype=bool)
    periods, hops = outcomes.shape
    initial = np.zeros(hops + 1, dtype=np.int64) if initial is None else np.asarray(initial, dtype=np.int64)
    if initial.shape != (hops + 1,) or initial[0] != 0:
        raise ValueError("initial must hold one age per node with the source at 0.")

    ages = np.zeros((periods, hops + 1), dtype=np.int64)
    k = np.arange(periods, dtype=np.int64)
    for n in range(1, hops + 1):
        last = np.where(outcomes[:, n - 1], k, -1)
        np.maximum.accumulate(last, out=last)
        seen = last >= 0
        upstream = np.where(seen, ages[np.maximum(last, 0), n - 1], initial[n])
        ages[:, n] = upstream + (k - last)
    return ages


def draw_outcomes(path: PathConfig, periods, seed, repetition):
    """Success flags, shape (periods, N), for one repetition of a run."""
    sequence = np.random.SeedSequence(seed, spawn_key=(repetition,))
    rng = np.random.default_rng(sequence)
    uniforms = rng.random((periods, path.hops))
    return uniforms >= np.asarray(path.loss_probs)


def _run_repetition(config: SimConfig, repetition):
    outcomes = draw_outcomes(config.path, config.periods, config.seed, repetition)
    receiver = trajectory(outcomes)[:, -1]

    previous = np.empty_like(receiver)
    previous[0] = 0
    previous[1:] = receiver[:-1]
    recorded = slice(config.warmup, None)
    samples = receiver[recorded]
    # the receiver's age jumps anywhere but +1 only when an update arrives
    reset = (receiver != previous + 1)[recorded]
    peaks = (previous + 1)[recorded][reset]

    logger.debug(
        "repetition %d: mean age %.4f, %d deliveries", repetition, samples.mean(), peaks.size
    )
    return (
        np.bincount(samples),
        float(samples.mean()),
        float(peaks.mean()) if peaks.size else None,
        int(peaks.size),
    )


def _estimate(values):
    values = np.asarray(values, dtype=np.float64)
    sd = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return Estimate(float(values.mean()), sd)


def resolve_threads(threads=None):
    if threads is None:
        threads = settings.AOI_THREADS
    if threads is None:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ValueError(f"threads must be at least 1, got {threads}.")
    return threads


def run(config: SimConfig, threads=None) -> SimResult:
    """Simulate every repetition and pool the receiver statistics.

    Repetitions run on up to ``threads`` workers; results are merged by
    repetition index, so the outcome is identical for any worker count.
    """
    workers = min(resolve_threads(threads), config.repetitions)
    repetitions = range(config.repetitions)
    if workers == 1:
        outputs = [_run_repetition(config, r) for r in repetitions]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(lambda r: _run_repetition(config, r), repetitions))

    width = max(counts.size for counts, *_ in outputs)
    pooled = np.zeros(width, dtype=np.int64)
    for counts, *_ in outputs:
        pooled[: counts.size] += counts

    peak_means = [peak for _, _, peak, _ in outputs if peak is not None]
    result = SimResult(
        config=config,
        empirical=EmpiricalDist(pooled),
        mean_age=_estimate([mean for _, mean, _, _ in outputs]),
        mean_peak_age=_estimate(peak_means) if peak_means else None,
        deliveries=sum(count for *_, count in outputs),
    )
    logger.info(
        "simulated %s: %d repetitions x %d periods, mean age %.4f",
        config.path.loss_probs, config.repetitions, config.periods, result.mean_age.mean,
    )
    return result

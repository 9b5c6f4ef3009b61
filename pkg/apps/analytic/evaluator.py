"""Stationary age distribution of an N-hop line network.

The age behind hop n is the age behind hop n - 1 plus an independent
geometric number of failed periods on link n, so its PMF obeys

    f_n(d) = p_n f_n(d - 1) + (1 - p_n) f_(n-1)(d),    f_0 = [1, 0, 0, ...]

which is a first-order IIR filter applied once per link. The mass above the
horizon D follows the same pattern without any subtraction:

    S_n(D) = S_(n-1)(D) + p_n / (1 - p_n) * f_n(D),    S_0(D) = 0
"""
import logging
import math

import numpy as np
from django.conf import settings
from scipy.signal import lfilter

from apps.core.exceptions import HorizonOverflow
from apps.core.types import AgePmf, PathConfig

logger = logging.getLogger(__name__)


def _source_impulse(delta_max):
    if delta_max < 0:
        raise ValueError(f"delta_max must be non-negative, got {delta_max}.")
    impulse = np.zeros(delta_max + 1)
    impulse[0] = 1.0
    return impulse


def pmf_dp(path: PathConfig, delta_max) -> AgePmf:
    """Exact PMF for ages 0..delta_max in O(N * delta_max)."""
    probs = _source_impulse(delta_max)
    tail = 0.0
    for p in path.loss_probs:
        probs = lfilter([1.0 - p], [1.0, -p], probs)
        tail += p / (1.0 - p) * probs[-1]
    return AgePmf(probs, tail)


def geometric_pmf(p, delta_max):
    """(1 - p) p^d for d = 0..delta_max, powers as a running product."""
    powers = np.ones(delta_max + 1)
    if delta_max > 0:
        powers[1:] = np.cumprod(np.full(delta_max, p))
    return (1.0 - p) * powers


def pmf_convolution(path: PathConfig, delta_max) -> AgePmf:
    """Same distribution by explicit convolution of per-link geometric PMFs."""
    probs = _source_impulse(delta_max)
    for p in path.loss_probs:
        probs = np.convolve(probs, geometric_pmf(p, delta_max))[: delta_max + 1]
    return AgePmf(probs, max(0.0, 1.0 - math.fsum(probs)))


def pmf_auto_truncate(path: PathConfig, tail_tol=None, horizon_cap=None, horizon_start=None) -> AgePmf:
    """pmf_dp at the first probed horizon whose tail mass drops below ``tail_tol``.

    Probes 0 first, then ``horizon_start`` doubling; the tail decays
    geometrically at rate max(p), so only O(log) probes are needed.
    """
    tail_tol = settings.AOI_TAIL_TOL if tail_tol is None else tail_tol
    horizon_cap = settings.AOI_HORIZON_CAP if horizon_cap is None else horizon_cap
    horizon_start = settings.AOI_HORIZON_START if horizon_start is None else horizon_start
    if not 0.0 < tail_tol < 1.0:
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol!r}.")
    if horizon_start < 1:
        raise ValueError(f"horizon_start must be at least 1, got {horizon_start!r}.")

    horizon = 0
    while True:
        pmf = pmf_dp(path, horizon)
        logger.debug("probe horizon=%d tail_mass=%.3e", horizon, pmf.tail_mass)
        if pmf.tail_mass < tail_tol:
            return pmf
        horizon = horizon_start if horizon == 0 else 2 * horizon
        if horizon > horizon_cap:
            raise HorizonOverflow(horizon, horizon_cap)


def expected_age(path: PathConfig, hops=None):
    """Mean age at hop ``hops`` (the receiver by default): sum of p_i / (1 - p_i)."""
    if hops is not None:
        path = path.prefix(hops)
    return math.fsum(p / (1.0 - p) for p in path.loss_probs)

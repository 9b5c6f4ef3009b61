"""Closed-form PMFs for one, two and three hops.

These are cross-checks for :func:`apps.analytic.evaluator.pmf_dp`, which is the
evaluator to use in production: the two- and three-hop forms divide by gaps
between loss probabilities and are only guarded, not stabilized.
"""
from apps.core.exceptions import DegenerateRates

EQUAL_RATE_EPS = 1e-9


def _check_age(delta):
    if delta < 0:
        raise ValueError(f"Age must be non-negative, got {delta}.")


def pmf_single_hop(p, delta):
    """Pr[age = delta] behind one link: delta failures after a success."""
    _check_age(delta)
    return (1.0 - p) * p**delta


def pmf_two_hop_closed(p1, p2, delta):
    _check_age(delta)
    if abs(p1 - p2) <= EQUAL_RATE_EPS:
        # repeated rate: the sum over the first hop's age has delta + 1 equal terms
        p = 0.5 * (p1 + p2)
        return (delta + 1) * (1.0 - p) ** 2 * p**delta
    return (
        (1.0 - p1) * (1.0 - p2)
        * (p2 ** (delta + 1) - p1 ** (delta + 1))
        / (p2 - p1)
    )


def pmf_three_hop_closed(p1, p2, p3, delta):
    """Three-hop PMF; raises DegenerateRates when two loss probabilities coincide."""
    _check_age(delta)
    probs = (p1, p2, p3)
    for i in range(3):
        for j in range(i + 1, 3):
            if abs(probs[i] - probs[j]) <= EQUAL_RATE_EPS:
                raise DegenerateRates(
                    f"Links {i + 1} and {j + 1} share loss probability "
                    f"{probs[i]!r}; use pmf_dp instead."
                )

    scale = (1.0 - p1) * (1.0 - p2) * (1.0 - p3) / (p2 - p1)
    head = p3 ** (delta + 1)
    total = 0.0
    for sign, pj in ((-1.0, p1), (1.0, p2)):
        total += sign * pj * (head - pj ** (delta + 1)) / (p3 - pj)
    return scale * total

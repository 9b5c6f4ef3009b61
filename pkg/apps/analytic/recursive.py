"""Recursive age function, evaluated as written but with subproblem reuse.

f(d, 1) = (1 - p_1) p_1^d
f(d, n) = sum over d' in 0..d of (1 - p_n) p_n^(d - d') f(d', n - 1)

Without a memo this recursion is exponential in n; the linear-in-table cost
only holds once every (d, n) pair is computed a single time, which is what
:class:`RecursiveAgeFunction` does. Each entry still costs O(d), so filling
the table up to age D is O(n D^2). :func:`apps.analytic.evaluator.pmf_dp` is
the O(n D) evaluator.
"""
from apps.core.types import PathConfig


class RecursiveAgeFunction:
    """Memoized evaluator of Pr[age at hop n = d] for one path.

    The memo is private to the instance; reuse one instance to evaluate many
    ages of the same path cheaply.
    """

    def __init__(self, path: PathConfig):
        self.path = path
        self._memo = {}
        self._first_hop = [1.0 - path.loss_probs[0]]

    def __call__(self, delta, hops=None):
        if delta < 0:
            raise ValueError(f"Age must be non-negative, got {delta}.")
        hops = self.path.hops if hops is None else hops
        if not 1 <= hops <= self.path.hops:
            raise ValueError(f"Hop must lie in 1..{self.path.hops}, got {hops}.")
        return self._f(delta, hops)

    def _f(self, delta, n):
        if n == 1:
            # running product instead of p ** delta
            table = self._first_hop
            p = self.path.loss_probs[0]
            while len(table) <= delta:
                table.append(table[-1] * p)
            return table[delta]

        key = (delta, n)
        cached = self._memo.get(key)
        if cached is not None:
            return cached

        p = self.path.loss_probs[n - 1]
        value = 0.0
        weight = 1.0 - p
        for prev in range(delta, -1, -1):
            value += weight * self._f(prev, n - 1)
            weight *= p
        self._memo[key] = value
        return value


def pmf_recursive_literal(delta, path: PathConfig):
    return RecursiveAgeFunction(path)(delta)

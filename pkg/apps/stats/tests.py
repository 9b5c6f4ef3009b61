import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from apps.core.exceptions import EmptySample
from apps.core.types import AgePmf, PathConfig
from apps.simulator.engine import run
from apps.simulator.types import EmpiricalDist, SimConfig
from apps.stats.comparison import (
    ComparisonReport,
    compare,
    fold_to_horizon,
    normalize,
    total_variation,
)

S1 = PathConfig((0.9, 0.4, 0.4))
S2 = PathConfig((0.8, 0.7, 0.8))


@st.composite
def age_pmfs(draw):
    weights = draw(st.lists(st.integers(min_value=0, max_value=100), min_size=1, max_size=12))
    tail = draw(st.integers(min_value=0, max_value=20))
    total = sum(weights) + tail
    if total == 0:
        return AgePmf([1.0])
    return AgePmf(np.asarray(weights, dtype=np.float64) / total, tail / total)


class NormalizeTests(SimpleTestCase):
    def test_frequencies(self):
        pmf = normalize(EmpiricalDist.from_mapping({0: 1, 2: 3}))
        np.testing.assert_array_equal(pmf.probs, [0.25, 0.0, 0.75])
        self.assertEqual(pmf.tail_mass, 0.0)

    def test_trailing_zeros_are_dropped(self):
        self.assertEqual(normalize(EmpiricalDist([4, 0, 0])).delta_max, 0)

    def test_empty_sample(self):
        with self.assertRaises(EmptySample):
            normalize(EmpiricalDist())
        with self.assertRaises(EmptySample):
            normalize(EmpiricalDist([0, 0]))


class TotalVariationTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(total_variation(AgePmf([1.0]), AgePmf([1.0])), 0.0)
        self.assertEqual(total_variation(AgePmf([1.0]), AgePmf([0.0, 1.0])), 1.0)
        self.assertEqual(total_variation(AgePmf([0.5, 0.5]), AgePmf([0.75, 0.25])), 0.25)

    def test_tail_mass_counts_as_an_atom(self):
        self.assertEqual(total_variation(AgePmf([0.5], 0.5), AgePmf([1.0])), 0.5)

    @settings(max_examples=200)
    @given(age_pmfs(), age_pmfs())
    def test_symmetric_and_bounded(self, a, b):
        distance = total_variation(a, b)
        self.assertEqual(distance, total_variation(b, a))
        self.assertGreaterEqual(distance, 0.0)
        self.assertLessEqual(distance, 1.0)
        self.assertEqual(total_variation(a, a), 0.0)

    @settings(max_examples=200)
    @given(age_pmfs(), age_pmfs(), age_pmfs())
    def test_triangle_inequality(self, a, b, c):
        self.assertLessEqual(
            total_variation(a, c), total_variation(a, b) + total_variation(b, c) + 1e-12
        )


class FoldTests(SimpleTestCase):
    def test_folds_excess_into_tail(self):
        folded = fold_to_horizon(AgePmf([0.5, 0.25, 0.125], 0.125), 1)
        np.testing.assert_array_equal(folded.probs, [0.5, 0.25])
        self.assertEqual(folded.tail_mass, 0.25)

    def test_short_pmf_is_unchanged(self):
        pmf = AgePmf([1.0])
        self.assertIs(fold_to_horizon(pmf, 5), pmf)


class CompareTests(SimpleTestCase):
    def test_lossless(self):
        path = PathConfig((0.0, 0.0))
        report = compare(path, run(SimConfig(path, periods=100, repetitions=2), threads=1))
        self.assertEqual(report.tv_distance, 0.0)
        self.assertEqual(report.mean_gap, 0.0)
        self.assertEqual(report.sample_count, 200)
        self.assertEqual(report.per_age_residuals[0].difference, 0.0)

    def test_report_validation(self):
        with self.assertRaises(ValueError):
            ComparisonReport(1.5, 0.0, (), 10)
        with self.assertRaises(ValueError):
            ComparisonReport(0.1, 0.0, (), 0)


class ScenarioAgreementTests(SimpleTestCase):
    """Simulation and analysis agree on both scenarios at 10^7 samples each."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.first = run(SimConfig(S1, periods=100_000, repetitions=100, seed=21))
        cls.second = run(SimConfig(S2, periods=100_000, repetitions=100, seed=22))

    def test_first_scenario(self):
        report = compare(S1, self.first)
        self.assertLess(report.tv_distance, 0.01)
        self.assertLess(report.mean_gap, 0.1)
        self.assertEqual(report.sample_count, 10_000_000)

    def test_second_scenario(self):
        report = compare(S2, self.second)
        self.assertLess(report.tv_distance, 0.01)
        self.assertLess(report.mean_gap, 0.1)

    def test_sampling_noise_dominates(self):
        # two independent simulations sit about as far apart as each sits from the analysis
        other = run(SimConfig(S1, periods=100_000, repetitions=100, seed=23))
        between = total_variation(normalize(self.first.empirical), normalize(other.empirical))
        to_analysis = compare(S1, self.first).tv_distance
        self.assertLess(to_analysis, 10 * between)
        self.assertLess(between, 10 * to_analysis)

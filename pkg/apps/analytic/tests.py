import itertools
import time

import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from apps.analytic.closed_forms import pmf_single_hop, pmf_three_hop_closed, pmf_two_hop_closed
from apps.analytic.evaluator import (
    expected_age,
    geometric_pmf,
    pmf_auto_truncate,
    pmf_convolution,
    pmf_dp,
)
from apps.analytic.quantiles import QuantileQuery, ccdf, cdf, icdf, quantiles_of
from apps.analytic.recursive import RecursiveAgeFunction, pmf_recursive_literal
from apps.core.exceptions import DegenerateRates, HorizonOverflow, OutOfHorizon
from apps.core.types import PathConfig, pmf_mean

S1 = PathConfig((0.9, 0.4, 0.4))
S2 = PathConfig((0.8, 0.7, 0.8))

# Frozen from pmf_dp; eps = 1e-1 .. 1e-5.
S1_ICDF = [23, 45, 67, 88, 110]
S2_ICDF = [20, 32, 44, 55, 67]
CCDF_CROSSOVER = 13

# zero or bounded away from underflow so relative comparisons stay meaningful
loss_probs = st.one_of(st.just(0.0), st.floats(min_value=1e-3, max_value=0.95))
paths = st.lists(loss_probs, min_size=1, max_size=5).map(lambda probs: PathConfig(tuple(probs)))


def well_separated(probs, gap=0.05):
    return all(abs(a - b) > gap for a, b in itertools.combinations(probs, 2))


class ClosedFormTests(SimpleTestCase):
    def test_single_hop(self):
        self.assertEqual(pmf_single_hop(0.5, 3), 0.0625)
        self.assertEqual(pmf_single_hop(0.0, 0), 1.0)
        self.assertEqual(pmf_single_hop(0.0, 4), 0.0)

    def test_two_hop(self):
        self.assertAlmostEqual(pmf_two_hop_closed(0.5, 0.25, 1), 0.28125, delta=1e-15)
        self.assertAlmostEqual(pmf_two_hop_closed(0.5, 0.5, 2), 0.1875, delta=1e-15)
        self.assertEqual(pmf_two_hop_closed(0.0, 0.0, 0), 1.0)

    def test_two_hop_equal_rate_branch_is_continuous(self):
        near = pmf_two_hop_closed(0.5, 0.5 + 1e-10, 9)
        exact = pmf_two_hop_closed(0.5, 0.5, 9)
        self.assertAlmostEqual(near, exact, delta=1e-9)

    def test_three_hop(self):
        self.assertAlmostEqual(pmf_three_hop_closed(0.2, 0.5, 0.8, 0), 0.08, delta=1e-15)
        dp = pmf_dp(PathConfig((0.2, 0.5, 0.8)), 5).probs[5]
        self.assertAlmostEqual(pmf_three_hop_closed(0.2, 0.5, 0.8, 5) / dp, 1.0, delta=1e-12)

    def test_three_hop_rejects_repeated_rates(self):
        for delta in (0, 7):
            with self.assertRaises(DegenerateRates):
                pmf_three_hop_closed(*S1.loss_probs, delta)

    def test_negative_age(self):
        with self.assertRaises(ValueError):
            pmf_single_hop(0.5, -1)


class RecursiveLiteralTests(SimpleTestCase):
    def test_examples(self):
        self.assertAlmostEqual(pmf_recursive_literal(0, S1), 0.036, delta=1e-15)
        self.assertEqual(pmf_recursive_literal(3, PathConfig((0.5,))), 0.0625)
        literal = pmf_recursive_literal(7, PathConfig((0.5, 0.25)))
        self.assertAlmostEqual(literal / pmf_two_hop_closed(0.5, 0.25, 7), 1.0, delta=1e-12)

    def test_intermediate_hops(self):
        f = RecursiveAgeFunction(S1)
        self.assertAlmostEqual(f(2, hops=1), pmf_single_hop(0.9, 2), delta=1e-15)
        with self.assertRaises(ValueError):
            f(2, hops=4)

    def test_deep_ages_finish_quickly(self):
        path = PathConfig((0.9, 0.8, 0.7, 0.6, 0.5))
        start = time.perf_counter()
        value = pmf_recursive_literal(500, path)
        self.assertLess(time.perf_counter() - start, 5.0)
        self.assertAlmostEqual(value / pmf_dp(path, 500).probs[500], 1.0, delta=1e-12)


class DpTests(SimpleTestCase):
    def test_lossless_path(self):
        pmf = pmf_dp(PathConfig((0.0, 0.0, 0.0)), 5)
        np.testing.assert_array_equal(pmf.probs, [1, 0, 0, 0, 0, 0])
        self.assertEqual(pmf.tail_mass, 0.0)

    def test_horizon_zero(self):
        pmf = pmf_dp(S1, 0)
        self.assertEqual(pmf.delta_max, 0)
        self.assertAlmostEqual(pmf.probs[0], 0.036, delta=1e-15)
        self.assertAlmostEqual(pmf.tail_mass, 0.964, delta=1e-15)

    def test_second_scenario_mean(self):
        pmf = pmf_dp(S2, 300)
        self.assertAlmostEqual(pmf_mean(pmf, S2.max_loss).value, 31 / 3, delta=1e-6)

    def test_convolution_oracle_small_case(self):
        path = PathConfig((0.5, 0.25))
        np.testing.assert_allclose(
            pmf_dp(path, 20).probs,
            [pmf_two_hop_closed(0.5, 0.25, d) for d in range(21)],
            rtol=1e-12,
        )

    def test_geometric_pmf(self):
        np.testing.assert_allclose(geometric_pmf(0.5, 3), [0.5, 0.25, 0.125, 0.0625])
        np.testing.assert_array_equal(geometric_pmf(0.3, 0), [0.7])

    def test_large_table_is_fast(self):
        path = PathConfig(tuple(np.linspace(0.05, 0.95, 10)))
        pmf_dp(path, 100)
        start = time.perf_counter()
        pmf = pmf_dp(path, 10_000)
        self.assertLess(time.perf_counter() - start, 0.1)
        self.assertTrue(pmf.is_normalized())


class AutoTruncateTests(SimpleTestCase):
    def test_single_hop(self):
        pmf = pmf_auto_truncate(PathConfig((0.5,)), 1e-12)
        self.assertLessEqual(pmf.delta_max, 64)
        self.assertLess(pmf.tail_mass, 1e-12)

    def test_lossless_stops_at_first_probe(self):
        pmf = pmf_auto_truncate(PathConfig((0.0, 0.0)), 1e-3)
        self.assertEqual(pmf.delta_max, 0)
        self.assertEqual(pmf.tail_mass, 0.0)

    def test_first_scenario(self):
        pmf = pmf_auto_truncate(S1, 1e-12)
        self.assertLess(pmf.tail_mass, 1e-12)
        self.assertTrue(pmf.is_normalized())

    def test_horizon_cap(self):
        with self.assertRaises(HorizonOverflow) as ctx:
            pmf_auto_truncate(PathConfig((0.99,)), 1e-12, horizon_cap=1000)
        self.assertEqual(ctx.exception.cap, 1000)

    @override_settings(AOI_HORIZON_CAP=100)
    def test_horizon_cap_from_settings(self):
        with self.assertRaises(HorizonOverflow):
            pmf_auto_truncate(PathConfig((0.99,)), 1e-12)

    def test_rejects_non_positive_start(self):
        for start in (0, -64):
            with self.subTest(start=start), self.assertRaises(ValueError):
                pmf_auto_truncate(PathConfig((0.5,)), 1e-12, horizon_start=start)

    @override_settings(AOI_HORIZON_START=0)
    def test_rejects_zero_start_from_settings(self):
        with self.assertRaises(ValueError):
            pmf_auto_truncate(PathConfig((0.5,)), 1e-12)

    def test_rejects_bad_tolerance(self):
        for tol in (0.0, 1.0, -1e-3):
            with self.subTest(tol=tol), self.assertRaises(ValueError):
                pmf_auto_truncate(S1, tol)


class ExpectedAgeTests(SimpleTestCase):
    def test_scenarios_tie(self):
        self.assertAlmostEqual(expected_age(S1), 31 / 3, delta=1e-12)
        self.assertAlmostEqual(expected_age(S2), 31 / 3, delta=1e-12)

    def test_single_hop(self):
        self.assertEqual(expected_age(PathConfig((0.5,))), 1.0)

    def test_two_hop(self):
        self.assertAlmostEqual(expected_age(PathConfig((0.5, 0.25))), 1.0 + 1.0 / 3.0, delta=1e-15)

    def test_intermediate_hop(self):
        self.assertAlmostEqual(expected_age(S1, hops=1), 9.0, delta=1e-12)


class QuantileTests(SimpleTestCase):
    def test_ccdf(self):
        pmf = pmf_auto_truncate(PathConfig((0.5,)), 1e-12)
        self.assertAlmostEqual(ccdf(pmf, 2), 0.125, delta=1e-15)
        self.assertAlmostEqual(cdf(pmf, 2), 0.875, delta=1e-15)
        self.assertEqual(ccdf(pmf, pmf.delta_max), pmf.tail_mass)
        self.assertEqual(ccdf(pmf_dp(PathConfig((0.0,)), 0), 0), 0.0)

    def test_ccdf_beyond_horizon(self):
        pmf = pmf_dp(S1, 10)
        with self.assertRaises(OutOfHorizon):
            ccdf(pmf, 11)

    def test_icdf_examples(self):
        self.assertEqual(icdf(PathConfig((0.5,)), QuantileQuery((0.125,))), [2])
        self.assertEqual(icdf(PathConfig((0.0,)), QuantileQuery()), [0, 0, 0, 0, 0])

    def test_query_validation(self):
        for targets in ((), (0.0,), (1.0,), (0.1, 2.0)):
            with self.subTest(targets=targets), self.assertRaises(ValueError):
                QuantileQuery(targets)
        self.assertAlmostEqual(QuantileQuery((1e-5,)).tail_tol, 1e-7, delta=1e-20)

    def test_quantile_below_tail_mass(self):
        with self.assertRaises(OutOfHorizon):
            quantiles_of(pmf_dp(S1, 5), [1e-3])

    def test_golden_reliability_levels(self):
        query = QuantileQuery()
        self.assertEqual(icdf(S1, query), S1_ICDF)
        self.assertEqual(icdf(S2, query), S2_ICDF)

    def test_reliability_gap_at_five_nines(self):
        query = QuantileQuery((1e-5,))
        gap = icdf(S1, query)[0] - icdf(S2, query)[0]
        self.assertEqual(gap, 43)
        self.assertTrue(15 <= gap <= 50)

    def test_heavier_tail_beyond_crossover(self):
        first = pmf_dp(S1, 300).survival()
        second = pmf_dp(S2, 300).survival()
        self.assertLess(first[CCDF_CROSSOVER - 1], second[CCDF_CROSSOVER - 1])
        for delta in range(CCDF_CROSSOVER, 300):
            self.assertGreater(first[delta], second[delta], msg=f"age {delta}")


class OracleEquivalenceTests(SimpleTestCase):
    @settings(max_examples=100, deadline=None)
    @given(paths)
    def test_dp_matches_recursive_literal(self, path):
        f = RecursiveAgeFunction(path)
        literal = [f(d) for d in range(61)]
        np.testing.assert_allclose(pmf_dp(path, 60).probs, literal, rtol=1e-12, atol=0)

    @settings(max_examples=100, deadline=None)
    @given(st.tuples(loss_probs, loss_probs))
    def test_dp_matches_two_hop_closed_form(self, probs):
        assume(well_separated(probs))
        closed = [pmf_two_hop_closed(*probs, d) for d in range(61)]
        dp = pmf_dp(PathConfig(probs), 60).probs
        np.testing.assert_allclose(dp, closed, rtol=1e-9, atol=0)

    @settings(max_examples=100, deadline=None)
    @given(st.tuples(loss_probs, loss_probs, loss_probs))
    def test_dp_matches_three_hop_closed_form(self, probs):
        assume(well_separated(probs))
        closed = [pmf_three_hop_closed(*probs, d) for d in range(61)]
        path = PathConfig(probs)
        np.testing.assert_allclose(pmf_dp(path, 60).probs, closed, rtol=1e-9, atol=0)
        literal = RecursiveAgeFunction(path)
        np.testing.assert_allclose([literal(d) for d in range(61)], closed, rtol=1e-9, atol=0)

    @settings(max_examples=100, deadline=None)
    @given(paths)
    def test_dp_matches_convolution(self, path):
        np.testing.assert_allclose(
            pmf_dp(path, 60).probs, pmf_convolution(path, 60).probs, rtol=1e-12, atol=0
        )

    @settings(max_examples=100, deadline=None)
    @given(paths)
    def test_appending_a_hop_convolves_with_its_geometric(self, path):
        assume(path.hops >= 2)
        head = pmf_dp(path.prefix(path.hops - 1), 60).probs
        expected = np.convolve(head, geometric_pmf(path.loss_probs[-1], 60))[:61]
        np.testing.assert_allclose(pmf_dp(path, 60).probs, expected, rtol=1e-12, atol=0)


class DistributionPropertyTests(SimpleTestCase):
    @settings(max_examples=100, deadline=None)
    @given(paths, st.randoms(use_true_random=False))
    def test_permutation_symmetry(self, path, rng):
        shuffled = list(path.loss_probs)
        rng.shuffle(shuffled)
        np.testing.assert_allclose(
            pmf_dp(PathConfig(tuple(shuffled)), 60).probs, pmf_dp(path, 60).probs,
            rtol=1e-12, atol=0,
        )

    @settings(max_examples=200, deadline=None)
    @given(paths)
    def test_tail_corrected_mean_matches_closed_form(self, path):
        pmf = pmf_auto_truncate(path, 1e-12)
        self.assertAlmostEqual(pmf_mean(pmf, path.max_loss).value, expected_age(path), delta=1e-6)

    @settings(max_examples=100, deadline=None)
    @given(paths)
    def test_age_never_drops_along_the_path(self, path):
        previous = np.zeros(61)
        for hops in range(1, path.hops + 1):
            survival = pmf_dp(path.prefix(hops), 60).survival()
            self.assertTrue(np.all(survival >= previous - 1e-12))
            previous = survival

    @settings(max_examples=100, deadline=None)
    @given(paths, st.data())
    def test_more_loss_never_lowers_the_tail(self, path, data):
        index = data.draw(st.integers(min_value=0, max_value=path.hops - 1))
        probs = list(path.loss_probs)
        probs[index] = data.draw(st.floats(min_value=probs[index], max_value=0.95))
        worse = pmf_dp(PathConfig(tuple(probs)), 60).survival()
        self.assertTrue(np.all(worse >= pmf_dp(path, 60).survival() - 1e-12))

    @settings(max_examples=100, deadline=None)
    @given(paths, st.floats(min_value=1e-6, max_value=0.5))
    def test_icdf_ccdf_round_trip(self, path, eps):
        query = QuantileQuery((eps,))
        [age] = icdf(path, query)
        pmf = pmf_auto_truncate(path, query.tail_tol)
        self.assertLessEqual(ccdf(pmf, age), eps)
        if age >= 1:
            self.assertGreater(ccdf(pmf, age - 1), eps)

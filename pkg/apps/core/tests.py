import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from apps.analytic.evaluator import pmf_auto_truncate, pmf_dp
from apps.core.exceptions import (
    EmptyPath,
    InfeasibleSchedule,
    InvalidPath,
    ProbOutOfRange,
    UnnormalizedPmf,
)
from apps.core.types import AgePmf, LinkBudget, PathConfig, pmf_mean
from apps.core.validation import merge_path_slots, merge_slots, validate_path

S1 = (0.9, 0.4, 0.4)


class ValidatePathTests(SimpleTestCase):
    def test_accepts_first_scenario(self):
        path = validate_path(S1)
        self.assertEqual(path.hops, 3)
        self.assertEqual(path.loss_probs, S1)
        self.assertIsNone(path.slots_per_period)

    def test_rejects_certain_loss(self):
        with self.assertRaises(ProbOutOfRange) as ctx:
            validate_path((0.5, 1.0))
        self.assertEqual(ctx.exception.index, 1)

    def test_rejects_too_few_slots(self):
        with self.assertRaises(InfeasibleSchedule):
            validate_path((0.5, 0.5, 0.5), slots_per_period=2)

    def test_accepts_exactly_one_slot_per_link(self):
        self.assertEqual(validate_path((0.5, 0.5), slots_per_period=2).slots_per_period, 2)

    def test_rejects_empty_path(self):
        with self.assertRaises(EmptyPath):
            validate_path(())
        with self.assertRaises(EmptyPath):
            validate_path(None)

    def test_rejects_garbage_entries(self):
        for raw in ([-0.1], [float("nan")], ["abc"], [None], [True]):
            with self.subTest(raw=raw), self.assertRaises(ProbOutOfRange):
                validate_path(raw)

    def test_rejects_non_sequence(self):
        with self.assertRaises(InvalidPath):
            validate_path("0.5")

    def test_accepts_numeric_strings_and_numpy_scalars(self):
        path = validate_path(["0.25", np.float64(0.5)])
        self.assertEqual(path.loss_probs, (0.25, 0.5))

    @given(
        st.lists(st.floats(allow_nan=True, allow_infinity=True), max_size=6),
        st.one_of(st.none(), st.integers(min_value=-3, max_value=8)),
    )
    def test_is_total(self, raw, slots):
        try:
            path = validate_path(raw, slots)
        except InvalidPath:
            return
        self.assertGreaterEqual(path.hops, 1)
        self.assertTrue(all(0.0 <= p < 1.0 for p in path.loss_probs))
        if slots is not None:
            self.assertGreaterEqual(slots, path.hops)

    def test_prefix(self):
        path = validate_path(S1)
        self.assertEqual(path.prefix(2).loss_probs, (0.9, 0.4))
        with self.assertRaises(InvalidPath):
            path.prefix(4)


class MergeSlotsTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(merge_slots(LinkBudget(0.5, 3)), 0.125)
        self.assertEqual(merge_slots(LinkBudget(0.7, 1)), 0.7)
        self.assertEqual(merge_slots(LinkBudget(0.0, 5)), 0.0)

    def test_budget_invariants(self):
        with self.assertRaises(ProbOutOfRange):
            LinkBudget(1.0, 2)
        with self.assertRaises(InvalidPath):
            LinkBudget(0.5, 0)

    @given(st.floats(min_value=1e-6, max_value=1 - 1e-6), st.integers(min_value=1, max_value=40))
    def test_monotone_decreasing_in_slot_count(self, p_star, slots):
        self.assertLessEqual(
            merge_slots(LinkBudget(p_star, slots + 1)), merge_slots(LinkBudget(p_star, slots))
        )

    def test_merges_whole_path(self):
        path = merge_path_slots([0.5, 0.9], [3, 1], slots_per_period=7)
        self.assertEqual(path.loss_probs, (0.125, 0.9))

    def test_rejects_more_slots_than_a_period_holds(self):
        with self.assertRaises(InfeasibleSchedule):
            merge_path_slots([0.5, 0.5, 0.5], [3, 3, 2], slots_per_period=7)

    def test_rejects_mismatched_lengths(self):
        with self.assertRaises(InvalidPath):
            merge_path_slots([0.5, 0.5], [2])


class AgePmfTests(SimpleTestCase):
    def test_arrays_are_read_only(self):
        pmf = AgePmf([0.5, 0.25], 0.25)
        with self.assertRaises(ValueError):
            pmf.probs[0] = 1.0
        with self.assertRaises(ValueError):
            pmf.survival()[0] = 1.0

    def test_rejects_invalid_entries(self):
        with self.assertRaises(ValueError):
            AgePmf([1.5])
        with self.assertRaises(ValueError):
            AgePmf([0.5], -0.1)
        with self.assertRaises(ValueError):
            AgePmf([])

    def test_rejects_nan(self):
        nan = float("nan")
        for probs, tail in (([nan], 0.0), ([0.5, nan], 0.5), ([1.0], nan)):
            with self.subTest(probs=probs, tail=tail), self.assertRaises(ValueError):
                AgePmf(probs, tail)

    def test_rejects_missing_or_excess_mass(self):
        with self.assertRaises(UnnormalizedPmf) as ctx:
            AgePmf([0.5, 0.25])
        self.assertAlmostEqual(ctx.exception.error, 0.25)
        with self.assertRaises(UnnormalizedPmf):
            AgePmf([0.75, 0.5], 0.0)
        with self.assertRaises(UnnormalizedPmf):
            AgePmf([0.5, 0.25], 0.25 + 1e-9)

    def test_survival(self):
        pmf = AgePmf([0.5, 0.25, 0.125], 0.125)
        np.testing.assert_allclose(pmf.survival(), [0.5, 0.25, 0.125])
        np.testing.assert_allclose(pmf.cdf(), [0.5, 0.75, 0.875])
        self.assertTrue(pmf.is_normalized())

    def test_padded(self):
        pmf = AgePmf([1.0])
        np.testing.assert_array_equal(pmf.padded(3), [1.0, 0.0, 0.0, 0.0])
        self.assertIs(pmf.padded(0), pmf.probs)


class PmfMeanTests(SimpleTestCase):
    def test_degenerate(self):
        estimate = pmf_mean(AgePmf([1.0], 0.0), 0.0)
        self.assertEqual(estimate.value, 0.0)
        self.assertEqual(estimate.tail_correction, 0.0)

    def test_single_hop_tail_correction_is_exact(self):
        pmf = pmf_dp(PathConfig((0.5,)), 60)
        estimate = pmf_mean(pmf, 0.5)
        self.assertAlmostEqual(estimate.value, 1.0, delta=1e-12)
        self.assertAlmostEqual(estimate.tail_correction, 62 * 0.5**61, delta=1e-30)

    def test_first_scenario(self):
        path = PathConfig(S1)
        pmf = pmf_auto_truncate(path, 1e-12)
        self.assertLess(pmf.tail_mass, 1e-12)
        self.assertAlmostEqual(pmf_mean(pmf, path.max_loss).value, 31 / 3, delta=1e-6)

    def test_rejects_rate_of_one(self):
        with self.assertRaises(ValueError):
            pmf_mean(AgePmf([1.0]), 1.0)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=0.95), min_size=1, max_size=5),
           st.integers(min_value=0, max_value=200))
    def test_library_pmfs_are_normalized(self, probs, delta_max):
        pmf = pmf_dp(PathConfig(tuple(probs)), delta_max)
        self.assertLessEqual(pmf.normalization_error, 1e-12)
        self.assertFalse(math.isnan(pmf.tail_mass))

import math

import numpy as np
from django.db import models
from django.test import SimpleTestCase, TestCase, override_settings
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from apps.analytic.evaluator import expected_age
from apps.analytic.quantiles import QuantileQuery, icdf
from apps.core.exceptions import InvalidSimConfig
from apps.core.types import PathConfig
from apps.simulator import engine
from apps.simulator.models import SimulationRun
from apps.simulator.types import EmpiricalDist, SimConfig

S1 = PathConfig((0.9, 0.4, 0.4))
S2 = PathConfig((0.8, 0.7, 0.8))

outcome_matrices = st.integers(min_value=1, max_value=5).flatmap(
    lambda hops: arrays(bool, st.tuples(st.integers(min_value=1, max_value=60), st.just(hops)))
)


class StepTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(engine.step((0, 0, 0), (True, True)), (0, 0, 0))
        self.assertEqual(engine.step((0, 3, 5), (False, True)), (0, 4, 4))
        self.assertEqual(engine.step((0, 3, 5), (True, False)), (0, 0, 6))

    def test_rejects_mismatched_lengths(self):
        with self.assertRaises(ValueError):
            engine.step((0, 1), (True, True))

    def test_rejects_nonzero_source(self):
        with self.assertRaises(ValueError):
            engine.step((1, 0), (True,))


class TrajectoryTests(SimpleTestCase):
    @settings(max_examples=100, deadline=None)
    @given(outcome_matrices)
    def test_matches_iterated_step(self, outcomes):
        ages = (0,) * (outcomes.shape[1] + 1)
        expected = []
        for row in outcomes:
            ages = engine.step(ages, tuple(row))
            expected.append(ages)
        np.testing.assert_array_equal(engine.trajectory(outcomes), expected)

    @settings(max_examples=50, deadline=None)
    @given(outcome_matrices, st.data())
    def test_initial_state(self, outcomes, data):
        hops = outcomes.shape[1]
        initial = (0,) + tuple(
            data.draw(st.lists(st.integers(0, 50), min_size=hops, max_size=hops))
        )
        ages = initial
        for row in outcomes:
            ages = engine.step(ages, tuple(row))
        np.testing.assert_array_equal(engine.trajectory(outcomes, initial)[-1], ages)

    @settings(max_examples=100, deadline=None)
    @given(outcome_matrices)
    def test_age_never_drops_along_the_path(self, outcomes):
        ages = engine.trajectory(outcomes)
        self.assertTrue(np.all(np.diff(ages, axis=1) >= 0))
        self.assertTrue(np.all(ages[:, 0] == 0))

    def test_rejects_bad_initial(self):
        with self.assertRaises(ValueError):
            engine.trajectory(np.ones((3, 2), dtype=bool), initial=(1, 0, 0))


class SimConfigTests(SimpleTestCase):
    def test_rejects_invalid_values(self):
        cases = (
            dict(periods=0, repetitions=1),
            dict(periods=10, repetitions=0),
            dict(periods=10, repetitions=1, seed=-1),
            dict(periods=10, repetitions=1, seed=2**64),
            dict(periods=10, repetitions=1, warmup=10),
        )
        for kwargs in cases:
            with self.subTest(**kwargs), self.assertRaises(InvalidSimConfig):
                SimConfig(S1, **kwargs)

    def test_recorded_periods(self):
        config = SimConfig(S1, periods=100, repetitions=2, warmup=30)
        self.assertEqual(config.recorded_periods, 70)
        self.assertEqual(config.as_dict()["loss_probs"], [0.9, 0.4, 0.4])

    def test_empirical_from_mapping(self):
        emp = EmpiricalDist.from_mapping({0: 2, 3: 1})
        np.testing.assert_array_equal(emp.counts, [2, 0, 0, 1])
        self.assertEqual(emp.total, 3)
        self.assertEqual(emp.max_age, 3)
        self.assertEqual(emp.mean(), 1.0)
        self.assertEqual(emp.as_dict(), {0: 2, 3: 1})
        self.assertIsNone(EmpiricalDist().max_age)


class RunTests(SimpleTestCase):
    def test_lossless_path(self):
        config = SimConfig(PathConfig((0.0, 0.0)), periods=50, repetitions=3)
        result = engine.run(config, threads=1)
        self.assertEqual(result.empirical.as_dict(), {0: 150})
        self.assertEqual(result.mean_age, (0.0, 0.0))
        self.assertEqual(result.mean_peak_age, (1.0, 0.0))
        self.assertEqual(result.deliveries, 150)

    def test_same_seed_same_result(self):
        config = SimConfig(S1, periods=2000, repetitions=4, seed=42)
        first, second = engine.run(config, threads=1), engine.run(config, threads=1)
        np.testing.assert_array_equal(first.empirical.counts, second.empirical.counts)
        self.assertEqual(first.mean_age, second.mean_age)
        self.assertEqual(first.mean_peak_age, second.mean_peak_age)

    def test_thread_count_does_not_change_result(self):
        config = SimConfig(S1, periods=2000, repetitions=8, seed=7)
        serial, parallel = engine.run(config, threads=1), engine.run(config, threads=4)
        np.testing.assert_array_equal(serial.empirical.counts, parallel.empirical.counts)
        self.assertEqual(serial.mean_age, parallel.mean_age)
        self.assertEqual(serial.deliveries, parallel.deliveries)

    def test_different_seeds_differ(self):
        a = engine.run(SimConfig(S1, periods=2000, repetitions=2, seed=1), threads=1)
        b = engine.run(SimConfig(S1, periods=2000, repetitions=2, seed=2), threads=1)
        self.assertFalse(np.array_equal(a.empirical.counts, b.empirical.counts))

    def test_warmup_is_not_counted(self):
        config = SimConfig(S1, periods=500, repetitions=3, warmup=100)
        self.assertEqual(engine.run(config, threads=1).sample_count, 1200)

    def test_lossy_run_statistics_agree(self):
        config = SimConfig(S1, periods=2000, repetitions=4, seed=8, warmup=50)
        result = engine.run(config, threads=1)
        self.assertEqual(result.sample_count, 4 * 1950)
        self.assertAlmostEqual(result.mean_age.mean, result.empirical.mean(), delta=1e-9)
        self.assertGreater(result.deliveries, 0)
        self.assertLessEqual(result.deliveries, result.sample_count)
        self.assertGreaterEqual(result.mean_peak_age.mean, 1.0)

    def test_every_peak_is_at_least_one(self):
        path = PathConfig((0.5, 0.3))
        receiver = engine.trajectory(engine.draw_outcomes(path, 500, seed=4, repetition=0))[:, -1]
        previous = np.concatenate([[0], receiver[:-1]])
        peaks = (previous + 1)[receiver != previous + 1]
        self.assertGreater(peaks.size, 0)
        self.assertTrue(np.all(peaks >= 1))

    def test_no_deliveries(self):
        config = SimConfig(PathConfig((0.999999,)), periods=3, repetitions=2, seed=5)
        result = engine.run(config, threads=1)
        self.assertIsNone(result.mean_peak_age)
        self.assertEqual(result.deliveries, 0)

    @override_settings(AOI_THREADS=2)
    def test_threads_from_settings(self):
        self.assertEqual(engine.resolve_threads(), 2)
        with self.assertRaises(ValueError):
            engine.resolve_threads(0)

    def test_mean_converges(self):
        path = PathConfig((0.5, 0.3))
        result = engine.run(SimConfig(path, periods=20_000, repetitions=20, seed=3), threads=2)
        standard_error = result.mean_age.sd / math.sqrt(20)
        self.assertLess(abs(result.mean_age.mean - expected_age(path)), 3 * standard_error + 1e-3)


class ScenarioTests(SimpleTestCase):
    """Mean age ties between the two scenarios; peak age and the tail disagree."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.first = engine.run(SimConfig(S1, periods=100_000, repetitions=100, seed=11))
        cls.second = engine.run(SimConfig(S2, periods=100_000, repetitions=100, seed=12))

    def test_mean_age_matches_closed_form(self):
        for result in (self.first, self.second):
            self.assertAlmostEqual(result.mean_age.mean / (31 / 3), 1.0, delta=0.01)

    def test_peak_age_favours_first_scenario(self):
        self.assertLess(self.first.mean_peak_age.mean, self.second.mean_peak_age.mean)
        for result in (self.first, self.second):
            self.assertGreater(result.mean_peak_age.mean, 1.0)

    def test_reliability_favours_second_scenario(self):
        query = QuantileQuery((1e-5,))
        self.assertGreater(icdf(S1, query)[0], icdf(S2, query)[0])


class SimulationRunTests(TestCase):
    def test_record(self):
        config = SimConfig(S1, periods=200, repetitions=2, seed=2**64 - 1)
        result = engine.run(config, threads=1)
        run = SimulationRun.record("simulate", {"command": "simulate"}, result)
        run.refresh_from_db()
        self.assertEqual(int(run.seed), 2**64 - 1)
        self.assertEqual(run.loss_probs, [0.9, 0.4, 0.4])
        self.assertEqual(run.sample_count, 400)
        self.assertIsNone(run.tv_distance)
        self.assertIn(run.short_uuid, str(run))
        self.assertEqual(SimulationRun.objects.latest(), run)

    def test_primary_key_follows_project_default(self):
        self.assertIsInstance(SimulationRun._meta.pk, models.BigAutoField)

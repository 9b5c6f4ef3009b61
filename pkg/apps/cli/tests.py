import json
import logging
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings

from apps.cli.config import build_run_spec
from apps.cli.writers import Table, format_number, render_csv, render_json
from apps.simulator.models import SimulationRun


def run_command(name, **options):
    out, err = StringIO(), StringIO()
    call_command(name, stdout=out, stderr=err, **options)
    return out.getvalue(), err.getvalue()


class CommandTestMixin:
    def assertExitCode(self, code, name, **options):
        with self.assertRaises(CommandError) as ctx:
            run_command(name, **options)
        self.assertEqual(ctx.exception.returncode, code)
        return str(ctx.exception)


class WriterTests(SimpleTestCase):
    def test_format_number(self):
        self.assertEqual(format_number(None), "")
        self.assertEqual(format_number(True), "true")
        self.assertEqual(format_number(7), "7")
        self.assertEqual(format_number(0.1 * 0.6 * 0.6), "0.036")
        self.assertEqual(format_number(1.0), "1")

    def test_csv_layout(self):
        table = Table(["age", "probability"], [(0, 0.5), (1, 0.25)], {"tail_mass": 0.25})
        self.assertEqual(render_csv(table), "age,probability\n0,0.5\n1,0.25\ntail_mass,0.25\n")

    def test_json_layout(self):
        table = Table(["age", "probability"], [(0, 1.0)], {"mean": float("nan")})
        payload = json.loads(render_json(table, {"seed": None}))
        self.assertEqual(payload["rows"], [{"age": 0, "probability": 1.0}])
        self.assertEqual(payload["meta"], {"seed": None, "summary": {"mean": None}})


class RunSpecSerializerTests(SimpleTestCase):
    def test_preset(self):
        spec = build_run_spec({"command": "expected", "preset": "s2"})
        self.assertEqual(spec.path.loss_probs, (0.8, 0.7, 0.8))

    def test_defaults(self):
        pmf = build_run_spec({"command": "pmf", "probs": "0.5"})
        self.assertEqual(pmf.tail_tol, 1e-12)
        icdf = build_run_spec({"command": "icdf", "probs": [0.5]})
        self.assertEqual(icdf.targets, (1e-1, 1e-2, 1e-3, 1e-4, 1e-5))

    def test_config_round_trip(self):
        spec = build_run_spec(
            {"command": "simulate", "probs": "0.5,0.3", "periods": "50", "reps": "2", "seed": "9"}
        )
        self.assertEqual(build_run_spec(spec.as_config()), spec)
        self.assertEqual(spec.meta()["seed"], 9)


class PmfCommandTests(CommandTestMixin, SimpleTestCase):
    def test_first_scenario(self):
        out, _ = run_command("pmf", preset="s1", max_age="50")
        lines = out.splitlines()
        self.assertEqual(lines[0], "age,probability")
        self.assertEqual(lines[1], "0,0.036")
        self.assertEqual(sum(1 for line in lines if line[0].isdigit()), 51)

    def test_exact_single_hop(self):
        out, _ = run_command("pmf", probs="0.5", max_age="3")
        self.assertEqual(
            out,
            "age,probability\n0,0.5\n1,0.25\n2,0.125\n3,0.0625\ntail_mass,0.0625\nmean,1\n",
        )

    def test_hop(self):
        out, _ = run_command("pmf", probs="0.5,0.9", max_age="1", hop="1")
        self.assertTrue(out.startswith("age,probability\n0,0.5\n1,0.25\n"))

    def test_certain_loss_is_rejected(self):
        message = self.assertExitCode(2, "pmf", probs="1.0")
        self.assertIn("probs", message)

    def test_max_age_and_tail_tol_are_exclusive(self):
        self.assertExitCode(2, "pmf", probs="0.5", max_age="3", tail_tol="1e-6")

    @override_settings(AOI_HORIZON_CAP=100)
    def test_horizon_overflow(self):
        self.assertExitCode(3, "pmf", probs="0.99")

    def test_max_age_beyond_horizon_cap(self):
        message = self.assertExitCode(2, "pmf", probs="0.5", max_age=str(10**12))
        self.assertIn("max_age", message)

    @override_settings(AOI_HORIZON_CAP=100)
    def test_max_age_cap_from_settings(self):
        self.assertExitCode(2, "pmf", probs="0.5", max_age="101")
        out, _ = run_command("pmf", probs="0.5", max_age="100")
        self.assertEqual(len(out.splitlines()), 104)

    def test_memory_exhaustion_is_a_resource_limit(self):
        with mock.patch("apps.cli.management.commands.pmf.pmf_dp", side_effect=MemoryError):
            message = self.assertExitCode(3, "pmf", probs="0.5", max_age="10")
        self.assertIn("memory", message)


class VerbosityTests(SimpleTestCase):
    def setUp(self):
        logger = logging.getLogger("apps")
        self.addCleanup(logger.setLevel, logger.level)

    def test_level_is_restored_between_commands(self):
        logger = logging.getLogger("apps")
        run_command("expected", probs="0.5", verbosity=2)
        self.assertEqual(logger.level, logging.DEBUG)
        run_command("expected", probs="0.5")
        self.assertEqual(logger.level, logging.getLevelName(settings.AOI_LOG_LEVEL))


class IcdfCommandTests(CommandTestMixin, SimpleTestCase):
    def test_examples(self):
        out, _ = run_command("icdf", probs="0.5", targets="0.125")
        self.assertEqual(out, "target,age\n0.125,2\n")
        out, _ = run_command("icdf", probs="0.0")
        self.assertEqual(out.splitlines()[1:], ["0.1,0", "0.01,0", "0.001,0", "0.0001,0", "1e-05,0"])

    def test_scenarios_at_five_nines(self):
        first, _ = run_command("icdf", preset="s1", targets="1e-5")
        second, _ = run_command("icdf", preset="s2", targets="1e-5")
        self.assertEqual(first.splitlines()[1], "1e-05,110")
        self.assertEqual(second.splitlines()[1], "1e-05,67")

    def test_targets_must_descend(self):
        self.assertExitCode(2, "icdf", probs="0.5", targets="0.01,0.1")


class ExpectedCommandTests(CommandTestMixin, SimpleTestCase):
    def test_values(self):
        self.assertEqual(run_command("expected", preset="s1")[0], "10.3333\n")
        self.assertEqual(run_command("expected", preset="s2")[0], "10.3333\n")
        self.assertEqual(run_command("expected", probs="0.9,0.4,0.4")[0], "10.3333\n")
        self.assertEqual(run_command("expected", probs="0.0")[0], "0.0\n")

    def test_slot_merging(self):
        out, _ = run_command("expected", probs="0.5", slots="3")
        self.assertEqual(out, "0.142857\n")

    def test_infeasible_schedule(self):
        self.assertExitCode(2, "expected", probs="0.5,0.5,0.5", slots_per_period="2")

    def test_hop(self):
        self.assertEqual(run_command("expected", preset="s1", hop="1")[0], "9.0\n")
        self.assertExitCode(2, "expected", preset="s1", hop="4")

    def test_json(self):
        out, _ = run_command("expected", probs="0.5", format="json")
        payload = json.loads(out)
        self.assertEqual(payload["rows"], [{"hop": 1, "expected_age": 1.0}])
        self.assertEqual(payload["meta"]["loss_probs"], [0.5])

    def test_missing_probs(self):
        self.assertIn("probs required", self.assertExitCode(2, "expected"))

    def test_preset_and_probs_conflict(self):
        self.assertExitCode(2, "expected", preset="s1", probs="0.5")

    def test_unknown_preset(self):
        self.assertExitCode(2, "expected", preset="s9")


class SimulateCommandTests(CommandTestMixin, SimpleTestCase):
    def test_lossless(self):
        out, _ = run_command("simulate", probs="0.0,0.0", periods="10", reps="2", threads="1")
        lines = out.splitlines()
        self.assertEqual(lines[:2], ["age,count,probability", "0,20,1"])
        self.assertIn("mean_age,0", lines)
        self.assertIn("mean_peak_age,1", lines)

    def test_reruns_are_byte_identical(self):
        options = dict(preset="s1", periods="500", reps="4", seed="123")
        first, _ = run_command("simulate", threads="1", **options)
        second, _ = run_command("simulate", threads="3", **options)
        self.assertEqual(first, second)

    def test_json_meta(self):
        out, _ = run_command(
            "simulate", probs="0.5", periods="20", reps="2", seed="5", format="json"
        )
        meta = json.loads(out)["meta"]
        self.assertEqual(meta["command"], "simulate")
        self.assertEqual(meta["seed"], 5)
        self.assertEqual(meta["config"]["reps"], 2)
        self.assertIn("version", meta)
        self.assertEqual(meta["summary"]["sample_count"], 40)

    def test_bad_warmup(self):
        self.assertExitCode(2, "simulate", probs="0.5", periods="10", reps="1", warmup="10")

    def test_seed_range(self):
        self.assertExitCode(2, "simulate", probs="0.5", periods="10", reps="1", seed=str(2**64))


class CompareCommandTests(SimpleTestCase):
    def test_lossless(self):
        out, _ = run_command("compare", probs="0.0", periods="10", reps="2")
        lines = out.splitlines()
        self.assertEqual(lines[:2], ["age,empirical,analytic,residual", "0,1,1,0"])
        self.assertIn("tv_distance,0", lines)
        self.assertIn("mean_gap,0", lines)


class ConfigFileTests(CommandTestMixin, SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, name, text):
        path = Path(self.tmp.name) / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    def test_run_dispatches_on_command(self):
        config = self.write("run.json", json.dumps({"command": "expected", "probs": [0.5]}))
        self.assertEqual(run_command("run", config=config)[0], "1.0\n")

    def test_flags_override_file(self):
        config = self.write("run.json", json.dumps({"probs": [0.5]}))
        self.assertEqual(run_command("expected", config=config)[0], "1.0\n")
        self.assertEqual(run_command("expected", config=config, probs="0.0")[0], "0.0\n")

    def test_malformed_json(self):
        config = self.write("bad.json", "{probs: ")
        self.assertIn("not valid JSON", self.assertExitCode(2, "expected", config=config))

    def test_missing_file(self):
        self.assertExitCode(2, "expected", config=str(Path(self.tmp.name) / "absent.json"))

    def test_missing_probs(self):
        config = self.write("empty.json", json.dumps({"command": "expected"}))
        self.assertIn("probs required", self.assertExitCode(2, "run", config=config))

    def test_run_needs_a_source(self):
        self.assertExitCode(2, "run")

    def test_output_file(self):
        target = Path(self.tmp.name) / "pmf.csv"
        out, _ = run_command("pmf", probs="0.5", max_age="1", output=str(target))
        self.assertEqual(out, "")
        self.assertEqual(target.read_text(encoding="utf-8").splitlines()[:2], ["age,probability", "0,0.5"])


class SavedRunTests(CommandTestMixin, TestCase):
    def test_save_list_and_rerun(self):
        options = dict(probs="0.5,0.3", periods="200", reps="2", seed="77", threads="1")
        out, err = run_command("simulate", save=True, **options)
        run = SimulationRun.objects.get()
        self.assertIn(f"saved run {run.uuid}", err)
        self.assertEqual(int(run.seed), 77)
        self.assertEqual(run.config["command"], "simulate")

        listing, _ = run_command("runs")
        self.assertEqual(len(listing.splitlines()), 2)
        self.assertIn(str(run.uuid), listing)
        self.assertIn("0.5;0.3", listing)

        replay, _ = run_command("run", rerun=str(run.uuid))
        self.assertEqual(replay, out)
        self.assertEqual(SimulationRun.objects.count(), 1)

    def test_compare_saves_distance(self):
        run_command("compare", probs="0.5", periods="200", reps="2", save=True)
        run = SimulationRun.objects.get()
        self.assertEqual(run.command, SimulationRun.Commands.COMPARE)
        self.assertIsNotNone(run.tv_distance)

    def test_unknown_run(self):
        self.assertExitCode(2, "run", rerun="00000000-0000-0000-0000-000000000000")
        self.assertExitCode(2, "run", rerun="not-a-uuid")

    def test_runs_json(self):
        payload = json.loads(run_command("runs", format="json")[0])
        self.assertEqual(payload["rows"], [])
        self.assertEqual(payload["meta"]["count"], 0)

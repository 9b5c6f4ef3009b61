from apps.cli.management.base import AgeCommand
from apps.cli.writers import Table
from apps.simulator.engine import run


def add_simulation_arguments(parser):
    parser.add_argument("--periods", help="Sampling periods per repetition (default 100000).")
    parser.add_argument("--reps", help="Independent repetitions (default 100).")
    parser.add_argument("--seed", help="64-bit seed (default 0).")
    parser.add_argument("--warmup", help="Leading periods left out of the statistics (default 0).")
    parser.add_argument("--save", action="store_true", default=None, help="Store the run in the database.")


SIMULATION_OPTIONS = ("periods", "reps", "seed", "warmup", "save")


def simulation_summary(result):
    peak = result.mean_peak_age
    return {
        "mean_age": result.mean_age.mean,
        "mean_age_sd": result.mean_age.sd,
        "mean_peak_age": peak.mean if peak else None,
        "mean_peak_age_sd": peak.sd if peak else None,
        "deliveries": result.deliveries,
        "sample_count": result.sample_count,
    }


class Command(AgeCommand):
    help = "Monte Carlo simulation of the line network; empirical receiver-age PMF."

    command_name = "simulate"
    command_options = SIMULATION_OPTIONS

    def add_command_arguments(self, parser):
        add_simulation_arguments(parser)

    def compute(self, spec):
        result = run(spec.sim_config, threads=spec.threads)
        if spec.save:
            self.save_run(spec, result)
        counts = result.empirical.counts
        total = result.sample_count
        return Table(
            columns=["age", "count", "probability"],
            rows=[(age, int(count), int(count) / total) for age, count in enumerate(counts)],
            summary=simulation_summary(result),
        )

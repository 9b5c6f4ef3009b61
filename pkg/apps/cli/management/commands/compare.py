from apps.cli.management.base import AgeCommand
from apps.cli.writers import Table
from apps.simulator.engine import run
from apps.stats.comparison import compare

from .simulate import SIMULATION_OPTIONS, add_simulation_arguments, simulation_summary


class Command(AgeCommand):
    help = "Simulate, then measure the distance between empirical and analytic age PMFs."

    command_name = "compare"
    command_options = SIMULATION_OPTIONS

    def add_command_arguments(self, parser):
        add_simulation_arguments(parser)

    def compute(self, spec):
        result = run(spec.sim_config, threads=spec.threads)
        report = compare(spec.path, result)
        if spec.save:
            self.save_run(spec, result, report)
        return Table(
            columns=["age", "empirical", "analytic", "residual"],
            rows=[(r.age, r.empirical, r.analytic, r.difference) for r in report.per_age_residuals],
            summary={
                "tv_distance": report.tv_distance,
                "mean_gap": report.mean_gap,
                **simulation_summary(result),
            },
        )

from apps.analytic.evaluator import pmf_auto_truncate, pmf_dp
from apps.cli.management.base import AgeCommand
from apps.cli.writers import Table
from apps.core.types import pmf_mean


class Command(AgeCommand):
    help = "Age PMF at the receiver (or at --hop), one row per age."

    command_name = "pmf"
    command_options = ("max_age", "tail_tol", "hop")

    def add_command_arguments(self, parser):
        parser.add_argument("--max-age", help="Last age to tabulate.")
        parser.add_argument("--tail-tol", help="Tabulate until the remaining mass drops below this (default 1e-12).")
        parser.add_argument("--hop", help="Evaluate the age after this many links.")

    def compute(self, spec):
        path = self.analysed_path(spec)
        if spec.max_age is not None:
            pmf = pmf_dp(path, spec.max_age)
        else:
            pmf = pmf_auto_truncate(path, spec.tail_tol)
        mean = pmf_mean(pmf, path.max_loss)
        return Table(
            columns=["age", "probability"],
            rows=[(age, float(p)) for age, p in enumerate(pmf.probs)],
            summary={"tail_mass": pmf.tail_mass, "mean": mean.value},
        )

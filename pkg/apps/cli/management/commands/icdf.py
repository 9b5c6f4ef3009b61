from apps.analytic.quantiles import QuantileQuery, icdf
from apps.cli.management.base import AgeCommand
from apps.cli.writers import Table


class Command(AgeCommand):
    help = "Smallest age whose exceedance probability meets each reliability target."

    command_name = "icdf"
    command_options = ("targets", "hop")

    def add_command_arguments(self, parser):
        parser.add_argument("--targets", help="Descending tail probabilities (default 1e-1,...,1e-5).")
        parser.add_argument("--hop", help="Evaluate the age after this many links.")

    def compute(self, spec):
        query = QuantileQuery(spec.targets)
        ages = icdf(self.analysed_path(spec), query)
        return Table(columns=["target", "age"], rows=list(zip(query.targets, ages)))

from apps.analytic.evaluator import expected_age
from apps.cli.management.base import AgeCommand
from apps.cli.writers import Table


def format_expected(value):
    """Six significant digits, always with a decimal point (``10.3333``, ``1.0``)."""
    return repr(float(format(value, ".6g")))


class Command(AgeCommand):
    help = "Expected age of information at the receiver (or at --hop)."

    command_name = "expected"
    command_options = ("hop",)

    def add_command_arguments(self, parser):
        parser.add_argument("--hop", help="Evaluate the age after this many links.")

    def compute(self, spec):
        path = self.analysed_path(spec)
        return Table(columns=["hop", "expected_age"], rows=[(path.hops, expected_age(path))])

    def render(self, spec, table):
        if spec.format == "json":
            return super().render(spec, table)
        return format_expected(table.rows[0][1]) + "\n"

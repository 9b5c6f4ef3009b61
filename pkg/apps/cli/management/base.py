import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from apps.core.exceptions import AgeOfInformationError, HorizonOverflow
from apps.cli.config import build_run_spec, load_config
from apps.cli.serializers import format_errors
from apps.cli.writers import render
from apps.simulator.models import SimulationRun

EXIT_INVALID = 2
EXIT_RESOURCE_LIMIT = 3


def configure_verbosity(verbosity):
    level = logging.DEBUG if verbosity >= 2 else settings.AOI_LOG_LEVEL
    logging.getLogger("apps").setLevel(level)


class AgeCommand(BaseCommand):
    """Shared flags, validation and output handling of the analysis commands.

    Subclasses set ``command_name``, declare their own flags in
    ``add_command_arguments`` (listing the option names in ``command_options``)
    and turn a validated RunSpec into a Table in ``compute``.
    """

    command_name = None
    common_options = ("probs", "preset", "slots", "slots_per_period", "format", "output", "threads")
    command_options = ()

    def add_arguments(self, parser):
        parser.add_argument("--probs", help="Comma-separated loss probabilities, source side first.")
        parser.add_argument("--preset", help="Named scenario instead of --probs (s1, s2).")
        parser.add_argument("--slots", help="Consecutive slots per link; --probs are then per-slot losses.")
        parser.add_argument("--slots-per-period", help="Slots in one sampling period (m).")
        parser.add_argument("--format", help="csv (default) or json.")
        parser.add_argument("--output", help="Write to this file instead of stdout.")
        parser.add_argument("--config", help="JSON file with options; flags override it.")
        parser.add_argument("--threads", help="Worker threads for simulation.")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        configure_verbosity(options.get("verbosity", 1))
        self.emit(self.resolve(options))

    def resolve(self, options):
        names = self.common_options + self.command_options
        overrides = {name: options.get(name) for name in names}
        overrides["command"] = self.command_name
        try:
            if options.get("config"):
                return load_config(options["config"], overrides)
            return build_run_spec({k: v for k, v in overrides.items() if v is not None})
        except serializers.ValidationError as exc:
            raise CommandError(format_errors(exc.detail), returncode=EXIT_INVALID)

    def emit(self, spec):
        try:
            table = self.compute(spec)
        except HorizonOverflow as exc:
            raise CommandError(str(exc), returncode=EXIT_RESOURCE_LIMIT)
        except MemoryError:
            raise CommandError(
                f"{self.command_name}: not enough memory for this request.",
                returncode=EXIT_RESOURCE_LIMIT,
            )
        except AgeOfInformationError as exc:
            raise CommandError(str(exc), returncode=EXIT_INVALID)
        self.write_output(spec, self.render(spec, table))

    def compute(self, spec):
        raise NotImplementedError

    def render(self, spec, table):
        return render(table, spec.format, spec.meta())

    def write_output(self, spec, text):
        if spec.output:
            try:
                with Path(spec.output).open("w", encoding="utf-8", newline="") as handle:
                    handle.write(text)
            except OSError as exc:
                raise CommandError(
                    f"Cannot write {spec.output}: {exc.strerror}.", returncode=EXIT_INVALID
                )
        else:
            self.stdout.write(text, ending="")

    def analysed_path(self, spec):
        """The whole path, or its first ``--hop`` links."""
        return spec.path.prefix(spec.hop) if spec.hop else spec.path

    def save_run(self, spec, result, report=None):
        run = SimulationRun.record(spec.command, spec.as_config(), result, report)
        self.stderr.write(f"saved run {run.uuid}")
        return run

import uuid

from django.core.management import load_command_class
from django.core.management.base import CommandError
from rest_framework import serializers

from apps.cli.config import build_run_spec, load_config
from apps.cli.management.base import EXIT_INVALID, AgeCommand
from apps.cli.serializers import format_errors
from apps.simulator.models import SimulationRun

from .simulate import SIMULATION_OPTIONS, add_simulation_arguments


class Command(AgeCommand):
    help = (
        "Run the command named in a JSON config file (--config), or repeat a "
        "saved simulation (--rerun UUID). Flags override stored values."
    )

    command_options = ("max_age", "tail_tol", "hop", "targets") + SIMULATION_OPTIONS

    def add_command_arguments(self, parser):
        parser.add_argument("--rerun", help="uuid of a saved run to repeat.")
        parser.add_argument("--max-age")
        parser.add_argument("--tail-tol")
        parser.add_argument("--hop")
        parser.add_argument("--targets")
        add_simulation_arguments(parser)

    def resolve(self, options):
        if options.get("config") and options.get("rerun"):
            raise CommandError("Give either --config or --rerun, not both.", returncode=EXIT_INVALID)
        if options.get("rerun"):
            return self._resolve_rerun(options)
        if not options.get("config"):
            raise CommandError("run needs --config or --rerun.", returncode=EXIT_INVALID)

        names = self.common_options + self.command_options
        try:
            return load_config(options["config"], {name: options.get(name) for name in names})
        except serializers.ValidationError as exc:
            raise CommandError(format_errors(exc.detail), returncode=EXIT_INVALID)

    def _resolve_rerun(self, options):
        try:
            key = uuid.UUID(options["rerun"])
        except ValueError:
            raise CommandError(f"{options['rerun']!r} is not a run uuid.", returncode=EXIT_INVALID)
        saved = SimulationRun.objects.filter(uuid=key).first()
        if saved is None:
            raise CommandError(f"No saved run {key}.", returncode=EXIT_INVALID)

        data = dict(saved.config)
        for name in self.common_options + self.command_options:
            if options.get(name) is not None:
                data[name] = options[name]
        try:
            return build_run_spec(data)
        except serializers.ValidationError as exc:
            raise CommandError(format_errors(exc.detail), returncode=EXIT_INVALID)

    def emit(self, spec):
        target = load_command_class("apps.cli", spec.command)
        target.stdout = self.stdout
        target.stderr = self.stderr
        target.emit(spec)

from django.core.management.base import BaseCommand, CommandError

import apps
from apps.cli.management.base import EXIT_INVALID
from apps.cli.writers import Table, render
from apps.simulator.models import SimulationRun

COLUMNS = [
    "uuid", "created_at", "command", "loss_probs", "periods", "reps", "seed",
    "mean_age", "mean_peak_age", "deliveries", "tv_distance", "mean_gap",
]


class Command(BaseCommand):
    help = "List saved simulation runs, newest first."

    def add_arguments(self, parser):
        parser.add_argument("--limit", type=int, default=20)
        parser.add_argument("--format", default="csv")

    def handle(self, *args, **options):
        if options["format"] not in ("csv", "json"):
            raise CommandError("format must be csv or json.", returncode=EXIT_INVALID)
        if options["limit"] < 1:
            raise CommandError("limit must be positive.", returncode=EXIT_INVALID)

        saved = SimulationRun.objects.all()[: options["limit"]]
        rows = [
            (
                str(run.uuid),
                run.created_at.isoformat(),
                run.command,
                ";".join(str(p) for p in run.loss_probs),
                run.periods,
                run.repetitions,
                int(run.seed),
                run.mean_age,
                run.mean_peak_age,
                run.deliveries,
                run.tv_distance,
                run.mean_gap,
            )
            for run in saved
        ]
        meta = {"version": apps.__version__, "count": len(rows)}
        self.stdout.write(render(Table(COLUMNS, rows), options["format"], meta), ending="")

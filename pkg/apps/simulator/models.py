from django.db import models

from apps.common.models import TimeStampedUUIDModel


class SimulationRun(TimeStampedUUIDModel):
    """A finished ``simulate`` or ``compare`` invocation, stored so it can be listed and re-run."""

    class Commands(models.TextChoices):
        SIMULATE = "simulate", "Simulate"
        COMPARE = "compare", "Compare"

    command = models.CharField(max_length=20, choices=Commands.choices)
    loss_probs = models.JSONField()
    # fully resolved command options; enough to repeat the run bit for bit
    config = models.JSONField()

    periods = models.PositiveIntegerField()
    repetitions = models.PositiveIntegerField()
    seed = models.DecimalField(max_digits=20, decimal_places=0)

    sample_count = models.BigIntegerField()
    deliveries = models.BigIntegerField()
    mean_age = models.FloatField()
    mean_age_sd = models.FloatField()
    mean_peak_age = models.FloatField(null=True, blank=True)
    mean_peak_age_sd = models.FloatField(null=True, blank=True)

    tv_distance = models.FloatField(null=True, blank=True)
    mean_gap = models.FloatField(null=True, blank=True)

    class Meta(TimeStampedUUIDModel.Meta):
        pass

    def __str__(self):
        probs = ",".join(str(p) for p in self.loss_probs)
        return f"{self.command} ({probs}) seed={self.seed} [{self.short_uuid}]"

    @classmethod
    def record(cls, command, config, result, report=None):
        peak = result.mean_peak_age
        return cls.objects.create(
            command=command,
            loss_probs=list(result.config.path.loss_probs),
            config=config,
            periods=result.config.periods,
            repetitions=result.config.repetitions,
            seed=result.config.seed,
            sample_count=result.sample_count,
            deliveries=result.deliveries,
            mean_age=result.mean_age.mean,
            mean_age_sd=result.mean_age.sd,
            mean_peak_age=peak.mean if peak else None,
            mean_peak_age_sd=peak.sd if peak else None,
            tv_distance=report.tv_distance if report else None,
            mean_gap=report.mean_gap if report else None,
        )

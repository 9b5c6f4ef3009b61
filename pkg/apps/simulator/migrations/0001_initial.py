import uuid

import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="SimulationRun",
            fields=[
                ("id", models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name="ID")),
                ("uuid", models.UUIDField(default=uuid.uuid4, editable=False, unique=True)),
                ("created_at", models.DateTimeField(default=django.utils.timezone.now, editable=False)),
                ("updated_at", models.DateTimeField(auto_now=True)),
                ("command", models.CharField(choices=[("simulate", "Simulate"), ("compare", "Compare")], max_length=20)),
                ("loss_probs", models.JSONField()),
                ("config", models.JSONField()),
                ("periods", models.PositiveIntegerField()),
                ("repetitions", models.PositiveIntegerField()),
                ("seed", models.DecimalField(decimal_places=0, max_digits=20)),
                ("sample_count", models.BigIntegerField()),
                ("deliveries", models.BigIntegerField()),
                ("mean_age", models.FloatField()),
                ("mean_age_sd", models.FloatField()),
                ("mean_peak_age", models.FloatField(blank=True, null=True)),
                ("mean_peak_age_sd", models.FloatField(blank=True, null=True)),
                ("tv_distance", models.FloatField(blank=True, null=True)),
                ("mean_gap", models.FloatField(blank=True, null=True)),
            ],
            options={
                "ordering": ("-created_at",),
                "get_latest_by": "created_at",
                "abstract": False,
            },
        ),
    ]

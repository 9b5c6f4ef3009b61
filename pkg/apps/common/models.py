import uuid

from django.db import models
from django.utils import timezone


class TimeStampedUUIDModel(models.Model):
    uuid = models.UUIDField(default=uuid.uuid4, editable=False, unique=True)
    created_at = models.DateTimeField(default=timezone.now, editable=False)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        abstract = True
        ordering = ("-created_at",)
        get_latest_by = "created_at"

    @property
    def short_uuid(self):
        return self.uuid.hex[:8]

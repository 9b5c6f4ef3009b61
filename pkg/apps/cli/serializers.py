import logging

from django.conf import settings
from rest_framework import serializers

from apps.analytic.quantiles import DEFAULT_TARGETS
from apps.core.exceptions import InvalidPath, InvalidSimConfig
from apps.core.validation import merge_path_slots, validate_path
from apps.simulator.types import MAX_SEED, SimConfig

from .runspec import COMMANDS, FORMATS, RunSpec

logger = logging.getLogger(__name__)


class CommaSeparatedListField(serializers.ListField):
    """Accepts a JSON array or a comma-separated string such as ``"0.9,0.4,0.4"``."""

    def to_internal_value(self, data):
        if isinstance(data, str):
            data = [item.strip() for item in data.split(",") if item.strip()]
        elif isinstance(data, (int, float)) and not isinstance(data, bool):
            data = [data]
        return super().to_internal_value(data)


def _preset_choices():
    return sorted(settings.AOI_PRESETS)


class RunSpecSerializer(serializers.Serializer):
    command = serializers.ChoiceField(choices=COMMANDS)

    probs = CommaSeparatedListField(child=serializers.FloatField(), required=False, allow_empty=True)
    preset = serializers.ChoiceField(choices=[], required=False, allow_null=True)
    slots = CommaSeparatedListField(
        child=serializers.IntegerField(min_value=1), required=False, allow_null=True
    )
    slots_per_period = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    hop = serializers.IntegerField(min_value=1, required=False, allow_null=True)

    max_age = serializers.IntegerField(min_value=0, required=False, allow_null=True)
    tail_tol = serializers.FloatField(required=False, allow_null=True)
    targets = CommaSeparatedListField(child=serializers.FloatField(), required=False, allow_empty=False)

    periods = serializers.IntegerField(min_value=1, default=lambda: settings.AOI_SIM_PERIODS)
    reps = serializers.IntegerField(min_value=1, default=lambda: settings.AOI_SIM_REPETITIONS)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED, default=lambda: settings.AOI_SIM_SEED)
    warmup = serializers.IntegerField(min_value=0, default=0)
    threads = serializers.IntegerField(min_value=1, required=False, allow_null=True)

    format = serializers.ChoiceField(choices=FORMATS, default="csv")
    output = serializers.CharField(required=False, allow_null=True)
    save = serializers.BooleanField(default=False)

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.fields["preset"].choices = _preset_choices()

    def validate_max_age(self, value):
        if value is not None and value > settings.AOI_HORIZON_CAP:
            raise serializers.ValidationError(
                f"max_age must not exceed the horizon cap {settings.AOI_HORIZON_CAP}."
            )
        return value

    def validate_tail_tol(self, value):
        if value is not None and not 0.0 < value < 1.0:
            raise serializers.ValidationError("tail_tol must lie in (0, 1).")
        return value

    def validate_targets(self, value):
        for target in value:
            if not 0.0 < target < 1.0:
                raise serializers.ValidationError("Targets must lie in (0, 1).")
        if any(later >= earlier for earlier, later in zip(value, value[1:])):
            raise serializers.ValidationError("Targets must be strictly descending.")
        return value

    def _resolve_path(self, attrs):
        probs = attrs.get("probs")
        preset = attrs.get("preset")
        if preset and probs:
            raise serializers.ValidationError({"preset": "Give either probs or preset, not both."})
        if preset:
            probs = list(settings.AOI_PRESETS[preset])
            attrs["probs"] = probs
            logger.debug("preset %s expands to %s", preset, probs)
        if probs is None:
            raise serializers.ValidationError({"probs": "probs required"})

        slots = attrs.get("slots")
        try:
            if slots:
                return merge_path_slots(probs, slots, attrs.get("slots_per_period"))
            return validate_path(probs, attrs.get("slots_per_period"))
        except InvalidPath as exc:
            raise serializers.ValidationError({"probs": str(exc)})

    def validate(self, attrs):
        path = self._resolve_path(attrs)
        attrs["path"] = path

        hop = attrs.get("hop")
        if hop is not None and hop > path.hops:
            raise serializers.ValidationError({"hop": f"The path has only {path.hops} hops."})

        command = attrs["command"]
        if command == "pmf":
            if attrs.get("max_age") is not None and attrs.get("tail_tol") is not None:
                raise serializers.ValidationError(
                    {"max_age": "Give either max_age or tail_tol, not both."}
                )
            if attrs.get("max_age") is None and attrs.get("tail_tol") is None:
                attrs["tail_tol"] = settings.AOI_TAIL_TOL
        if command == "icdf" and not attrs.get("targets"):
            attrs["targets"] = list(DEFAULT_TARGETS)

        if command in ("simulate", "compare"):
            try:
                attrs["sim_config"] = SimConfig(
                    path=path,
                    periods=attrs["periods"],
                    repetitions=attrs["reps"],
                    seed=attrs["seed"],
                    warmup=attrs["warmup"],
                )
            except InvalidSimConfig as exc:
                raise serializers.ValidationError({"warmup": str(exc)})
        return attrs

    def create(self, validated_data):
        return RunSpec(
            command=validated_data["command"],
            path=validated_data["path"],
            probs=tuple(validated_data["probs"]),
            preset=validated_data.get("preset"),
            slots=tuple(validated_data["slots"]) if validated_data.get("slots") else None,
            hop=validated_data.get("hop"),
            max_age=validated_data.get("max_age"),
            tail_tol=validated_data.get("tail_tol"),
            targets=tuple(validated_data.get("targets") or ()),
            sim_config=validated_data.get("sim_config"),
            threads=validated_data.get("threads"),
            format=validated_data["format"],
            output=validated_data.get("output"),
            save=validated_data["save"],
        )


def format_errors(errors):
    """Flatten ``serializer.errors`` into a single diagnostic line."""
    parts = []
    for field, messages in errors.items():
        if isinstance(messages, dict):
            messages = [f"{key}: {value}" for key, value in messages.items()]
        elif not isinstance(messages, (list, tuple)):
            messages = [messages]
        text = " ".join(str(message) for message in messages)
        parts.append(text if field == "non_field_errors" else f"{field}: {text}")
    return "; ".join(parts)

import json
import logging
from pathlib import Path

from rest_framework import serializers

from .serializers import RunSpecSerializer

logger = logging.getLogger(__name__)


def build_run_spec(data):
    """Validate raw options; raises ``serializers.ValidationError`` with field errors."""
    serializer = RunSpecSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def read_config(path):
    """The JSON object stored in ``path``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise serializers.ValidationError({"config": f"Cannot read {path}: {exc.strerror}."})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise serializers.ValidationError(
            {"config": f"{path} is not valid JSON (line {exc.lineno}, column {exc.colno})."}
        )
    if not isinstance(data, dict):
        raise serializers.ValidationError({"config": f"{path} must hold a JSON object."})
    return data


def load_config(path, overrides=None):
    """RunSpec from a JSON file; non-None ``overrides`` (command-line flags) win."""
    data = read_config(path)
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    logger.debug("resolved %s to %s", path, data)
    return build_run_spec(data)

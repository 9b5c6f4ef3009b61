from __future__ import annotations

from dataclasses import dataclass

import apps
from apps.core.types import PathConfig
from apps.simulator.types import SimConfig

COMMANDS = ("pmf", "icdf", "expected", "simulate", "compare")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunSpec:
    """A validated command invocation; build one with ``RunSpecSerializer``."""

    command: str
    path: PathConfig
    # as given: per-slot losses when ``slots`` is set, per-link losses otherwise
    probs: tuple[float, ...]
    preset: str | None = None
    slots: tuple[int, ...] | None = None
    hop: int | None = None
    max_age: int | None = None
    tail_tol: float | None = None
    targets: tuple[float, ...] = ()
    sim_config: SimConfig | None = None
    threads: int | None = None
    format: str = "csv"
    output: str | None = None
    save: bool = False

    @property
    def seed(self):
        return self.sim_config.seed if self.sim_config else None

    def as_config(self) -> dict:
        """Resolved options as serializer input, so a stored run can be replayed.

        Output destination, thread count and ``save`` are left out: none of
        them changes the result.
        """
        config = {
            "command": self.command,
            "probs": list(self.probs),
            "slots": list(self.slots) if self.slots else None,
            "slots_per_period": self.path.slots_per_period,
            "hop": self.hop,
            "format": self.format,
        }
        if self.command == "pmf":
            config.update(max_age=self.max_age, tail_tol=self.tail_tol)
        if self.command == "icdf":
            config["targets"] = list(self.targets)
        if self.sim_config is not None:
            config.update(
                periods=self.sim_config.periods,
                reps=self.sim_config.repetitions,
                seed=self.sim_config.seed,
                warmup=self.sim_config.warmup,
            )
        return {key: value for key, value in config.items() if value is not None}

    def meta(self) -> dict:
        return {
            "version": apps.__version__,
            "command": self.command,
            "loss_probs": list(self.path.loss_probs),
            "config": self.as_config(),
            "seed": self.seed,
        }

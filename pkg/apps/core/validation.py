import logging
import numbers

from .exceptions import EmptyPath, InfeasibleSchedule, InvalidPath, ProbOutOfRange
from .types import LinkBudget, PathConfig

logger = logging.getLogger(__name__)


def _as_probability(index, raw):
    if isinstance(raw, bool) or not isinstance(raw, (numbers.Real, str)):
        raise ProbOutOfRange(index, raw)
    try:
        return float(raw)
    except ValueError:
        raise ProbOutOfRange(index, raw) from None


def _as_slot_count(raw):
    if raw is None:
        return None
    if isinstance(raw, bool) or not isinstance(raw, numbers.Integral):
        raise InfeasibleSchedule(f"slots_per_period must be an integer, got {raw!r}.")
    return int(raw)


def validate_path(raw_probs, slots_per_period=None) -> PathConfig:
    """Build a PathConfig, raising EmptyPath, ProbOutOfRange or InfeasibleSchedule."""
    if raw_probs is None:
        raise EmptyPath()
    if isinstance(raw_probs, (str, bytes)) or not hasattr(raw_probs, "__iter__"):
        raise InvalidPath(f"Loss probabilities must be a sequence, got {raw_probs!r}.")
    probs = tuple(_as_probability(i, raw) for i, raw in enumerate(raw_probs))
    return PathConfig(probs, _as_slot_count(slots_per_period))


def merge_slots(budget: LinkBudget) -> float:
    """Loss probability of a link given ``slot_count`` consecutive attempts: (p*)^L."""
    return budget.per_slot_loss ** budget.slot_count


def merge_path_slots(per_slot_losses, slot_counts, slots_per_period=None) -> PathConfig:
    """Merge consecutive slots link by link, then validate the resulting path.

    With ``slots_per_period`` given, the slots of all links together must fit
    into one sampling period.
    """
    per_slot_losses = list(per_slot_losses)
    slot_counts = list(slot_counts)
    if not per_slot_losses:
        raise EmptyPath()
    if len(slot_counts) != len(per_slot_losses):
        raise InvalidPath(
            f"Got {len(slot_counts)} slot counts for {len(per_slot_losses)} links."
        )

    merged = []
    for index, (raw, count) in enumerate(zip(per_slot_losses, slot_counts)):
        p_star = _as_probability(index, raw)
        if not 0.0 <= p_star < 1.0:
            raise ProbOutOfRange(index, raw)
        if isinstance(count, bool) or not isinstance(count, numbers.Integral):
            raise InvalidPath(f"Slot count of link {index + 1} must be an integer, got {count!r}.")
        merged.append(merge_slots(LinkBudget(p_star, int(count))))

    path = validate_path(merged, slots_per_period)
    if path.slots_per_period is not None and sum(slot_counts) > path.slots_per_period:
        raise InfeasibleSchedule(
            f"{sum(slot_counts)} slots allocated but a sampling period has only "
            f"{path.slots_per_period}."
        )
    logger.debug("merged slots %s of %s into %s", slot_counts, per_slot_losses, merged)
    return path

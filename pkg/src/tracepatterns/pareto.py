"""Pareto-dominance filtering of measured patterns.

Dominance uses exact float comparison: a dominates b when it is no worse in
every dimension for the session's optimization directions and strictly better
in at least one.  Ties and duplicates are never dominated by each other, so
equal-valued patterns all stay on the front.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .interest import DEFAULT_DIRECTIONS, InterestVector, validate_directions
from .patterns import Pattern


class DimensionMismatch(Exception):
    pass


@dataclass
class MeasuredPattern:
    pattern: Pattern
    interest: InterestVector
    front: bool = False
    selected_off_front: bool = field(default=False, compare=False)

    @property
    def id(self) -> str:
        return self.pattern.id

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern.to_dict(),
            "id": self.id,
            "interest": self.interest.to_dict(),
            "front": self.front,
        }

    @classmethod
    def from_dict(cls, data: Mapping, pattern: Pattern | None = None) -> "MeasuredPattern":
        return cls(
            pattern=pattern if pattern is not None else Pattern.from_dict(data["pattern"]),
            interest=InterestVector.from_dict(data["interest"]),
            front=data.get("front", False),
        )


def _oriented(vector: InterestVector, directions: Sequence[str]) -> tuple[float, ...]:
    """Flip minimized dimensions so that larger is always better."""
    return tuple(
        value if direction == "max" else -value
        for value, direction in zip(vector.as_tuple(), directions)
    )


def dominates(
    a: InterestVector, b: InterestVector, directions: Sequence[str] = DEFAULT_DIRECTIONS
) -> bool:
    """True when a is no worse than b everywhere and strictly better somewhere."""
    if len(a.as_tuple()) != len(b.as_tuple()) or len(a.as_tuple()) != len(tuple(directions)):
        raise DimensionMismatch(f"{a} vs {b} under {directions}")
    directions = validate_directions(directions)
    oa = _oriented(a, directions)
    ob = _oriented(b, directions)
    return all(x >= y for x, y in zip(oa, ob)) and any(x > y for x, y in zip(oa, ob))


def pareto_front(
    items: Sequence[MeasuredPattern], directions: Sequence[str] = DEFAULT_DIRECTIONS
) -> list[MeasuredPattern]:
    """Non-dominated subset; sets the front flag on every item in place.

    Items are swept in descending first-oriented-dimension order, checking
    each candidate against the members kept so far (a candidate can only be
    dominated by an earlier item in that order).  Output is sorted by
    descending first dimension with ties broken by pattern id.
    """
    if not items:
        raise ValueError("pareto_front needs at least one item")
    directions = validate_directions(directions)

    # Lexicographically descending oriented vectors guarantee every potential
    # dominator is swept before its victims (equal vectors dominate nothing).
    decorated = [(item, _oriented(item.interest, directions)) for item in items]
    decorated.sort(key=lambda pair: tuple(-value for value in pair[1]))

    kept: list[tuple[MeasuredPattern, tuple[float, ...]]] = []
    for item, vector in decorated:
        dominated = any(
            all(kv >= v for kv, v in zip(kept_vector, vector))
            and any(kv > v for kv, v in zip(kept_vector, vector))
            for _, kept_vector in kept
        )
        if not dominated:
            kept.append((item, vector))

    front_ids = {id(item) for item, _ in kept}
    for item in items:
        item.front = id(item) in front_ids
    front = [item for item, _ in kept]
    front.sort(key=lambda item: (-_oriented(item.interest, directions)[0], item.id))
    return front

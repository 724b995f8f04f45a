"""The discovery loop: seed singletons, measure, front, select, extend.

A session owns one log and one interest configuration.  Iteration 0 holds a
measured candidate per alphabet activity; every later iteration holds the
measured one-node extensions of the patterns selected from the previous one.
Sessions record enough history (selections, rules, thresholds) to replay
byte-for-byte, and the automated mode simply selects the whole front each
round until the iteration budget or novelty runs out.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .extension import BASE_RULES, ExtensionRule, extend_in_converted, rules_from_names
from .interest import (
    DEFAULT_DIRECTIONS,
    DistanceConfig,
    FittedDistance,
    InterestVector,
    interest_vector,
    validate_directions,
)
from .log_model import EventLog
from .pareto import MeasuredPattern, pareto_front
from .partial_order import OracleConfig, POTrace, convert_log
from .patterns import (
    DEFAULT_MAX_PATTERN_SIZE,
    InstanceIndex,
    Pattern,
    instances_in_converted,
    singleton_pattern,
)

logger = logging.getLogger(__name__)

AWAITING_SELECTION = "awaiting-selection"
EXTENDING = "extending"
DONE = "done"


class UnknownPatternId(Exception):
    def __init__(self, pattern_id: str) -> None:
        super().__init__(f"pattern {pattern_id!r} is not a candidate of the latest iteration")
        self.pattern_id = pattern_id


class NoExtensionPossible(Exception):
    pass


@dataclass(frozen=True)
class DiscoveryConfig:
    oracle: OracleConfig = OracleConfig()
    directions: tuple[str, ...] = DEFAULT_DIRECTIONS
    oi_transform: str = "raw"  # "raw" | "abs"
    distance: DistanceConfig = DistanceConfig()
    rules: tuple[ExtensionRule, ...] = BASE_RULES
    quantifier: str = "any"  # "any" | "all"
    max_iterations: int = 3
    max_pattern_size: int = DEFAULT_MAX_PATTERN_SIZE
    min_case_frequency: int | None = None
    min_frequency_mode: str = "pre_front"  # "pre_front" | "post_front"
    seed: int = 0

    def __post_init__(self) -> None:
        validate_directions(self.directions)
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.quantifier not in ("any", "all"):
            raise ValueError(f"unknown quantifier {self.quantifier!r}")
        if self.oi_transform not in ("raw", "abs"):
            raise ValueError(f"unknown transform {self.oi_transform!r}")
        if self.min_frequency_mode not in ("pre_front", "post_front"):
            raise ValueError(f"unknown frequency mode {self.min_frequency_mode!r}")

    def to_dict(self) -> dict:
        return {
            "oracle": self.oracle.to_dict(),
            "directions": list(self.directions),
            "oi_transform": self.oi_transform,
            "distance": self.distance.to_dict(),
            "rules": [rule.value for rule in self.rules],
            "quantifier": self.quantifier,
            "max_iterations": self.max_iterations,
            "max_pattern_size": self.max_pattern_size,
            "min_case_frequency": self.min_case_frequency,
            "min_frequency_mode": self.min_frequency_mode,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "DiscoveryConfig":
        return cls(
            oracle=OracleConfig.from_dict(data.get("oracle", {})),
            directions=tuple(data.get("directions", DEFAULT_DIRECTIONS)),
            oi_transform=data.get("oi_transform", "raw"),
            distance=DistanceConfig.from_dict(data.get("distance", {})),
            rules=rules_from_names(data.get("rules", [rule.value for rule in BASE_RULES])),
            quantifier=data.get("quantifier", "any"),
            max_iterations=data.get("max_iterations", 3),
            max_pattern_size=data.get("max_pattern_size", DEFAULT_MAX_PATTERN_SIZE),
            min_case_frequency=data.get("min_case_frequency"),
            min_frequency_mode=data.get("min_frequency_mode", "pre_front"),
            seed=data.get("seed", 0),
        )


@dataclass
class Iteration:
    index: int
    candidates: list[MeasuredPattern]
    front_ids: tuple[str, ...]
    selected_foundational_ids: tuple[str, ...] = ()
    rules: tuple[ExtensionRule, ...] = ()
    off_front_selections: tuple[str, ...] = ()
    min_case_frequency: int | None = None

    def candidate_ids(self) -> tuple[str, ...]:
        return tuple(candidate.id for candidate in self.candidates)

    def front(self) -> list[MeasuredPattern]:
        wanted = set(self.front_ids)
        return [candidate for candidate in self.candidates if candidate.id in wanted]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "candidates": [candidate.to_dict() for candidate in self.candidates],
            "front_ids": list(self.front_ids),
            "selected_foundational_ids": list(self.selected_foundational_ids),
            "rules": [rule.value for rule in self.rules],
            "off_front_selections": list(self.off_front_selections),
            "min_case_frequency": self.min_case_frequency,
        }


@dataclass
class DiscoverySession:
    log: EventLog
    config: DiscoveryConfig
    iterations: list[Iteration] = field(default_factory=list)
    status: str = AWAITING_SELECTION
    _po_by_case: dict[str, POTrace] = field(default_factory=dict, repr=False)
    _fitted_distance: FittedDistance | None = field(default=None, repr=False)
    _patterns_by_id: dict[str, Pattern] = field(default_factory=dict, repr=False)
    _index_by_id: dict[str, InstanceIndex] = field(default_factory=dict, repr=False)
    _seen_keys: set[str] = field(default_factory=set, repr=False)

    @property
    def latest(self) -> Iteration:
        return self.iterations[-1]

    def pattern(self, pattern_id: str) -> Pattern | None:
        return self._patterns_by_id.get(pattern_id)

    def instance_index(self, pattern_id: str) -> InstanceIndex | None:
        return self._index_by_id.get(pattern_id)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "log": {
                "n_cases": len(self.log),
                "alphabet": list(self.log.activity_alphabet),
                "outcome_kind": self.log.outcome_kind,
            },
            "status": self.status,
            "iterations": [iteration.to_dict() for iteration in self.iterations],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")


def threshold_filter(
    candidates: Sequence[MeasuredPattern], min_case_frequency: int, n_cases: int
) -> list[MeasuredPattern]:
    """Keep candidates present in at least min_case_frequency cases."""
    if min_case_frequency < 0:
        raise ValueError("min_case_frequency must be non-negative")
    return [
        candidate
        for candidate in candidates
        if round(candidate.interest.cc * n_cases) >= min_case_frequency
    ]


def _measure(session: DiscoverySession, pattern: Pattern) -> MeasuredPattern:
    try:
        index = session._index_by_id.get(pattern.id)
        if index is None:
            index = instances_in_converted(pattern, session._po_by_case)
            session._index_by_id[pattern.id] = index
        vector = interest_vector(
            index, session.log, session._fitted_distance, session.config.oi_transform
        )
    except Exception:  # degenerate data must not sink the whole iteration
        logger.exception("measurement failed for pattern %s", pattern.id)
        vector = InterestVector(cc=0.0, oi=0.0, cd=0.0, degenerate=("error",))
    return MeasuredPattern(pattern=pattern, interest=vector)


def _close_iteration(
    session: DiscoverySession,
    candidates: list[MeasuredPattern],
    min_case_frequency: int | None,
) -> tuple[list[MeasuredPattern], tuple[str, ...]]:
    """Apply the configured threshold and compute the front."""
    mode = session.config.min_frequency_mode
    if min_case_frequency is not None and mode == "pre_front":
        candidates = threshold_filter(candidates, min_case_frequency, len(session.log))
        if not candidates:
            return [], ()
    front = pareto_front(candidates, session.config.directions)
    if min_case_frequency is not None and mode == "post_front":
        front = threshold_filter(front, min_case_frequency, len(session.log))
    return candidates, tuple(member.id for member in front)


def init_session(log: EventLog, cfg: DiscoveryConfig) -> DiscoverySession:
    """Measure every alphabet singleton and open the session at iteration 0."""
    session = DiscoverySession(log=log, config=cfg)
    session._po_by_case = convert_log(log, cfg.oracle)
    session._fitted_distance = FittedDistance.build(log, cfg.distance)

    candidates = []
    for activity in log.activity_alphabet:
        pattern = singleton_pattern(activity)
        session._patterns_by_id[pattern.id] = pattern
        candidates.append(_measure(session, pattern))

    front = pareto_front(candidates, cfg.directions)
    iteration = Iteration(
        index=0,
        candidates=candidates,
        front_ids=tuple(member.id for member in front),
    )
    session.iterations.append(iteration)
    session._seen_keys.update(candidate.pattern.canonical for candidate in candidates)
    session.status = AWAITING_SELECTION
    return session


def step(
    session: DiscoverySession,
    selected_ids: Sequence[str],
    rules: Sequence[ExtensionRule] | None = None,
    min_case_frequency: int | None = None,
) -> Iteration:
    """Extend the selected candidates of the latest iteration by one node.

    Raises NoExtensionPossible (and marks the session done) when nothing new
    can be generated, including when the frequency threshold removes every
    extension.
    """
    if session.status == DONE:
        raise NoExtensionPossible("session is already done")
    if session.status != AWAITING_SELECTION:
        raise RuntimeError(f"cannot step a session in state {session.status!r}")
    if not selected_ids:
        raise ValueError("select at least one pattern to extend")

    rules = tuple(rules) if rules is not None else session.config.rules
    if min_case_frequency is None:
        min_case_frequency = session.config.min_case_frequency

    previous = session.latest
    by_id = {candidate.id: candidate for candidate in previous.candidates}
    selected: list[MeasuredPattern] = []
    for pattern_id in selected_ids:
        if pattern_id not in by_id:
            raise UnknownPatternId(pattern_id)
        selected.append(by_id[pattern_id])

    front_ids = set(previous.front_ids)
    off_front = tuple(sorted({item.id for item in selected if item.id not in front_ids}))
    for item in selected:
        if item.id in off_front:
            item.selected_off_front = True

    session.status = EXTENDING
    try:
        grown: dict[str, Pattern] = {}
        for item in sorted(selected, key=lambda member: member.id):
            for candidate in extend_in_converted(
                item.pattern,
                session._po_by_case,
                rules,
                session.config.quantifier,
                session.config.max_pattern_size,
            ):
                grown.setdefault(candidate.canonical, candidate)

        candidates = []
        for key in sorted(grown):
            pattern = grown[key]
            session._patterns_by_id[pattern.id] = pattern
            candidates.append(_measure(session, pattern))

        if candidates:
            candidates, front_id_tuple = _close_iteration(session, candidates, min_case_frequency)
        else:
            front_id_tuple = ()
        if not candidates:
            session.status = DONE
            raise NoExtensionPossible(
                f"no extensions for {sorted(selected_ids)} under rules {[r.value for r in rules]}"
            )

        iteration = Iteration(
            index=previous.index + 1,
            candidates=candidates,
            front_ids=front_id_tuple,
            selected_foundational_ids=tuple(selected_ids),
            rules=rules,
            off_front_selections=off_front,
            min_case_frequency=min_case_frequency,
        )
        session.iterations.append(iteration)
        session.status = AWAITING_SELECTION
        return iteration
    except NoExtensionPossible:
        raise
    except Exception:
        session.status = AWAITING_SELECTION
        raise


def auto_discover(log: EventLog, cfg: DiscoveryConfig) -> DiscoverySession:
    """Run the loop hands-free: select the whole front every round.

    Stops at max_iterations, when no extension is possible, or when an
    iteration contributes no unseen pattern (novelty exhaustion).
    """
    session = init_session(log, cfg)
    while len(session.iterations) < cfg.max_iterations:
        selected = list(session.latest.front_ids)
        if not selected:
            session.status = DONE
            break
        try:
            iteration = step(session, selected)
        except NoExtensionPossible:
            break
        new_keys = {candidate.pattern.canonical for candidate in iteration.candidates}
        if new_keys <= session._seen_keys:
            session.status = DONE
            break
        session._seen_keys.update(new_keys)
    if len(session.iterations) >= cfg.max_iterations:
        session.status = DONE
    return session


def discovered_patterns(session: DiscoverySession) -> list[MeasuredPattern]:
    """Union of the fronts of all iterations, first occurrence wins."""
    seen: set[str] = set()
    result: list[MeasuredPattern] = []
    for iteration in session.iterations:
        for member in iteration.front():
            key = member.pattern.canonical
            if key not in seen:
                seen.add(key)
                result.append(member)
    return result


def all_candidates(session: DiscoverySession) -> list[MeasuredPattern]:
    """Every candidate generated in any iteration, deduplicated."""
    seen: set[str] = set()
    result: list[MeasuredPattern] = []
    for iteration in session.iterations:
        for candidate in iteration.candidates:
            key = candidate.pattern.canonical
            if key not in seen:
                seen.add(key)
                result.append(candidate)
    return result


def replay_session(log: EventLog, history: Mapping) -> DiscoverySession:
    """Re-run a recorded session's selections; the result must match it."""
    cfg = DiscoveryConfig.from_dict(history["config"])
    session = init_session(log, cfg)
    for record in history["iterations"][1:]:
        step(
            session,
            selected_ids=record["selected_foundational_ids"],
            rules=rules_from_names(record["rules"]),
            min_case_frequency=record["min_case_frequency"],
        )
    if history.get("status") == DONE:
        session.status = DONE
    return session

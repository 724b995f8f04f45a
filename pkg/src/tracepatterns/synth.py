"""Deterministic synthetic logs with planted patterns and known ground truth.

The generator plants a pattern template (an ordered list of concurrent
groups) as a contiguous run inside random filler events, ties the outcome to
the plant with controllable noise, and optionally adds an attribute that
confounds it.  Everything is a pure function of the seed, so tests can freeze
expectations against the recorded ground truth.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Mapping, Sequence

from .log_model import CaseAttributes, Event, EventLog, LogSchema, OutcomeValue, Trace
from .patterns import Pattern, normalize_relations

BASE_INSTANT = datetime(2020, 1, 1)

NUMERIC_ATTR = "x_num"
CATEGORICAL_ATTR = "x_cat"
CATEGORICAL_VALUES = ("u", "v", "w")


@dataclass(frozen=True)
class ConfoundSpec:
    """An attribute that leaks the plant: with probability `strength` its
    value is determined by pattern presence, otherwise it is random."""

    attr: str
    kind: str  # "numeric" | "categorical"
    strength: float

    def __post_init__(self) -> None:
        if self.kind not in ("numeric", "categorical"):
            raise ValueError(f"unknown confound kind {self.kind!r}")
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError("strength must lie in [0, 1]")


@dataclass(frozen=True)
class PlantSpec:
    """Planted template plus the knobs controlling its footprint.

    outcome_noise is a class flip probability given presence: a planted trace
    is labeled "pos" except with that probability, an unplanted trace is
    always "neg".  Continuous outcomes shift the mean for planted traces.
    """

    groups: tuple[tuple[str, ...], ...]
    plant_probability: float = 0.5
    outcome_noise: float = 0.05
    outcome_kind: str = "categorical"  # "categorical" | "continuous"
    n_traces: int = 100
    filler_range: tuple[int, int] = (4, 8)
    alphabet: tuple[str, ...] = ("f1", "f2", "f3", "f4")
    confound: ConfoundSpec | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.groups or any(not group for group in self.groups):
            raise ValueError("groups must be non-empty")
        for probability in (self.plant_probability, self.outcome_noise):
            if not 0.0 <= probability <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")
        if self.outcome_kind not in ("categorical", "continuous"):
            raise ValueError(f"unknown outcome kind {self.outcome_kind!r}")
        planted_labels = {label for group in self.groups for label in group}
        if planted_labels & set(self.alphabet):
            raise ValueError("filler alphabet must not reuse planted labels")
        if self.filler_range[0] < 0 or self.filler_range[0] > self.filler_range[1]:
            raise ValueError("bad filler range")
        if self.n_traces < 1:
            raise ValueError("need at least one trace")


@dataclass(frozen=True)
class GroundTruth:
    """What the generator planted, for oracle-style assertions."""

    pattern: Pattern
    planted_cases: Mapping[str, bool]
    planted_positions: Mapping[str, tuple[int, ...]]
    flipped_cases: tuple[str, ...] = ()

    def planted_count(self, case_id: str) -> int:
        return 1 if self.planted_cases.get(case_id) else 0

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern.to_dict(),
            "planted_cases": {case: bool(planted) for case, planted in self.planted_cases.items()},
            "planted_positions": {
                case: list(positions) for case, positions in self.planted_positions.items()
            },
            "flipped_cases": list(self.flipped_cases),
        }


def pattern_from_groups(groups: Sequence[Sequence[str]]) -> Pattern:
    """Pattern matching a contiguous run of concurrent groups.

    Labels inside one group are mutually concurrent; consecutive groups relate
    directly, non-consecutive ones eventually.
    """
    labels: list[str] = []
    group_of: list[int] = []
    for gi, group in enumerate(groups):
        for label in group:
            labels.append(label)
            group_of.append(gi)
    rel: dict[tuple[int, int], str] = {}
    for u in range(len(labels)):
        for v in range(u + 1, len(labels)):
            if group_of[u] == group_of[v]:
                rel[(u, v)] = "concurrent"
            elif group_of[v] == group_of[u] + 1:
                rel[(u, v)] = "direct"
            else:
                rel[(u, v)] = "eventual"
    labels_tuple = tuple(labels)
    return Pattern(labels=labels_tuple, relations=normalize_relations(labels_tuple, rel))


def synthetic_schema(spec: PlantSpec) -> LogSchema:
    numeric = [NUMERIC_ATTR]
    categorical = [CATEGORICAL_ATTR]
    if spec.confound is not None:
        (numeric if spec.confound.kind == "numeric" else categorical).append(spec.confound.attr)
    return LogSchema(
        outcome_kind=spec.outcome_kind,
        numeric_attrs=tuple(numeric),
        categorical_attrs=tuple(categorical),
    )


def _case_attributes(spec: PlantSpec, rng: random.Random, planted: bool) -> CaseAttributes:
    numeric: dict[str, float | None] = {NUMERIC_ATTR: round(rng.uniform(0.0, 100.0), 6)}
    categorical: dict[str, str] = {CATEGORICAL_ATTR: rng.choice(CATEGORICAL_VALUES)}
    confound = spec.confound
    if confound is not None:
        leaked = rng.random() < confound.strength
        if confound.kind == "numeric":
            if leaked:
                value = (80.0 if planted else 20.0) + rng.uniform(-5.0, 5.0)
            else:
                value = rng.uniform(0.0, 100.0)
            numeric[confound.attr] = round(value, 6)
        else:
            if leaked:
                categorical[confound.attr] = "cf_yes" if planted else "cf_no"
            else:
                categorical[confound.attr] = rng.choice(("cf_yes", "cf_no"))
    return CaseAttributes(numeric=numeric, categorical=categorical)


def _outcome(spec: PlantSpec, rng: random.Random, planted: bool) -> tuple[OutcomeValue, bool]:
    if spec.outcome_kind == "categorical":
        # noise is a flip probability given presence; the draw is consumed
        # unconditionally to keep the rng stream alignment-free
        flipped = rng.random() < spec.outcome_noise and planted
        label = "neg" if flipped else ("pos" if planted else "neg")
        return OutcomeValue("categorical", label), flipped
    value = 100.0 + (50.0 if planted else 0.0) + rng.gauss(0.0, 10.0)
    return OutcomeValue("continuous", round(max(value, 1.0), 6)), False


def generate(spec: PlantSpec) -> tuple[EventLog, GroundTruth]:
    """Build the log and its ground truth; identical seeds give identical logs."""
    planted_pattern = pattern_from_groups(spec.groups)
    schema = synthetic_schema(spec)
    width = max(4, len(str(spec.n_traces)))

    traces: dict[str, Trace] = {}
    planted_cases: dict[str, bool] = {}
    planted_positions: dict[str, tuple[int, ...]] = {}
    flipped: list[str] = []

    for index in range(spec.n_traces):
        case_id = f"c{index:0{width}d}"
        rng = random.Random(f"{spec.seed}:{case_id}")
        planted = rng.random() < spec.plant_probability
        filler_count = rng.randint(*spec.filler_range)
        insert_at = rng.randint(0, filler_count) if planted else -1

        day = 0
        events: list[Event] = []
        positions: list[int] = []

        def add_event(activity: str, event_day: int) -> None:
            events.append(
                Event(
                    activity=activity,
                    case_id=case_id,
                    timestamp=BASE_INSTANT + timedelta(days=event_day),
                )
            )

        for slot in range(filler_count + 1):
            if planted and slot == insert_at:
                for group in spec.groups:
                    day += 1
                    for label in group:
                        positions.append(len(events))
                        add_event(label, day)
            if slot < filler_count:
                day += 1
                add_event(rng.choice(spec.alphabet), day)

        outcome, was_flipped = _outcome(spec, rng, planted)
        if was_flipped:
            flipped.append(case_id)
        traces[case_id] = Trace(
            case_id=case_id,
            events=tuple(events),
            case_attrs=_case_attributes(spec, rng, planted),
            outcome=outcome,
        )
        planted_cases[case_id] = planted
        planted_positions[case_id] = tuple(positions)

    log = EventLog(traces=traces, schema=schema)
    truth = GroundTruth(
        pattern=planted_pattern,
        planted_cases=planted_cases,
        planted_positions=planted_positions,
        flipped_cases=tuple(flipped),
    )
    return log, truth

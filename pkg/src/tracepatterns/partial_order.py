"""Conversion of traces into partially ordered traces (labeled DAGs).

A conversion oracle groups events into concurrency blocks: events inside one
block are mutually unordered, blocks follow each other.  The DAG is the
block-chain with complete bipartite edges between consecutive blocks; its
transitive closure answers direct / eventual / concurrent queries for any
event pair.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from typing import Iterable, Sequence

import numpy as np

from .log_model import Event, Trace

logger = logging.getLogger(__name__)

DIRECT = "direct"
EVENTUAL = "eventual"
CONCURRENT = "concurrent"
INVERSE_DIRECT = "inverse-direct"
INVERSE_EVENTUAL = "inverse-eventual"

RELATION_KINDS = (DIRECT, EVENTUAL, CONCURRENT, INVERSE_DIRECT, INVERSE_EVENTUAL)

# compact codes used in the per-trace relation table
_CODE_CONCURRENT = 0
_CODE_DIRECT = 1
_CODE_EVENTUAL = 2
_CODE_INV_DIRECT = 3
_CODE_INV_EVENTUAL = 4

_CODE_NAMES = {
    _CODE_CONCURRENT: CONCURRENT,
    _CODE_DIRECT: DIRECT,
    _CODE_EVENTUAL: EVENTUAL,
    _CODE_INV_DIRECT: INVERSE_DIRECT,
    _CODE_INV_EVENTUAL: INVERSE_EVENTUAL,
}

_DURATION_RE = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*([dhms])\s*$")
_DURATION_UNITS = {"d": 86400.0, "h": 3600.0, "m": 60.0, "s": 1.0}


class IndexOutOfRange(Exception):
    def __init__(self, index: int, size: int) -> None:
        super().__init__(f"event index {index} out of range for trace of {size} events")


def parse_duration(text: str) -> timedelta:
    """Parse config durations like "3d", "12h", "30m", "45s"."""
    match = _DURATION_RE.match(text)
    if not match:
        raise ValueError(f"cannot parse duration {text!r}")
    return timedelta(seconds=float(match.group(1)) * _DURATION_UNITS[match.group(2)])


def format_duration(delta: timedelta) -> str:
    seconds = delta.total_seconds()
    for unit in "dhm":
        size = _DURATION_UNITS[unit]
        if seconds % size == 0:
            return f"{int(seconds // size)}{unit}"
    return f"{int(seconds)}s"


@dataclass(frozen=True)
class ConcurrencyRule:
    """One grouping rule of the conversion oracle.

    start-window groups runs of events whose start times all fall within
    `window` of the run's first event; same-interval groups runs that start on
    the same calendar day and end on the same calendar day.  The end instant
    is read from the `end_attr` event attribute when given, otherwise events
    are treated as instantaneous.  `activity_scope=None` means all activities.
    """

    kind: str  # "start-window" | "same-interval"
    activity_scope: frozenset[str] | None = None
    window: timedelta | None = None
    end_attr: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("start-window", "same-interval"):
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.kind == "start-window":
            if self.window is None:
                raise ValueError("start-window rule needs a window")
            if self.window < timedelta(0):
                raise ValueError("window must be non-negative")

    def in_scope(self, event: Event) -> bool:
        return self.activity_scope is None or event.activity in self.activity_scope

    def to_dict(self) -> dict:
        data: dict = {"kind": self.kind}
        if self.activity_scope is not None:
            data["activity_scope"] = sorted(self.activity_scope)
        if self.window is not None:
            data["window"] = format_duration(self.window)
        if self.end_attr is not None:
            data["end_attr"] = self.end_attr
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ConcurrencyRule":
        scope = data.get("activity_scope")
        window = data.get("window")
        return cls(
            kind=data["kind"],
            activity_scope=frozenset(scope) if scope is not None else None,
            window=parse_duration(window) if isinstance(window, str) else window,
            end_attr=data.get("end_attr"),
        )


@dataclass(frozen=True)
class OracleConfig:
    """Ordered concurrency rules plus the policy for leftover timestamp ties."""

    rules: tuple[ConcurrencyRule, ...] = ()
    tie_policy: str = "concurrent"  # "concurrent" | "lexicographic"

    def __post_init__(self) -> None:
        if self.tie_policy not in ("concurrent", "lexicographic"):
            raise ValueError(f"unknown tie policy {self.tie_policy!r}")

    def to_dict(self) -> dict:
        return {"rules": [rule.to_dict() for rule in self.rules], "tie_policy": self.tie_policy}

    @classmethod
    def from_dict(cls, data: dict) -> "OracleConfig":
        return cls(
            rules=tuple(ConcurrencyRule.from_dict(r) for r in data.get("rules", ())),
            tie_policy=data.get("tie_policy", "concurrent"),
        )


@dataclass(frozen=True)
class POTrace:
    """A trace as a DAG: ordered concurrency blocks over its events.

    `events` are in canonical order (block by block); A is the upper-triangular
    adjacency matrix of the block-chain and R its transitive closure over paths
    of length >= 1.
    """

    case_id: str
    events: tuple[Event, ...]
    blocks: tuple[tuple[int, ...], ...]
    A: np.ndarray = field(compare=False)
    R: np.ndarray = field(compare=False)
    _codes: tuple[tuple[int, ...], ...] = field(repr=False, compare=False, default=())
    _by_label: dict = field(repr=False, compare=False, default_factory=dict)

    def __len__(self) -> int:
        return len(self.events)

    def events_with_label(self, label: str) -> tuple[int, ...]:
        return self._by_label.get(label, ())

    def relation_code(self, e: int, e2: int) -> int:
        return self._codes[e][e2]


def _end_instant(event: Event, rule: ConcurrencyRule) -> datetime:
    if rule.end_attr is None:
        return event.timestamp
    raw = event.event_attrs.get(rule.end_attr)
    if raw is None or raw == "":
        return event.timestamp
    if isinstance(raw, datetime):
        return raw
    try:
        return datetime.fromisoformat(str(raw))
    except ValueError:
        logger.warning("event end attribute %r=%r not parseable; using start", rule.end_attr, raw)
        return event.timestamp


def _interval_days(event: Event, rule: ConcurrencyRule) -> tuple[date, date]:
    return event.timestamp.date(), _end_instant(event, rule).date()


def _rule_blocks(events: Sequence[Event], rule: ConcurrencyRule, taken: list[bool]) -> list[list[int]]:
    """Maximal contiguous runs of free, in-scope events satisfying the rule."""
    blocks: list[list[int]] = []
    i = 0
    n = len(events)
    while i < n:
        if taken[i] or not rule.in_scope(events[i]):
            i += 1
            continue
        run = [i]
        if rule.kind == "same-interval":
            anchor = _interval_days(events[i], rule)
            matches = lambda j: _interval_days(events[j], rule) == anchor  # noqa: E731
        else:
            start = events[i].timestamp
            matches = lambda j: events[j].timestamp - start <= rule.window  # noqa: E731
        j = i + 1
        while j < n and rule.in_scope(events[j]) and matches(j):
            if taken[j]:
                logger.warning(
                    "trace %s: event %d matches rule %s but belongs to an earlier block "
                    "(first-rule-wins)", events[j].case_id, j, rule.kind,
                )
                break
            run.append(j)
            j += 1
        if len(run) >= 2:
            blocks.append(run)
            i = run[-1] + 1
        else:
            i += 1
    return blocks


def _tie_blocks(events: Sequence[Event], taken: list[bool]) -> list[list[int]]:
    """Contiguous runs of free events sharing one timestamp."""
    blocks: list[list[int]] = []
    i = 0
    n = len(events)
    while i < n:
        if taken[i]:
            i += 1
            continue
        run = [i]
        j = i + 1
        while j < n and not taken[j] and events[j].timestamp == events[i].timestamp:
            run.append(j)
            j += 1
        if len(run) >= 2:
            blocks.append(run)
        i = run[-1] + 1
    return blocks


def _sort_tied_singletons(grouped: list[list[int]], events: Sequence[Event]) -> None:
    """Order equal-timestamp singleton blocks by activity label.

    Only maximal stretches of singleton blocks sharing one timestamp are
    reordered; rule-made blocks keep their position.
    """
    start = 0
    while start < len(grouped):
        run = grouped[start]
        if len(run) != 1:
            start += 1
            continue
        stamp = events[run[0]].timestamp
        stop = start
        while (
            stop + 1 < len(grouped)
            and len(grouped[stop + 1]) == 1
            and events[grouped[stop + 1][0]].timestamp == stamp
        ):
            stop += 1
        if stop > start:
            grouped[start : stop + 1] = sorted(
                grouped[start : stop + 1],
                key=lambda block: (events[block[0]].activity, block[0]),
            )
        start = stop + 1


def transitive_closure(adjacency: np.ndarray) -> np.ndarray:
    """Boolean reachability (paths of length >= 1) by Floyd-Warshall."""
    reach = adjacency.astype(bool).copy()
    for k in range(reach.shape[0]):
        reach |= np.outer(reach[:, k], reach[k, :])
    return reach.astype(np.uint8)


def build_partial_order(trace: Trace, oracle: OracleConfig) -> POTrace:
    """Partition a trace into concurrency blocks and build the block-chain DAG."""
    original = list(trace.events)
    n = len(original)
    taken = [False] * n
    grouped: list[list[int]] = []

    for rule in oracle.rules:
        for run in _rule_blocks(original, rule, taken):
            grouped.append(run)
            for index in run:
                taken[index] = True

    if oracle.tie_policy == "concurrent":
        for run in _tie_blocks(original, taken):
            grouped.append(run)
            for index in run:
                taken[index] = True

    for index in range(n):
        if not taken[index]:
            grouped.append([index])

    grouped.sort(key=lambda run: run[0])
    if oracle.tie_policy == "lexicographic":
        _sort_tied_singletons(grouped, original)

    order = [index for run in grouped for index in run]
    events = tuple(original[index] for index in order)

    blocks: list[tuple[int, ...]] = []
    cursor = 0
    for run in grouped:
        blocks.append(tuple(range(cursor, cursor + len(run))))
        cursor += len(run)

    adjacency = np.zeros((n, n), dtype=np.uint8)
    for left, right in zip(blocks, blocks[1:]):
        for e in left:
            for f in right:
                adjacency[e, f] = 1
    reach = transitive_closure(adjacency)

    codes = np.full((n, n), _CODE_CONCURRENT, dtype=np.int8)
    codes[adjacency == 1] = _CODE_DIRECT
    codes[(adjacency == 0) & (reach == 1)] = _CODE_EVENTUAL
    codes[adjacency.T == 1] = _CODE_INV_DIRECT
    codes[(adjacency.T == 0) & (reach.T == 1)] = _CODE_INV_EVENTUAL

    label_lists: dict[str, list[int]] = {}
    for index, event in enumerate(events):
        label_lists.setdefault(event.activity, []).append(index)
    by_label = {label: tuple(indices) for label, indices in label_lists.items()}

    return POTrace(
        case_id=trace.case_id,
        events=events,
        blocks=tuple(blocks),
        A=adjacency,
        R=reach,
        _codes=tuple(tuple(int(v) for v in row) for row in codes),
        _by_label=by_label,
    )


def relation(po: POTrace, e: int, e2: int) -> str:
    """Classify the ordering relation between two distinct events."""
    size = len(po)
    for index in (e, e2):
        if not 0 <= index < size:
            raise IndexOutOfRange(index, size)
    if e == e2:
        raise ValueError("relation is defined for distinct events only")
    return _CODE_NAMES[po._codes[e][e2]]


def convert_log(traces: Iterable[Trace], oracle: OracleConfig) -> dict[str, POTrace]:
    """Convert every trace once; keyed by case id."""
    return {trace.case_id: build_partial_order(trace, oracle) for trace in traces}

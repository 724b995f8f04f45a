"""Event log loading and validation.

An event log is read from a CSV file under a declarative schema: one row per
event, one trace per case id, one outcome value per case.  Loaded logs are
immutable and every downstream vector (outcomes, pattern frequencies) uses the
canonical trace order, which is case-id lexicographic regardless of file
layout.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path
from typing import Iterator, Mapping

logger = logging.getLogger(__name__)

MISSING_CATEGORY = "__missing__"

DEFAULT_TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%S"


class LogError(Exception):
    """Base class for event log ingestion failures."""


class MissingColumn(LogError):
    def __init__(self, column: str) -> None:
        super().__init__(f"declared column {column!r} not found in CSV header")
        self.column = column


class UnparseableTimestamp(LogError):
    def __init__(self, row: int, value: str) -> None:
        super().__init__(f"row {row}: cannot parse timestamp {value!r}")
        self.row = row
        self.value = value


class InconsistentOutcome(LogError):
    def __init__(self, case_id: str) -> None:
        super().__init__(f"case {case_id!r} carries conflicting outcome values")
        self.case_id = case_id


class EmptyLog(LogError):
    def __init__(self) -> None:
        super().__init__("CSV contains no event rows")


@dataclass(frozen=True)
class LogSchema:
    """Column layout of an event log CSV."""

    case_id_col: str = "case_id"
    activity_col: str = "activity"
    timestamp_col: str = "timestamp"
    outcome_col: str = "outcome"
    outcome_kind: str = "continuous"  # "continuous" | "categorical"
    numeric_attrs: tuple[str, ...] = ()
    categorical_attrs: tuple[str, ...] = ()
    timestamp_format: str = DEFAULT_TIMESTAMP_FORMAT
    delimiter: str = ","

    def __post_init__(self) -> None:
        if self.outcome_kind not in ("continuous", "categorical"):
            raise ValueError(f"unknown outcome kind {self.outcome_kind!r}")
        overlap = set(self.numeric_attrs) & set(self.categorical_attrs)
        if overlap:
            raise ValueError(f"attributes declared both numeric and categorical: {sorted(overlap)}")

    @property
    def declared_columns(self) -> tuple[str, ...]:
        return (
            self.case_id_col,
            self.activity_col,
            self.timestamp_col,
            self.outcome_col,
            *self.numeric_attrs,
            *self.categorical_attrs,
        )

    def to_dict(self) -> dict:
        return {
            "case_id_col": self.case_id_col,
            "activity_col": self.activity_col,
            "timestamp_col": self.timestamp_col,
            "outcome_col": self.outcome_col,
            "outcome_kind": self.outcome_kind,
            "numeric_attrs": list(self.numeric_attrs),
            "categorical_attrs": list(self.categorical_attrs),
            "timestamp_format": self.timestamp_format,
            "delimiter": self.delimiter,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "LogSchema":
        kwargs = dict(data)
        for key in ("numeric_attrs", "categorical_attrs"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class Event:
    activity: str
    case_id: str
    timestamp: datetime
    event_attrs: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.activity:
            raise ValueError("event activity must be non-empty")


@dataclass(frozen=True)
class CaseAttributes:
    """Initial case attributes, split by declared type.

    Missing numeric values are stored as None and imputed where a distance
    needs them; missing categoricals collapse to the sentinel category.
    """

    numeric: Mapping[str, float | None] = field(default_factory=dict)
    categorical: Mapping[str, str] = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CaseAttributes):
            return NotImplemented
        return dict(self.numeric) == dict(other.numeric) and dict(self.categorical) == dict(
            other.categorical
        )


@dataclass(frozen=True)
class OutcomeValue:
    kind: str  # "continuous" | "categorical"
    value: float | str | None

    def __post_init__(self) -> None:
        if self.kind not in ("continuous", "categorical"):
            raise ValueError(f"unknown outcome kind {self.kind!r}")


@dataclass(frozen=True)
class Trace:
    case_id: str
    events: tuple[Event, ...]
    case_attrs: CaseAttributes
    outcome: OutcomeValue

    def __post_init__(self) -> None:
        if not self.events:
            raise ValueError(f"trace {self.case_id!r} has no events")
        for prev, cur in zip(self.events, self.events[1:]):
            if cur.timestamp < prev.timestamp:
                raise ValueError(f"trace {self.case_id!r} events are not time-ordered")
        if any(e.case_id != self.case_id for e in self.events):
            raise ValueError(f"trace {self.case_id!r} contains foreign events")

    def __len__(self) -> int:
        return len(self.events)

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)


@dataclass(frozen=True)
class EventLog:
    """Immutable event log keyed by case id."""

    traces: Mapping[str, Trace]
    schema: LogSchema

    def __post_init__(self) -> None:
        if not self.traces:
            raise EmptyLog()

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[Trace]:
        """Traces in canonical (case-id lexicographic) order."""
        for case_id in self.case_ids:
            yield self.traces[case_id]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventLog):
            return NotImplemented
        return dict(self.traces) == dict(other.traces) and self.schema == other.schema

    @property
    def case_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.traces))

    @property
    def activity_alphabet(self) -> tuple[str, ...]:
        labels: set[str] = set()
        for trace in self.traces.values():
            labels.update(trace.activities)
        return tuple(sorted(labels))

    @property
    def outcome_kind(self) -> str:
        return self.schema.outcome_kind


@dataclass(frozen=True)
class ValidationReport:
    n_cases: int
    n_activities: int
    n_events: int
    n_variants: int
    warnings: tuple[str, ...]

    @property
    def clean(self) -> bool:
        return not self.warnings


def _parse_timestamp(value: str, fmt: str, row: int) -> datetime:
    try:
        return datetime.strptime(value, fmt)
    except ValueError as exc:
        raise UnparseableTimestamp(row, value) from exc


def _parse_outcome(raw: str, kind: str) -> float | str | None:
    if raw == "":
        return None
    if kind == "continuous":
        try:
            return float(raw)
        except ValueError as exc:
            raise ValueError(f"continuous outcome {raw!r} is not numeric") from exc
    return raw


def _case_attributes(row: Mapping[str, str], schema: LogSchema, case_id: str) -> CaseAttributes:
    numeric: dict[str, float | None] = {}
    for name in schema.numeric_attrs:
        raw = row.get(name, "")
        if raw == "":
            numeric[name] = None
        else:
            try:
                numeric[name] = float(raw)
            except ValueError:
                logger.warning("case %s: numeric attribute %s=%r treated as missing", case_id, name, raw)
                numeric[name] = None
    categorical = {
        name: (row.get(name) or MISSING_CATEGORY) for name in schema.categorical_attrs
    }
    return CaseAttributes(numeric=numeric, categorical=categorical)


def load_event_log(path: str | Path, schema: LogSchema) -> EventLog:
    """Load a CSV event log, grouping rows into timestamp-sorted traces.

    Case attributes come from the earliest event of each case; the outcome
    must be consistent across all rows of a case.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle, delimiter=schema.delimiter)
        header = reader.fieldnames or []
        for column in schema.declared_columns:
            if column not in header:
                raise MissingColumn(column)

        rows_by_case: dict[str, list[tuple[datetime, int, Mapping[str, str]]]] = {}
        for index, row in enumerate(reader):
            timestamp = _parse_timestamp(row[schema.timestamp_col], schema.timestamp_format, index + 2)
            rows_by_case.setdefault(row[schema.case_id_col], []).append((timestamp, index, row))

    if not rows_by_case:
        raise EmptyLog()

    known = set(schema.declared_columns)
    traces: dict[str, Trace] = {}
    for case_id, entries in rows_by_case.items():
        entries.sort(key=lambda item: (item[0], item[1]))  # stable on equal timestamps

        outcomes = {row[schema.outcome_col] for _, _, row in entries if row[schema.outcome_col] != ""}
        if len(outcomes) > 1:
            raise InconsistentOutcome(case_id)
        outcome_raw = outcomes.pop() if outcomes else ""
        outcome = OutcomeValue(schema.outcome_kind, _parse_outcome(outcome_raw, schema.outcome_kind))

        first_row = entries[0][2]
        case_attrs = _case_attributes(first_row, schema, case_id)
        for _, _, row in entries[1:]:
            for name in (*schema.numeric_attrs, *schema.categorical_attrs):
                if row.get(name, "") not in ("", first_row.get(name, "")):
                    logger.warning(
                        "case %s: ignoring later-row value %r for case attribute %s",
                        case_id, row[name], name,
                    )

        events = tuple(
            Event(
                activity=row[schema.activity_col],
                case_id=case_id,
                timestamp=timestamp,
                event_attrs={k: v for k, v in row.items() if k not in known and v != ""},
            )
            for timestamp, _, row in entries
        )
        traces[case_id] = Trace(case_id=case_id, events=events, case_attrs=case_attrs, outcome=outcome)

    return EventLog(traces=traces, schema=schema)


def export_event_log(log: EventLog, path: str | Path) -> None:
    """Write a log back to CSV in its schema's column layout (round-trippable)."""
    schema = log.schema
    extra_event_cols = sorted(
        {key for trace in log for event in trace.events for key in event.event_attrs}
    )
    columns = [*schema.declared_columns, *extra_event_cols]
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, delimiter=schema.delimiter)
        writer.writerow(columns)
        for trace in log:
            for position, event in enumerate(trace.events):
                row: dict[str, str] = {
                    schema.case_id_col: trace.case_id,
                    schema.activity_col: event.activity,
                    schema.timestamp_col: event.timestamp.strftime(schema.timestamp_format),
                    schema.outcome_col: _format_outcome(trace.outcome),
                }
                if position == 0:
                    for name in schema.numeric_attrs:
                        value = trace.case_attrs.numeric.get(name)
                        row[name] = "" if value is None else _format_number(value)
                    for name in schema.categorical_attrs:
                        value = trace.case_attrs.categorical.get(name, MISSING_CATEGORY)
                        row[name] = "" if value == MISSING_CATEGORY else value
                for key, value in event.event_attrs.items():
                    row[key] = str(value)
                writer.writerow([row.get(col, "") for col in columns])


def _format_outcome(outcome: OutcomeValue) -> str:
    if outcome.value is None:
        return ""
    if outcome.kind == "continuous":
        return _format_number(float(outcome.value))
    return str(outcome.value)


def _format_number(value: float) -> str:
    return repr(int(value)) if float(value).is_integer() else repr(value)


def outcome_vector(log: EventLog) -> tuple[OutcomeValue, ...]:
    """Per-trace outcomes in canonical trace order."""
    return tuple(trace.outcome for trace in log)


def validate_log(log: EventLog) -> ValidationReport:
    """Report-only sanity check: missing outcomes or declared attributes."""
    warnings: list[str] = []
    n_events = 0
    variants: set[tuple[str, ...]] = set()
    for trace in log:
        n_events += len(trace)
        variants.add(trace.activities)
        if trace.outcome.value is None:
            warnings.append(f"case {trace.case_id}: missing outcome")
        for name, value in trace.case_attrs.numeric.items():
            if value is None:
                warnings.append(f"case {trace.case_id}: missing numeric attribute {name}")
        for name, value in trace.case_attrs.categorical.items():
            if value == MISSING_CATEGORY:
                warnings.append(f"case {trace.case_id}: missing categorical attribute {name}")
    return ValidationReport(
        n_cases=len(log),
        n_activities=len(log.activity_alphabet),
        n_events=n_events,
        n_variants=len(variants),
        warnings=tuple(warnings),
    )


def bin_outcome_equal_frequency(log: EventLog, n_classes: int, labels: tuple[str, ...] | None = None) -> EventLog:
    """Rebuild a continuous-outcome log with an equal-frequency categorical outcome.

    Cases are ranked by (value, case_id) and dealt into n_classes contiguous
    groups whose sizes differ by at most one.
    """
    if log.outcome_kind != "continuous":
        raise ValueError("equal-frequency binning applies to continuous outcomes only")
    if n_classes < 2:
        raise ValueError("need at least 2 classes")
    if labels is None:
        labels = tuple(f"q{i + 1}" for i in range(n_classes))
    if len(labels) != n_classes:
        raise ValueError("label count must equal n_classes")

    if any(trace.outcome.value is None for trace in log):
        raise ValueError("cannot bin a log with missing outcomes")
    ranked = sorted(log, key=lambda t: (float(t.outcome.value), t.case_id))  # type: ignore[arg-type]

    base, remainder = divmod(len(ranked), n_classes)
    assignment: dict[str, str] = {}
    start = 0
    for class_index in range(n_classes):
        size = base + (1 if class_index < remainder else 0)
        for trace in ranked[start : start + size]:
            assignment[trace.case_id] = labels[class_index]
        start += size

    new_schema = replace(log.schema, outcome_kind="categorical")
    new_traces = {
        case_id: replace(
            trace,
            outcome=OutcomeValue("categorical", assignment[case_id]),
        )
        for case_id, trace in log.traces.items()
    }
    return EventLog(traces=new_traces, schema=new_schema)

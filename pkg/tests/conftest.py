"""Shared builders for compact in-test event logs."""

from __future__ import annotations

from datetime import datetime, timedelta

import pytest

from tracepatterns.log_model import (
    CaseAttributes,
    Event,
    EventLog,
    LogSchema,
    OutcomeValue,
    Trace,
)

START = datetime(2021, 1, 1)

Step = str | tuple[str, ...]


def make_trace(
    case_id: str,
    steps: list[Step],
    outcome: float | str | None = 0.0,
    outcome_kind: str = "continuous",
    numeric: dict[str, float | None] | None = None,
    categorical: dict[str, str] | None = None,
) -> Trace:
    """One day per step; a tuple step emits its activities at one timestamp."""
    events: list[Event] = []
    for day, step in enumerate(steps):
        labels = (step,) if isinstance(step, str) else step
        for label in labels:
            events.append(
                Event(activity=label, case_id=case_id, timestamp=START + timedelta(days=day))
            )
    return Trace(
        case_id=case_id,
        events=tuple(events),
        case_attrs=CaseAttributes(numeric=numeric or {}, categorical=categorical or {}),
        outcome=OutcomeValue(outcome_kind, outcome),
    )


def make_log(traces: list[Trace], schema: LogSchema | None = None) -> EventLog:
    if schema is None:
        kinds = {t.outcome.kind for t in traces}
        assert len(kinds) == 1
        numeric = tuple(sorted({k for t in traces for k in t.case_attrs.numeric}))
        categorical = tuple(sorted({k for t in traces for k in t.case_attrs.categorical}))
        schema = LogSchema(
            outcome_kind=kinds.pop(), numeric_attrs=numeric, categorical_attrs=categorical
        )
    return EventLog(traces={t.case_id: t for t in traces}, schema=schema)


@pytest.fixture
def chain_log() -> EventLog:
    """Four continuous-outcome traces over the a/b/c/d alphabet."""
    return make_log(
        [
            make_trace("c1", ["a", "b", "c"], outcome=10.0),
            make_trace("c2", ["a", "b", "d"], outcome=20.0),
            make_trace("c3", ["b", "c"], outcome=30.0),
            make_trace("c4", ["d"], outcome=40.0),
        ]
    )

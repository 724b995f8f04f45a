"""HTTP/JSON service hosting interactive discovery sessions.

Logs are uploaded once and referenced by id; each session runs the iterative
loop over one log.  Sessions live in memory for the server's lifetime and are
exported as JSON (the same document the CLI writes and the replay API
consumes).  Per-session mutation is single-writer: a second extend call while
one is running is answered 409.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field as dataclass_field
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal, Mapping

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .discovery import (
    DiscoveryConfig,
    DiscoverySession,
    NoExtensionPossible,
    UnknownPatternId,
    init_session,
    step,
)
from .extension import rules_from_names
from .interest import dashboard_stats
from .log_model import EventLog, LogError, LogSchema, load_event_log, validate_log
from .patterns import instances_in_converted

DEFAULT_PORT = 8765
MAX_UPLOAD_BYTES = 100 * 1024 * 1024
MAX_SESSION_CANDIDATES = 100_000


# ---------------------------------------------------------------------------
# request / response models


class LogSchemaModel(BaseModel):
    case_id_col: str = "case_id"
    activity_col: str = "activity"
    timestamp_col: str = "timestamp"
    outcome_col: str = "outcome"
    outcome_kind: Literal["continuous", "categorical"] = "continuous"
    numeric_attrs: list[str] = []
    categorical_attrs: list[str] = []
    timestamp_format: str = "%Y-%m-%dT%H:%M:%S"
    delimiter: str = ","

    def to_schema(self) -> LogSchema:
        return LogSchema.from_dict(self.model_dump())


class LogUploadRequest(BaseModel):
    csv_text: str | None = None
    path: str | None = None
    schema_: LogSchemaModel = Field(default_factory=LogSchemaModel, alias="schema")

    model_config = ConfigDict(populate_by_name=True)


class LogSummary(BaseModel):
    log_id: str
    n_cases: int
    n_activities: int
    n_events: int
    n_variants: int
    alphabet: list[str]
    outcome_kind: str
    warnings: list[str]


class ConcurrencyRuleModel(BaseModel):
    kind: Literal["start-window", "same-interval"]
    activity_scope: list[str] | None = None
    window: str | None = None
    end_attr: str | None = None


class OracleConfigModel(BaseModel):
    rules: list[ConcurrencyRuleModel] = []
    tie_policy: Literal["concurrent", "lexicographic"] = "concurrent"


class DistanceConfigModel(BaseModel):
    numeric_attrs: list[str] = []
    categorical_attrs: list[str] = []
    aggregation: Literal["pair_mean", "scaled_sum"] = "pair_mean"


class DiscoveryConfigModel(BaseModel):
    oracle: OracleConfigModel = OracleConfigModel()
    directions: list[Literal["max", "min"]] = ["max", "max", "min"]
    oi_transform: Literal["raw", "abs"] = "raw"
    distance: DistanceConfigModel = DistanceConfigModel()
    rules: list[Literal["df", "dp", "conc", "ef", "ep", "dc"]] = ["df", "dp", "conc", "ef", "ep"]
    quantifier: Literal["any", "all"] = "any"
    max_iterations: int = Field(default=3, ge=1)
    max_pattern_size: int = Field(default=10, ge=1)
    min_case_frequency: int | None = Field(default=None, ge=0)
    min_frequency_mode: Literal["pre_front", "post_front"] = "pre_front"
    seed: int = 0

    def to_config(self) -> DiscoveryConfig:
        return DiscoveryConfig.from_dict(self.model_dump())


class SessionCreateRequest(BaseModel):
    log_id: str
    config: DiscoveryConfigModel = DiscoveryConfigModel()


class PatternNodeModel(BaseModel):
    id: int
    label: str


class PatternRelationModel(BaseModel):
    from_: int = Field(alias="from")
    to: int
    kind: Literal["direct", "eventual", "concurrent"]

    model_config = ConfigDict(populate_by_name=True)


class PatternModel(BaseModel):
    nodes: list[PatternNodeModel]
    relations: list[PatternRelationModel]
    foundational: str | None = None


class InterestModel(BaseModel):
    cc: float
    oi: float
    cd: float
    degenerate: list[str] = []


class CandidateModel(BaseModel):
    pattern: PatternModel
    id: str
    interest: InterestModel
    front: bool


class IterationModel(BaseModel):
    index: int
    candidates: list[CandidateModel]
    front_ids: list[str]
    selected_foundational_ids: list[str]
    rules: list[str]
    off_front_selections: list[str]
    min_case_frequency: int | None = None


class SessionSummary(BaseModel):
    session_id: str
    log_id: str
    status: str
    created_at: str
    iteration: IterationModel


class SessionDetail(BaseModel):
    session_id: str
    log_id: str
    status: str
    created_at: str
    config: DiscoveryConfigModel
    iterations: list[IterationModel]


class ExtendRequest(BaseModel):
    pattern_ids: list[str] = Field(min_length=1)
    rules: list[Literal["df", "dp", "conc", "ef", "ep", "dc"]] | None = None
    min_case_frequency: int | None = Field(default=None, ge=0)


class ExtendResponse(BaseModel):
    status: str
    iteration: IterationModel | None = None


class HistogramModel(BaseModel):
    count: int
    mean: float | None
    median: float | None
    bin_edges: list[float]
    bin_counts: list[int]


class NumericComparisonModel(BaseModel):
    in_: HistogramModel = Field(alias="in")
    out: HistogramModel

    model_config = ConfigDict(populate_by_name=True)


class CategoricalComparisonModel(BaseModel):
    in_: dict[str, float] = Field(alias="in")
    out: dict[str, float]

    model_config = ConfigDict(populate_by_name=True)


class DashboardModel(BaseModel):
    pattern: PatternModel
    interest: InterestModel
    n_in: int
    n_out: int
    categorical: dict[str, CategoricalComparisonModel]
    numeric: dict[str, NumericComparisonModel]
    median_outcome_in: float | None
    median_outcome_out: float | None
    outcome_classes_in: dict[str, float] | None
    outcome_classes_out: dict[str, float] | None
    km_in: list[list[float]] | None
    km_out: list[list[float]] | None
    log_rank_stat: float | None
    log_rank_p: float | None


# ---------------------------------------------------------------------------
# server state


@dataclass
class SessionEntry:
    session_id: str
    log_id: str
    session: DiscoverySession
    created_at: str
    lock: threading.Lock = dataclass_field(default_factory=threading.Lock)

    def candidate_total(self) -> int:
        return sum(len(iteration.candidates) for iteration in self.session.iterations)


@dataclass
class AppState:
    logs_dir: Path
    logs: dict[str, EventLog] = dataclass_field(default_factory=dict)
    sessions: dict[str, SessionEntry] = dataclass_field(default_factory=dict)
    max_upload_bytes: int = MAX_UPLOAD_BYTES
    max_session_candidates: int = MAX_SESSION_CANDIDATES
    _log_counter: itertools.count = dataclass_field(default_factory=lambda: itertools.count(1))
    _session_counter: itertools.count = dataclass_field(default_factory=lambda: itertools.count(1))

    def next_log_id(self) -> str:
        return f"log-{next(self._log_counter):04d}"

    def next_session_id(self) -> str:
        return f"session-{next(self._session_counter):04d}"


def _iteration_model(iteration) -> IterationModel:
    return IterationModel.model_validate(iteration.to_dict())


def _session_detail(entry: SessionEntry) -> SessionDetail:
    return SessionDetail(
        session_id=entry.session_id,
        log_id=entry.log_id,
        status=entry.session.status,
        created_at=entry.created_at,
        config=DiscoveryConfigModel.model_validate(entry.session.config.to_dict()),
        iterations=[_iteration_model(it) for it in entry.session.iterations],
    )


def create_app(
    logs_dir: str | Path | None = None, ui_dir: str | Path | None = None
) -> FastAPI:
    """Build the service; state is scoped to the returned app instance."""
    app = FastAPI(title="tracepatterns", version=__version__)
    state = AppState(logs_dir=Path(logs_dir) if logs_dir else Path.cwd())
    app.state.engine = state

    def get_log(log_id: str) -> EventLog:
        log = state.logs.get(log_id)
        if log is None:
            raise HTTPException(status_code=404, detail=f"unknown log id {log_id!r}")
        return log

    def get_entry(session_id: str) -> SessionEntry:
        entry = state.sessions.get(session_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown session id {session_id!r}")
        return entry

    @app.get("/")
    def root() -> dict:
        return {"service": "tracepatterns", "version": __version__}

    @app.post("/logs", response_model=LogSummary)
    def upload_log(request: LogUploadRequest) -> LogSummary:
        if (request.csv_text is None) == (request.path is None):
            raise HTTPException(status_code=400, detail="provide exactly one of csv_text or path")
        log_id = state.next_log_id()
        if request.csv_text is not None:
            if len(request.csv_text.encode("utf-8")) > state.max_upload_bytes:
                raise HTTPException(status_code=400, detail="CSV exceeds the upload size cap")
            path = state.logs_dir / f"{log_id}.csv"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(request.csv_text, encoding="utf-8")
        else:
            path = Path(request.path)
            if not path.is_absolute():
                path = state.logs_dir / path
            if not path.exists():
                raise HTTPException(status_code=400, detail=f"log file {path} does not exist")
        try:
            log = load_event_log(path, request.schema_.to_schema())
        except (LogError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        state.logs[log_id] = log
        report = validate_log(log)
        return LogSummary(
            log_id=log_id,
            n_cases=report.n_cases,
            n_activities=report.n_activities,
            n_events=report.n_events,
            n_variants=report.n_variants,
            alphabet=list(log.activity_alphabet),
            outcome_kind=log.outcome_kind,
            warnings=list(report.warnings),
        )

    @app.post("/sessions", response_model=SessionSummary)
    def create_session(request: SessionCreateRequest) -> SessionSummary:
        log = get_log(request.log_id)
        try:
            config = request.config.to_config()
            session = init_session(log, config)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        entry = SessionEntry(
            session_id=state.next_session_id(),
            log_id=request.log_id,
            session=session,
            created_at=datetime.now(timezone.utc).isoformat(),
        )
        state.sessions[entry.session_id] = entry
        return SessionSummary(
            session_id=entry.session_id,
            log_id=entry.log_id,
            status=session.status,
            created_at=entry.created_at,
            iteration=_iteration_model(session.iterations[0]),
        )

    @app.get("/sessions/{session_id}", response_model=SessionDetail)
    def get_session(session_id: str) -> SessionDetail:
        return _session_detail(get_entry(session_id))

    @app.post("/sessions/{session_id}/extend", response_model=ExtendResponse)
    def extend_session(session_id: str, request: ExtendRequest) -> ExtendResponse:
        entry = get_entry(session_id)
        if not entry.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="a step is already in progress")
        try:
            if entry.candidate_total() >= state.max_session_candidates:
                raise HTTPException(status_code=400, detail="session candidate cap reached")
            if request.rules is not None and not request.rules:
                raise HTTPException(status_code=400, detail="select at least one extension rule")
            rules = rules_from_names(request.rules) if request.rules is not None else None
            try:
                iteration = step(
                    entry.session,
                    selected_ids=request.pattern_ids,
                    rules=rules,
                    min_case_frequency=request.min_case_frequency,
                )
            except UnknownPatternId as exc:
                raise HTTPException(status_code=404, detail=str(exc)) from exc
            except NoExtensionPossible:
                return ExtendResponse(status=entry.session.status, iteration=None)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            return ExtendResponse(
                status=entry.session.status, iteration=_iteration_model(iteration)
            )
        finally:
            entry.lock.release()

    @app.get(
        "/sessions/{session_id}/patterns/{pattern_id}/dashboard",
        response_model=DashboardModel,
    )
    def pattern_dashboard(session_id: str, pattern_id: str) -> DashboardModel:
        entry = get_entry(session_id)
        session = entry.session
        pattern = session.pattern(pattern_id)
        if pattern is None:
            raise HTTPException(status_code=404, detail=f"unknown pattern id {pattern_id!r}")
        index = session.instance_index(pattern_id)
        if index is None:
            index = instances_in_converted(pattern, session._po_by_case)
        interest = None
        for iteration in session.iterations:
            for candidate in iteration.candidates:
                if candidate.id == pattern_id:
                    interest = candidate.interest
        data = dashboard_stats(
            pattern,
            index,
            session.log,
            session.config.distance,
            interest=interest,
            oi_transform=session.config.oi_transform,
        )
        return DashboardModel.model_validate(data.to_dict())

    @app.get("/sessions/{session_id}/export")
    def export_session(session_id: str) -> Mapping:
        entry = get_entry(session_id)
        return {"session_id": entry.session_id, "log_id": entry.log_id, **entry.session.to_dict()}

    if ui_dir is not None:
        ui_path = Path(ui_dir)
        if (ui_path / "index.html").exists():
            from fastapi.staticfiles import StaticFiles

            app.mount("/ui", StaticFiles(directory=ui_path, html=True), name="ui")

    return app

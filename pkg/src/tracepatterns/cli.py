"""Command line entry points: batch discovery, evaluation, serving, synthesis.

The CLI stays thin: it parses the run configuration, calls the engine, and
writes result files.  Exit code 1 means the configuration is unusable, 2 means
the data refused it; messages go to stderr.
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from .config import ConfigError, RunConfig, load_run_config
from .discovery import DiscoverySession, auto_discover, discovered_patterns, init_session
from .evaluation import (
    DTParams,
    EvalReport,
    InsufficientClassSupport,
    UnknownStrategy,
    cross_validate,
)
from .log_model import (
    EventLog,
    LogError,
    bin_outcome_equal_frequency,
    export_event_log,
    load_event_log,
)
from .synth import ConfoundSpec, PlantSpec, generate

CONFIG_ERROR = 1
DATA_ERROR = 2


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_config(path: str) -> RunConfig:
    try:
        return load_run_config(path)
    except ConfigError as exc:
        _fail(CONFIG_ERROR, str(exc))


def _load_log(run: RunConfig) -> EventLog:
    try:
        return load_event_log(run.log_path, run.schema)
    except FileNotFoundError:
        _fail(DATA_ERROR, f"log file {run.log_path} does not exist")
    except LogError as exc:
        _fail(DATA_ERROR, str(exc))


def _dump_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _write_fronts_csv(path: Path, session: DiscoverySession) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "pattern_id", "labels", "relations", "cc", "oi", "cd"])
        for iteration in session.iterations:
            for member in iteration.front():
                writer.writerow(
                    [
                        iteration.index,
                        member.id,
                        "|".join(member.pattern.labels),
                        ";".join(f"{u}-{kind}-{v}" for u, v, kind in member.pattern.relations),
                        repr(member.interest.cc),
                        repr(member.interest.oi),
                        repr(member.interest.cd),
                    ]
                )


def _write_report_csv(path: Path, report: EvalReport) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["strategy", "fold", "f1", "n_features"])
        for result in report.strategies:
            for fold, (score, count) in enumerate(zip(result.fold_scores, result.feature_counts)):
                writer.writerow([result.strategy, fold, repr(score), count])


@click.group()
def main() -> None:
    """Outcome-oriented process pattern discovery."""


@main.command()
@click.option("-c", "--config", "config_path", required=True, type=click.Path(), help="Run config YAML.")
@click.option("--auto/--no-auto", default=True, show_default=True,
              help="Run the full automated loop; --no-auto stops after the singleton iteration.")
@click.option("--iterations", type=int, default=None, help="Override max iterations.")
@click.option("--seed", type=int, default=None, help="Override the run seed.")
@click.option("-o", "--output", "output_dir", type=click.Path(), default=None,
              help="Override the output directory.")
def discover(config_path: str, auto: bool, iterations: int | None, seed: int | None,
             output_dir: str | None) -> None:
    """Discover patterns and write session history, pattern set, and fronts."""
    run = _load_config(config_path)
    cfg = run.discovery
    if iterations is not None:
        if iterations < 1:
            _fail(CONFIG_ERROR, "--iterations must be at least 1")
        cfg = replace(cfg, max_iterations=iterations)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    log = _load_log(run)

    out = Path(output_dir) if output_dir is not None else run.output_dir
    out.mkdir(parents=True, exist_ok=True)

    session = auto_discover(log, cfg) if auto else init_session(log, cfg)
    _dump_json(out / "session.json", session.to_dict())
    _dump_json(out / "patterns.json", [m.to_dict() for m in discovered_patterns(session)])
    _write_fronts_csv(out / "fronts.csv", session)
    click.echo(
        f"{len(session.iterations)} iteration(s), "
        f"{len(discovered_patterns(session))} discovered pattern(s) -> {out}"
    )


@main.command()
@click.option("-c", "--config", "config_path", required=True, type=click.Path(), help="Run config YAML.")
@click.option("--folds", type=int, default=None, help="Override fold count.")
@click.option("--strategies", default=None,
              help="Comma-separated strategies (pareto, single:cc, single:oi, single:cd, all).")
@click.option("--seed", type=int, default=None, help="Override the evaluation seed.")
@click.option("-o", "--output", "output_dir", type=click.Path(), default=None,
              help="Override the output directory.")
def evaluate(config_path: str, folds: int | None, strategies: str | None, seed: int | None,
             output_dir: str | None) -> None:
    """Cross-validate pattern selection strategies and write the report."""
    run = _load_config(config_path)
    settings = run.evaluation
    chosen = tuple(s.strip() for s in strategies.split(",")) if strategies else settings.strategies
    fold_count = folds if folds is not None else settings.folds
    run_seed = seed if seed is not None else run.discovery.seed

    log = _load_log(run)
    if log.outcome_kind == "continuous":
        if settings.outcome_bins is None:
            _fail(
                CONFIG_ERROR,
                "continuous outcome needs evaluation.outcome_bins (equal-frequency classes)",
            )
        log = bin_outcome_equal_frequency(log, settings.outcome_bins)

    out = Path(output_dir) if output_dir is not None else run.output_dir
    out.mkdir(parents=True, exist_ok=True)

    try:
        report = cross_validate(
            log,
            run.discovery,
            strategies=chosen,
            k=fold_count,
            seed=run_seed,
            dt_params=DTParams(
                max_depth=settings.max_depth, min_samples_leaf=settings.min_samples_leaf
            ),
        )
    except UnknownStrategy as exc:
        _fail(CONFIG_ERROR, str(exc))
    except InsufficientClassSupport as exc:
        _fail(DATA_ERROR, str(exc))

    _dump_json(out / "report.json", report.to_dict())
    _write_report_csv(out / "report.csv", report)
    ratio = report.mean_feature_ratio
    click.echo(f"pareto/all feature ratio: {ratio:.3f} -> {out}")
    for result in report.strategies:
        click.echo(
            f"  {result.strategy}: mean F1 {result.mean_f1:.4f} "
            f"(min {result.min_f1:.4f}, max {result.max_f1:.4f})"
        )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--logs-dir", type=click.Path(), default=None,
              help="Directory for uploaded and referenced log files.")
@click.option("--ui-dir", type=click.Path(), default=None,
              help="Static frontend assets to serve under /ui.")
def serve(host: str, port: int, logs_dir: str | None, ui_dir: str | None) -> None:
    """Start the interactive discovery service."""
    import uvicorn

    from .service import create_app

    if ui_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(bundled) if (bundled / "index.html").exists() else None
    app = create_app(logs_dir=logs_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--groups", default="p1;p2;p3", show_default=True,
              help="Planted template: ';' separates steps, ',' separates concurrent labels.")
@click.option("--traces", type=int, default=400, show_default=True)
@click.option("--plant-prob", type=float, default=0.5, show_default=True)
@click.option("--noise", type=float, default=0.05, show_default=True)
@click.option("--outcome-kind", type=click.Choice(["categorical", "continuous"]),
              default="categorical", show_default=True)
@click.option("--confound", default=None,
              help="Optional confounder as attr:kind:strength, e.g. leak:categorical:0.9.")
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("-o", "--output", "output_dir", type=click.Path(), default="synth-out",
              show_default=True)
def synth(groups: str, traces: int, plant_prob: float, noise: float, outcome_kind: str,
          confound: str | None, seed: int, output_dir: str) -> None:
    """Generate a ground-truth-annotated synthetic log."""
    try:
        parsed_groups = tuple(
            tuple(label.strip() for label in chunk.split(",") if label.strip())
            for chunk in groups.split(";")
            if chunk.strip()
        )
        confound_spec = None
        if confound is not None:
            attr, kind, strength = confound.split(":")
            confound_spec = ConfoundSpec(attr=attr, kind=kind, strength=float(strength))
        spec = PlantSpec(
            groups=parsed_groups,
            plant_probability=plant_prob,
            outcome_noise=noise,
            outcome_kind=outcome_kind,
            n_traces=traces,
            confound=confound_spec,
            seed=seed,
        )
    except ValueError as exc:
        _fail(CONFIG_ERROR, str(exc))

    log, truth = generate(spec)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    export_event_log(log, out / "synthetic.csv")
    _dump_json(out / "ground_truth.json", truth.to_dict())
    _dump_json(out / "schema.json", log.schema.to_dict())
    click.echo(f"{len(log)} traces -> {out}")


if __name__ == "__main__":
    main()

"""Run configuration: one YAML file describing log, discovery, and evaluation.

Every field has a default; the log path and its column schema are the only
things a minimal config must name.  See config/example.yaml for a commented
template.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import yaml

from .discovery import DiscoveryConfig
from .log_model import LogSchema


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class EvalSettings:
    folds: int = 5
    strategies: tuple[str, ...] = ("pareto", "single:cc", "single:oi", "single:cd", "all")
    outcome_bins: int | None = None  # equal-frequency binning for continuous outcomes
    max_depth: int = 5
    min_samples_leaf: int = 2

    def to_dict(self) -> dict:
        return {
            "folds": self.folds,
            "strategies": list(self.strategies),
            "outcome_bins": self.outcome_bins,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "EvalSettings":
        return cls(
            folds=data.get("folds", 5),
            strategies=tuple(data.get("strategies", cls.strategies)),
            outcome_bins=data.get("outcome_bins"),
            max_depth=data.get("max_depth", 5),
            min_samples_leaf=data.get("min_samples_leaf", 2),
        )


@dataclass(frozen=True)
class RunConfig:
    log_path: Path
    schema: LogSchema
    discovery: DiscoveryConfig = DiscoveryConfig()
    evaluation: EvalSettings = EvalSettings()
    output_dir: Path = field(default_factory=lambda: Path("output"))

    def to_dict(self) -> dict:
        return {
            "log": {"path": str(self.log_path), "schema": self.schema.to_dict()},
            "discovery": self.discovery.to_dict(),
            "evaluation": self.evaluation.to_dict(),
            "output_dir": str(self.output_dir),
        }

    @classmethod
    def from_dict(cls, data: Mapping, base_dir: Path | None = None) -> "RunConfig":
        try:
            log_section = data["log"]
            log_path = Path(log_section["path"])
            schema = LogSchema.from_dict(log_section.get("schema", {}))
            discovery = DiscoveryConfig.from_dict(data.get("discovery", {}))
            evaluation = EvalSettings.from_dict(data.get("evaluation", {}))
            output_dir = Path(data.get("output_dir", "output"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad run configuration: {exc}") from exc
        if base_dir is not None:
            if not log_path.is_absolute():
                log_path = base_dir / log_path
            if not output_dir.is_absolute():
                output_dir = base_dir / output_dir
        return cls(
            log_path=log_path,
            schema=schema,
            discovery=discovery,
            evaluation=evaluation,
            output_dir=output_dir,
        )


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ConfigError(f"{path} does not hold a mapping")
    return RunConfig.from_dict(data, base_dir=path.parent)

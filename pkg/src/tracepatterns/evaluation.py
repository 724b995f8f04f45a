"""Predictive evaluation of discovered pattern sets.

Each trace is encoded as a vector of per-pattern instance counts and a
decision tree predicts the outcome class.  Stratified k-fold cross-validation
re-runs discovery on every training split (so no pattern is informed by test
traces) and compares feature-selection strategies: the union of Pareto fronts,
top-K by each single dimension (K matching the front size), and all generated
candidates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .discovery import DiscoveryConfig, all_candidates, auto_discover, discovered_patterns
from .interest import DIMENSIONS
from .log_model import EventLog
from .pareto import MeasuredPattern
from .partial_order import OracleConfig, convert_log
from .patterns import InstanceIndex, Pattern, instances_in_converted

STRATEGY_PARETO = "pareto"
STRATEGY_ALL = "all"
SINGLE_PREFIX = "single:"
DEFAULT_STRATEGIES = ("pareto", "single:cc", "single:oi", "single:cd", "all")


class SingleClass(Exception):
    pass


class KTooLarge(Exception):
    def __init__(self, k: int, available: int) -> None:
        super().__init__(f"asked for top {k} of {available} candidates")


class InsufficientClassSupport(Exception):
    def __init__(self, message: str) -> None:
        super().__init__(message)


class UnknownStrategy(Exception):
    def __init__(self, name: str) -> None:
        super().__init__(f"unknown strategy {name!r}")
        self.name = name


@dataclass(frozen=True)
class FeatureMatrix:
    case_ids: tuple[str, ...]
    pattern_ids: tuple[str, ...]
    cells: np.ndarray = field(compare=False)  # (n_cases, n_patterns) int
    labels: tuple[str, ...] = ()

    def column(self, pattern_id: str) -> np.ndarray:
        return self.cells[:, self.pattern_ids.index(pattern_id)]

    def write_csv(self, path) -> None:
        """Case id, one count column per pattern, outcome label last."""
        import csv
        from pathlib import Path

        with Path(path).open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["case_id", *self.pattern_ids, "outcome"])
            for row, case_id in enumerate(self.case_ids):
                label = self.labels[row] if self.labels else ""
                writer.writerow([case_id, *map(int, self.cells[row]), label])


def encode_features(
    patterns: Sequence[Pattern],
    log: EventLog,
    oracle: OracleConfig,
    index_cache: Mapping[str, InstanceIndex] | None = None,
) -> FeatureMatrix:
    """Frequency encoding: cell (case, pattern) = instance count.

    Columns are ordered by pattern id; a cache of instance indexes computed
    over the same log may be supplied to skip re-matching.
    """
    if not patterns:
        raise ValueError("need at least one pattern to encode")
    ordered = sorted({p.id: p for p in patterns}.values(), key=lambda p: p.id)
    po_by_case = convert_log(log, oracle)
    case_ids = log.case_ids
    columns = []
    for pattern in ordered:
        index = index_cache.get(pattern.id) if index_cache else None
        if index is None:
            index = instances_in_converted(pattern, po_by_case)
        columns.append(index.counts(case_ids))
    cells = np.array(columns, dtype=int).T.reshape(len(case_ids), len(ordered))
    labels = tuple(str(log.traces[c].outcome.value) for c in case_ids)
    return FeatureMatrix(
        case_ids=case_ids,
        pattern_ids=tuple(p.id for p in ordered),
        cells=cells,
        labels=labels,
    )


# ---------------------------------------------------------------------------
# decision tree


@dataclass(frozen=True)
class DTParams:
    max_depth: int = 5
    min_samples_leaf: int = 2
    impurity: str = "gini"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.impurity != "gini":
            raise ValueError("only gini impurity is supported")


@dataclass(frozen=True)
class _Node:
    prediction: str | None = None
    feature: int | None = None
    threshold: float | None = None
    left: "_Node | None" = None
    right: "_Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.prediction is not None


@dataclass(frozen=True)
class DTModel:
    root: _Node
    pattern_ids: tuple[str, ...]
    classes: tuple[str, ...]

    def predict_row(self, row: Sequence[float]) -> str:
        node = self.root
        while not node.is_leaf:
            node = node.left if row[node.feature] <= node.threshold else node.right
        return node.prediction

    def predict(self, matrix: FeatureMatrix) -> tuple[str, ...]:
        if matrix.pattern_ids != self.pattern_ids:
            raise ValueError("feature columns do not match the trained model")
        return tuple(self.predict_row(row) for row in matrix.cells)


def _gini(labels: np.ndarray) -> float:
    _, counts = np.unique(labels, return_counts=True)
    proportions = counts / labels.shape[0]
    return 1.0 - float((proportions**2).sum())


def _majority(labels: np.ndarray) -> str:
    values, counts = np.unique(labels, return_counts=True)
    best = counts.max()
    return str(min(values[counts == best]))  # lexicographic tie-break


def _best_split(
    cells: np.ndarray, labels: np.ndarray, min_samples_leaf: int
) -> tuple[int, float, float] | None:
    """Lowest weighted Gini split; ties prefer lower column then lower threshold."""
    n = labels.shape[0]
    best: tuple[float, int, float] | None = None
    for column in range(cells.shape[1]):
        values = np.unique(cells[:, column])
        if values.shape[0] < 2:
            continue
        thresholds = (values[:-1] + values[1:]) / 2.0
        for threshold in thresholds:
            mask = cells[:, column] <= threshold
            n_left = int(mask.sum())
            if n_left < min_samples_leaf or n - n_left < min_samples_leaf:
                continue
            score = (n_left / n) * _gini(labels[mask]) + ((n - n_left) / n) * _gini(labels[~mask])
            key = (score, column, float(threshold))
            if best is None or key < best:
                best = key
    if best is None:
        return None
    score, column, threshold = best
    return column, threshold, score


def _grow(
    cells: np.ndarray, labels: np.ndarray, depth: int, params: DTParams
) -> _Node:
    if depth >= params.max_depth or np.unique(labels).shape[0] == 1:
        return _Node(prediction=_majority(labels))
    # A zero-gain split is still taken (XOR-style targets need it); recursion
    # is bounded by max_depth and the min_samples_leaf shrinkage.
    split = _best_split(cells, labels, params.min_samples_leaf)
    if split is None:
        return _Node(prediction=_majority(labels))
    column, threshold, _ = split
    mask = cells[:, column] <= threshold
    return _Node(
        feature=column,
        threshold=threshold,
        left=_grow(cells[mask], labels[mask], depth + 1, params),
        right=_grow(cells[~mask], labels[~mask], depth + 1, params),
    )


def train_decision_tree(matrix: FeatureMatrix, params: DTParams = DTParams()) -> DTModel:
    """Deterministic binary CART on the frequency encoding."""
    labels = np.array(matrix.labels)
    classes = tuple(sorted(np.unique(labels)))
    if len(classes) < 2:
        raise SingleClass(f"training data has a single class {classes}")
    root = _grow(matrix.cells, labels, 0, params)
    return DTModel(root=root, pattern_ids=matrix.pattern_ids, classes=classes)


def macro_f1(
    y_true: Sequence[str], y_pred: Sequence[str], classes: Sequence[str] | None = None
) -> float:
    """Unweighted mean of per-class F1; absent classes contribute 0."""
    if len(y_true) != len(y_pred):
        raise ValueError("prediction length mismatch")
    if classes is None:
        classes = sorted(set(y_true) | set(y_pred))
    scores = []
    for cls in classes:
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p == cls)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != cls and p == cls)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p != cls)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        scores.append(2 * precision * recall / (precision + recall) if precision + recall else 0.0)
    return float(sum(scores) / len(scores))


# ---------------------------------------------------------------------------
# strategies and cross-validation


def top_k_by_dimension(
    candidates: Sequence[MeasuredPattern], dim: str, k: int
) -> list[MeasuredPattern]:
    """Best k candidates along one dimension, honoring its direction."""
    if dim not in DIMENSIONS:
        raise ValueError(f"unknown dimension {dim!r}")
    if k > len(candidates):
        raise KTooLarge(k, len(candidates))
    position = DIMENSIONS.index(dim)
    sign = -1.0 if dim != "cd" else 1.0  # cc and oi are maximized, cd minimized
    ranked = sorted(
        candidates, key=lambda item: (sign * item.interest.as_tuple()[position], item.id)
    )
    return list(ranked[:k])


def stratified_folds(log: EventLog, k: int, seed: int) -> list[tuple[str, ...]]:
    """Class-stratified case-id folds, deterministic in the seed."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    by_class: dict[str, list[str]] = {}
    for trace in log:
        by_class.setdefault(str(trace.outcome.value), []).append(trace.case_id)
    rng = random.Random(seed)
    folds: list[list[str]] = [[] for _ in range(k)]
    cursor = 0
    for cls in sorted(by_class):
        members = sorted(by_class[cls])
        if len(members) < k:
            raise InsufficientClassSupport(
                f"class {cls!r} has {len(members)} cases; need at least {k}"
            )
        rng.shuffle(members)
        for case_id in members:
            folds[cursor % k].append(case_id)
            cursor += 1
    return [tuple(sorted(fold)) for fold in folds]


def _sub_log(log: EventLog, case_ids: Sequence[str]) -> EventLog:
    return EventLog(traces={c: log.traces[c] for c in case_ids}, schema=log.schema)


def _strategy_patterns(
    name: str,
    pareto_set: list[MeasuredPattern],
    candidate_set: list[MeasuredPattern],
) -> list[Pattern]:
    if name == STRATEGY_PARETO:
        chosen = pareto_set
    elif name == STRATEGY_ALL:
        chosen = candidate_set
    elif name.startswith(SINGLE_PREFIX):
        dim = name[len(SINGLE_PREFIX) :]
        if dim not in DIMENSIONS:
            raise UnknownStrategy(name)
        chosen = top_k_by_dimension(candidate_set, dim, len(pareto_set))
    else:
        raise UnknownStrategy(name)
    return [item.pattern for item in chosen]


@dataclass(frozen=True)
class StrategyResult:
    strategy: str
    fold_scores: tuple[float, ...]
    feature_counts: tuple[int, ...]

    @property
    def mean_f1(self) -> float:
        return float(sum(self.fold_scores) / len(self.fold_scores))

    @property
    def min_f1(self) -> float:
        return min(self.fold_scores)

    @property
    def max_f1(self) -> float:
        return max(self.fold_scores)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "fold_scores": list(self.fold_scores),
            "feature_counts": list(self.feature_counts),
            "mean_f1": self.mean_f1,
            "min_f1": self.min_f1,
            "max_f1": self.max_f1,
        }


@dataclass(frozen=True)
class EvalReport:
    strategies: tuple[StrategyResult, ...]
    pareto_sizes: tuple[int, ...]
    candidate_sizes: tuple[int, ...]
    folds: int
    seed: int

    @property
    def mean_feature_ratio(self) -> float:
        """Average |pareto| / |all| across folds."""
        ratios = [p / a for p, a in zip(self.pareto_sizes, self.candidate_sizes) if a]
        return float(sum(ratios) / len(ratios)) if ratios else 0.0

    def result(self, strategy: str) -> StrategyResult:
        for item in self.strategies:
            if item.strategy == strategy:
                return item
        raise UnknownStrategy(strategy)

    def to_dict(self) -> dict:
        return {
            "strategies": [item.to_dict() for item in self.strategies],
            "pareto_sizes": list(self.pareto_sizes),
            "candidate_sizes": list(self.candidate_sizes),
            "mean_feature_ratio": self.mean_feature_ratio,
            "folds": self.folds,
            "seed": self.seed,
        }


def cross_validate(
    log: EventLog,
    cfg: DiscoveryConfig,
    strategies: Sequence[str] = DEFAULT_STRATEGIES,
    k: int = 5,
    seed: int = 0,
    dt_params: DTParams = DTParams(),
) -> EvalReport:
    """Stratified k-fold comparison of feature-selection strategies.

    Discovery runs once per fold on the training traces only; every strategy
    then reuses that fold's candidate pool.
    """
    if log.outcome_kind != "categorical":
        raise InsufficientClassSupport(
            "cross-validation needs a categorical outcome; bin continuous outcomes first"
        )
    for name in strategies:
        if name not in (STRATEGY_PARETO, STRATEGY_ALL) and not (
            name.startswith(SINGLE_PREFIX) and name[len(SINGLE_PREFIX) :] in DIMENSIONS
        ):
            raise UnknownStrategy(name)

    folds = stratified_folds(log, k, seed)
    fold_scores: dict[str, list[float]] = {name: [] for name in strategies}
    fold_features: dict[str, list[int]] = {name: [] for name in strategies}
    pareto_sizes: list[int] = []
    candidate_sizes: list[int] = []

    for fold in folds:
        test_ids = set(fold)
        train_ids = [c for c in log.case_ids if c not in test_ids]
        train_log = _sub_log(log, train_ids)
        test_log = _sub_log(log, sorted(test_ids))

        session = auto_discover(train_log, cfg)
        pareto_set = discovered_patterns(session)
        candidate_set = all_candidates(session)
        pareto_sizes.append(len(pareto_set))
        candidate_sizes.append(len(candidate_set))

        for name in strategies:
            chosen = _strategy_patterns(name, pareto_set, candidate_set)
            train_matrix = encode_features(chosen, train_log, cfg.oracle, session._index_by_id)
            test_matrix = encode_features(chosen, test_log, cfg.oracle)
            model = train_decision_tree(train_matrix, dt_params)
            predictions = model.predict(test_matrix)
            fold_scores[name].append(
                macro_f1(test_matrix.labels, predictions, classes=model.classes)
            )
            fold_features[name].append(len(chosen))

    return EvalReport(
        strategies=tuple(
            StrategyResult(
                strategy=name,
                fold_scores=tuple(fold_scores[name]),
                feature_counts=tuple(fold_features[name]),
            )
            for name in strategies
        ),
        pareto_sizes=tuple(pareto_sizes),
        candidate_sizes=tuple(candidate_sizes),
        folds=k,
        seed=seed,
    )

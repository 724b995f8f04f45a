"""Outcome-oriented interest functions and dashboard statistics.

Three measures score a pattern against a log: case coverage (fraction of
cases containing it), outcome interest (Spearman rank correlation of the
per-case frequency vector with a continuous outcome, information gain for a
categorical one), and case distance (attribute distance between the cases
with and without the pattern, a small value meaning the cohorts are hard to
tell apart on confounders).  Dashboard statistics compare the two cohorts
attribute by attribute and, for survival-style outcomes, by Kaplan-Meier
curves with a log-rank test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .log_model import CaseAttributes, EventLog, MISSING_CATEGORY
from .patterns import InstanceIndex, Pattern

DEFAULT_DIRECTIONS = ("max", "max", "min")
DIMENSIONS = ("cc", "oi", "cd")
HISTOGRAM_BINS = 20


class LengthMismatch(Exception):
    def __init__(self, a: int, b: int) -> None:
        super().__init__(f"sequence lengths differ: {a} vs {b}")


class EmptyInput(Exception):
    pass


class Measure(NamedTuple):
    """A computed interest value plus a degeneracy marker.

    Degenerate inputs (constant frequency vector, an empty cohort) yield 0
    with the flag set instead of failing, so Pareto comparison never aborts.
    """

    value: float
    degenerate: bool = False


@dataclass(frozen=True)
class InterestVector:
    cc: float
    oi: float
    cd: float
    degenerate: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 <= self.cc <= 1.0:
            raise ValueError(f"cc must lie in [0, 1], got {self.cc}")
        if self.cd < 0.0:
            raise ValueError(f"cd must be non-negative, got {self.cd}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.cc, self.oi, self.cd)

    def to_dict(self) -> dict:
        return {"cc": self.cc, "oi": self.oi, "cd": self.cd, "degenerate": list(self.degenerate)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "InterestVector":
        return cls(
            cc=data["cc"], oi=data["oi"], cd=data["cd"],
            degenerate=tuple(data.get("degenerate", ())),
        )


def validate_directions(directions: Sequence[str]) -> tuple[str, ...]:
    directions = tuple(directions)
    if len(directions) != len(DIMENSIONS) or any(d not in ("max", "min") for d in directions):
        raise ValueError(f"directions must be {len(DIMENSIONS)} entries of max/min, got {directions}")
    return directions


# ---------------------------------------------------------------------------
# coverage and outcome interest


def frequency_vector(idx: InstanceIndex, log: EventLog) -> tuple[int, ...]:
    """Per-case instance counts in canonical trace order."""
    return idx.counts(log.case_ids)


def case_coverage(idx: InstanceIndex, log: EventLog) -> float:
    """Fraction of cases with at least one instance."""
    covered = sum(1 for case_id in log.case_ids if idx.count(case_id) > 0)
    return covered / len(log)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    sorted_values = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_values[j + 1] == sorted_values[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation with average ties; 0 when either input is constant."""
    if len(x) != len(y):
        raise LengthMismatch(len(x), len(y))
    if len(x) < 2:
        raise ValueError("need at least 2 observations")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        return 0.0
    rx = _average_ranks(xa)
    ry = _average_ranks(ya)
    rx -= rx.mean()
    ry -= ry.mean()
    return float(np.dot(rx, ry) / math.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))


def _entropy(counts: Sequence[int]) -> float:
    total = sum(counts)
    result = 0.0
    for count in counts:
        if count:
            p = count / total
            result -= p * math.log2(p)
    return result


def information_gain(feature: Sequence[object], labels: Sequence[str]) -> float:
    """H(labels) minus conditional entropy, base 2; feature values are symbols."""
    if len(feature) != len(labels):
        raise LengthMismatch(len(feature), len(labels))
    if not labels:
        raise ValueError("need at least 1 observation")
    label_counts: dict[str, int] = {}
    for label in labels:
        label_counts[label] = label_counts.get(label, 0) + 1
    total_entropy = _entropy(list(label_counts.values()))

    by_value: dict[object, dict[str, int]] = {}
    for value, label in zip(feature, labels):
        bucket = by_value.setdefault(value, {})
        bucket[label] = bucket.get(label, 0) + 1

    n = len(labels)
    conditional = 0.0
    for bucket in by_value.values():
        weight = sum(bucket.values()) / n
        conditional += weight * _entropy(list(bucket.values()))
    gain = total_entropy - conditional
    return max(gain, 0.0)


def outcome_interest(idx: InstanceIndex, log: EventLog, transform: str = "raw") -> Measure:
    """Association of the pattern's frequency vector with the outcome.

    Continuous outcomes use Spearman correlation (transform="abs" takes the
    magnitude); categorical outcomes use information gain.
    """
    if transform not in ("raw", "abs"):
        raise ValueError(f"unknown transform {transform!r}")
    fv = frequency_vector(idx, log)
    degenerate = len(set(fv)) <= 1
    if log.outcome_kind == "continuous":
        outcomes = [float(trace.outcome.value) for trace in log]  # type: ignore[arg-type]
        value = spearman(outcomes, list(fv))
        if transform == "abs":
            value = abs(value)
    else:
        labels = [str(trace.outcome.value) for trace in log]
        value = information_gain(fv, labels)
    return Measure(value=value, degenerate=degenerate)


# ---------------------------------------------------------------------------
# case distance


@dataclass(frozen=True)
class DistanceConfig:
    """Attribute lists and aggregation for the case distance.

    `pair_mean` averages the pairwise distance over with-pattern x
    without-pattern case pairs; `scaled_sum` divides the raw pair sum by the
    log size, which grows with cohort sizes.  `bounds` and `fill` are per
    numeric attribute min-max ranges and imputation values fitted from a log.
    """

    numeric_attrs: tuple[str, ...] = ()
    categorical_attrs: tuple[str, ...] = ()
    aggregation: str = "pair_mean"  # "pair_mean" | "scaled_sum"
    bounds: Mapping[str, tuple[float, float]] | None = field(default=None, compare=False)
    fill: Mapping[str, float] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.aggregation not in ("pair_mean", "scaled_sum"):
            raise ValueError(f"unknown aggregation {self.aggregation!r}")

    @property
    def fitted(self) -> bool:
        return self.bounds is not None and self.fill is not None

    def fit(self, log: EventLog) -> "DistanceConfig":
        """Fit min-max bounds and median imputation values over a log."""
        bounds: dict[str, tuple[float, float]] = {}
        fill: dict[str, float] = {}
        for name in self.numeric_attrs:
            observed = [
                trace.case_attrs.numeric.get(name)
                for trace in log
                if trace.case_attrs.numeric.get(name) is not None
            ]
            if observed:
                bounds[name] = (min(observed), max(observed))
                fill[name] = float(np.median(observed))
            else:
                bounds[name] = (0.0, 0.0)
                fill[name] = 0.0
        return replace(self, bounds=bounds, fill=fill)

    def scaled_numeric(self, attrs: CaseAttributes) -> tuple[float, ...]:
        if not self.fitted:
            raise ValueError("distance config is not fitted; call fit(log) first")
        scaled = []
        for name in self.numeric_attrs:
            value = attrs.numeric.get(name)
            if value is None:
                value = self.fill[name]  # type: ignore[index]
            lo, hi = self.bounds[name]  # type: ignore[index]
            scaled.append((value - lo) / (hi - lo) if hi > lo else 0.0)
        return tuple(scaled)

    def categorical_values(self, attrs: CaseAttributes) -> tuple[str, ...]:
        return tuple(attrs.categorical.get(name, MISSING_CATEGORY) for name in self.categorical_attrs)

    def to_dict(self) -> dict:
        return {
            "numeric_attrs": list(self.numeric_attrs),
            "categorical_attrs": list(self.categorical_attrs),
            "aggregation": self.aggregation,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "DistanceConfig":
        return cls(
            numeric_attrs=tuple(data.get("numeric_attrs", ())),
            categorical_attrs=tuple(data.get("categorical_attrs", ())),
            aggregation=data.get("aggregation", "pair_mean"),
        )


def pair_distance(a: CaseAttributes, b: CaseAttributes, cfg: DistanceConfig) -> float:
    """Mixed distance in [0, 1]: scaled Euclidean plus categorical mismatches.

    (d_num + d_cat) / (m + 1) where d_num is the Euclidean distance over
    min-max scaled numerics divided by sqrt(k) (0 when k = 0) and d_cat counts
    mismatching categorical attributes.
    """
    k = len(cfg.numeric_attrs)
    m = len(cfg.categorical_attrs)
    d_num = 0.0
    if k:
        va = cfg.scaled_numeric(a)
        vb = cfg.scaled_numeric(b)
        d_num = math.sqrt(sum((x - y) ** 2 for x, y in zip(va, vb))) / math.sqrt(k)
    d_cat = sum(
        1 for x, y in zip(cfg.categorical_values(a), cfg.categorical_values(b)) if x != y
    )
    return (d_num + d_cat) / (m + 1)


@dataclass(frozen=True)
class FittedDistance:
    """Vectorized per-case attribute tables for fast cohort distances."""

    cfg: DistanceConfig
    case_ids: tuple[str, ...]
    numeric: np.ndarray = field(compare=False)  # (n, k) scaled
    categorical: np.ndarray = field(compare=False)  # (n, m) int codes

    @classmethod
    def build(cls, log: EventLog, cfg: DistanceConfig) -> "FittedDistance":
        fitted_cfg = cfg if cfg.fitted else cfg.fit(log)
        case_ids = log.case_ids
        numeric = np.array(
            [fitted_cfg.scaled_numeric(log.traces[c].case_attrs) for c in case_ids], dtype=float
        ).reshape(len(case_ids), len(cfg.numeric_attrs))
        codes: dict[tuple[int, str], int] = {}
        cat_rows = []
        for case_id in case_ids:
            values = fitted_cfg.categorical_values(log.traces[case_id].case_attrs)
            row = []
            for column, value in enumerate(values):
                row.append(codes.setdefault((column, value), len(codes)))
            cat_rows.append(row)
        categorical = np.array(cat_rows, dtype=int).reshape(len(case_ids), len(cfg.categorical_attrs))
        return cls(cfg=fitted_cfg, case_ids=case_ids, numeric=numeric, categorical=categorical)

    def cohort_distance(self, in_pattern: Sequence[bool]) -> Measure:
        """Aggregate pair distance between the with- and without-pattern cohorts."""
        mask = np.asarray(in_pattern, dtype=bool)
        if mask.shape != (len(self.case_ids),):
            raise LengthMismatch(len(mask), len(self.case_ids))
        if mask.all() or not mask.any():
            return Measure(value=0.0, degenerate=True)
        k = self.numeric.shape[1]
        m = self.categorical.shape[1]
        if k + m == 0:
            return Measure(value=0.0, degenerate=True)

        pair_sum = 0.0
        n_in = int(mask.sum())
        n_out = int((~mask).sum())
        if k:
            diff = self.numeric[mask][:, None, :] - self.numeric[~mask][None, :, :]
            d_num = np.sqrt((diff**2).sum(axis=2)) / math.sqrt(k)
        else:
            d_num = np.zeros((n_in, n_out))
        if m:
            d_cat = (
                self.categorical[mask][:, None, :] != self.categorical[~mask][None, :, :]
            ).sum(axis=2)
        else:
            d_cat = np.zeros((n_in, n_out))
        pairs = (d_num + d_cat) / (m + 1)
        pair_sum = float(pairs.sum())

        if self.cfg.aggregation == "scaled_sum":
            return Measure(value=pair_sum / len(self.case_ids))
        return Measure(value=pair_sum / (n_in * n_out))


def case_distance(idx: InstanceIndex, log: EventLog, cfg: DistanceConfig) -> Measure:
    """Cohort distance for one pattern; 0 with a flag when a cohort is empty."""
    fitted = FittedDistance.build(log, cfg)
    mask = [idx.count(case_id) > 0 for case_id in log.case_ids]
    return fitted.cohort_distance(mask)


def interest_vector(
    idx: InstanceIndex,
    log: EventLog,
    fitted: FittedDistance,
    oi_transform: str = "raw",
) -> InterestVector:
    """Measure one pattern on all three dimensions."""
    cc = case_coverage(idx, log)
    oi = outcome_interest(idx, log, transform=oi_transform)
    mask = [idx.count(case_id) > 0 for case_id in log.case_ids]
    cd = fitted.cohort_distance(mask)
    flags = []
    if oi.degenerate:
        flags.append("oi")
    if cd.degenerate:
        flags.append("cd")
    return InterestVector(cc=cc, oi=oi.value, cd=cd.value, degenerate=tuple(flags))


# ---------------------------------------------------------------------------
# survival statistics


def kaplan_meier(
    times: Sequence[float], event_flags: Sequence[bool]
) -> tuple[tuple[float, float], ...]:
    """Product-limit survival estimate: (time, S(time)) at each event time.

    The running product is kept as an exact rational so reported values are
    the correctly rounded ratios, not an accumulation of float error.
    """
    if len(times) != len(event_flags):
        raise LengthMismatch(len(times), len(event_flags))
    if not times:
        raise EmptyInput("no subjects")
    if any(t <= 0 for t in times):
        raise ValueError("times must be positive")

    subjects = sorted(zip(times, event_flags))
    distinct_event_times = sorted({t for t, flag in subjects if flag})
    survival = Fraction(1)
    curve: list[tuple[float, float]] = []
    for t in distinct_event_times:
        at_risk = sum(1 for time, _ in subjects if time >= t)
        deaths = sum(1 for time, flag in subjects if flag and time == t)
        survival *= Fraction(at_risk - deaths, at_risk)
        curve.append((t, float(survival)))
    return tuple(curve)


def chi2_sf_1df(statistic: float) -> float:
    """Upper tail of chi-square with one degree of freedom."""
    if statistic < 0:
        raise ValueError("statistic must be non-negative")
    return math.erfc(math.sqrt(statistic / 2.0))


def log_rank(
    group_a: tuple[Sequence[float], Sequence[bool]],
    group_b: tuple[Sequence[float], Sequence[bool]],
) -> tuple[float, float]:
    """One-degree-of-freedom log-rank test; returns (chi-square, p-value)."""
    for times, flags in (group_a, group_b):
        if len(times) != len(flags):
            raise LengthMismatch(len(times), len(flags))
        if not times:
            raise EmptyInput("log-rank needs two non-empty groups")

    event_times = sorted(
        {t for t, flag in zip(*group_a) if flag} | {t for t, flag in zip(*group_b) if flag}
    )
    observed_a = 0.0
    expected_a = 0.0
    variance = 0.0
    for t in event_times:
        n_a = sum(1 for time in group_a[0] if time >= t)
        n_b = sum(1 for time in group_b[0] if time >= t)
        d_a = sum(1 for time, flag in zip(*group_a) if flag and time == t)
        d_b = sum(1 for time, flag in zip(*group_b) if flag and time == t)
        n = n_a + n_b
        d = d_a + d_b
        if n == 0 or d == 0:
            continue
        observed_a += d_a
        expected_a += d * n_a / n
        if n > 1:
            variance += d * (n_a / n) * (n_b / n) * (n - d) / (n - 1)

    if variance == 0.0:
        return (0.0, 1.0)
    statistic = (observed_a - expected_a) ** 2 / variance
    return (statistic, chi2_sf_1df(statistic))


# ---------------------------------------------------------------------------
# dashboard


@dataclass(frozen=True)
class HistogramSummary:
    count: int
    mean: float | None
    median: float | None
    bin_edges: tuple[float, ...]
    bin_counts: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "median": self.median,
            "bin_edges": list(self.bin_edges),
            "bin_counts": list(self.bin_counts),
        }


@dataclass(frozen=True)
class DashboardData:
    """Cohort comparison payload rendered by the UI for one pattern."""

    pattern: dict
    interest: InterestVector
    n_in: int
    n_out: int
    categorical: Mapping[str, dict]
    numeric: Mapping[str, dict]
    median_outcome_in: float | None
    median_outcome_out: float | None
    outcome_classes_in: Mapping[str, float] | None
    outcome_classes_out: Mapping[str, float] | None
    km_in: tuple[tuple[float, float], ...] | None
    km_out: tuple[tuple[float, float], ...] | None
    log_rank_stat: float | None
    log_rank_p: float | None

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern,
            "interest": self.interest.to_dict(),
            "n_in": self.n_in,
            "n_out": self.n_out,
            "categorical": {k: v for k, v in self.categorical.items()},
            "numeric": {k: v for k, v in self.numeric.items()},
            "median_outcome_in": self.median_outcome_in,
            "median_outcome_out": self.median_outcome_out,
            "outcome_classes_in": dict(self.outcome_classes_in) if self.outcome_classes_in else None,
            "outcome_classes_out": dict(self.outcome_classes_out) if self.outcome_classes_out else None,
            "km_in": [list(point) for point in self.km_in] if self.km_in is not None else None,
            "km_out": [list(point) for point in self.km_out] if self.km_out is not None else None,
            "log_rank_stat": self.log_rank_stat,
            "log_rank_p": self.log_rank_p,
        }


def _proportions(values: Sequence[str]) -> dict[str, float]:
    counts: dict[str, int] = {}
    for value in values:
        counts[value] = counts.get(value, 0) + 1
    total = len(values)
    return {value: counts[value] / total for value in sorted(counts)}


def _histogram(values: Sequence[float], lo: float, hi: float) -> HistogramSummary:
    if not values:
        return HistogramSummary(0, None, None, (), ())
    if hi <= lo:
        hi = lo + 1.0
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins=HISTOGRAM_BINS, range=(lo, hi))
    return HistogramSummary(
        count=len(values),
        mean=float(np.mean(values)),
        median=float(np.median(values)),
        bin_edges=tuple(float(e) for e in edges),
        bin_counts=tuple(int(c) for c in counts),
    )


def dashboard_stats(
    p: Pattern,
    idx: InstanceIndex,
    log: EventLog,
    cfg: DistanceConfig,
    interest: InterestVector | None = None,
    oi_transform: str = "raw",
) -> DashboardData:
    """Everything the per-pattern dashboard shows, computed in one pass."""
    in_cases = [trace for trace in log if idx.count(trace.case_id) > 0]
    out_cases = [trace for trace in log if idx.count(trace.case_id) == 0]

    if interest is None:
        fitted = FittedDistance.build(log, cfg)
        interest = interest_vector(idx, log, fitted, oi_transform)

    categorical: dict[str, dict] = {}
    for name in cfg.categorical_attrs:
        categorical[name] = {
            "in": _proportions([t.case_attrs.categorical.get(name, MISSING_CATEGORY) for t in in_cases]),
            "out": _proportions([t.case_attrs.categorical.get(name, MISSING_CATEGORY) for t in out_cases]),
        }

    numeric: dict[str, dict] = {}
    for name in cfg.numeric_attrs:
        observed = [
            t.case_attrs.numeric.get(name) for t in log if t.case_attrs.numeric.get(name) is not None
        ]
        lo = min(observed) if observed else 0.0
        hi = max(observed) if observed else 1.0
        in_values = [t.case_attrs.numeric.get(name) for t in in_cases]
        out_values = [t.case_attrs.numeric.get(name) for t in out_cases]
        numeric[name] = {
            "in": _histogram([v for v in in_values if v is not None], lo, hi).to_dict(),
            "out": _histogram([v for v in out_values if v is not None], lo, hi).to_dict(),
        }

    median_in = median_out = None
    classes_in = classes_out = None
    km_in = km_out = None
    lr_stat = lr_p = None
    if log.outcome_kind == "continuous":
        in_outcomes = [float(t.outcome.value) for t in in_cases if t.outcome.value is not None]
        out_outcomes = [float(t.outcome.value) for t in out_cases if t.outcome.value is not None]
        median_in = float(np.median(in_outcomes)) if in_outcomes else None
        median_out = float(np.median(out_outcomes)) if out_outcomes else None
        if in_outcomes and out_outcomes and min(in_outcomes + out_outcomes) > 0:
            km_in = kaplan_meier(in_outcomes, [True] * len(in_outcomes))
            km_out = kaplan_meier(out_outcomes, [True] * len(out_outcomes))
            lr_stat, lr_p = log_rank(
                (in_outcomes, [True] * len(in_outcomes)),
                (out_outcomes, [True] * len(out_outcomes)),
            )
    else:
        classes_in = _proportions([str(t.outcome.value) for t in in_cases]) if in_cases else {}
        classes_out = _proportions([str(t.outcome.value) for t in out_cases]) if out_cases else {}

    return DashboardData(
        pattern=p.to_dict(),
        interest=interest,
        n_in=len(in_cases),
        n_out=len(out_cases),
        categorical=categorical,
        numeric=numeric,
        median_outcome_in=median_in,
        median_outcome_out=median_out,
        outcome_classes_in=classes_in,
        outcome_classes_out=classes_out,
        km_in=km_in,
        km_out=km_out,
        log_rank_stat=lr_stat,
        log_rank_p=lr_p,
    )

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tracepatterns.interest import (
    DistanceConfig,
    EmptyInput,
    FittedDistance,
    LengthMismatch,
    case_coverage,
    case_distance,
    chi2_sf_1df,
    dashboard_stats,
    information_gain,
    interest_vector,
    kaplan_meier,
    log_rank,
    outcome_interest,
    pair_distance,
    spearman,
)
from tracepatterns.log_model import CaseAttributes
from tracepatterns.partial_order import OracleConfig
from tracepatterns.patterns import instances_in_log, pattern, singleton_pattern

from .conftest import make_log, make_trace
from .oracles import (
    entropy_bits,
    information_gain_direct,
    log_rank_table,
    spearman_direct,
)

NO_RULES = OracleConfig()


# ---------------------------------------------------------------------------
# coverage


def test_case_coverage(chain_log):
    half = instances_in_log(pattern(["a", "b"], {(0, 1): "direct"}), chain_log, NO_RULES)
    assert case_coverage(half, chain_log) == 0.5
    nothing = instances_in_log(singleton_pattern("zz"), chain_log, NO_RULES)
    assert case_coverage(nothing, chain_log) == 0.0


def test_full_coverage():
    log = make_log([make_trace(c, ["a"], outcome=1.0) for c in ("c1", "c2")])
    idx = instances_in_log(singleton_pattern("a"), log, NO_RULES)
    assert case_coverage(idx, log) == 1.0


# ---------------------------------------------------------------------------
# spearman


def test_spearman_comonotone():
    assert spearman([1, 2, 3], [3, 6, 9]) == pytest.approx(1.0)


def test_spearman_antitone():
    assert spearman([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)


def test_spearman_with_ties_matches_direct_formula():
    x = [1, 1, 2]
    y = [2, 3, 10]
    # ranks x: (1.5, 1.5, 3), ranks y: (1, 2, 3) -> 1.5 / sqrt(1.5 * 2)
    assert spearman(x, y) == pytest.approx(1.5 / math.sqrt(3.0), abs=1e-12)
    assert spearman(x, y) == pytest.approx(spearman_direct(x, y), abs=1e-12)


def test_spearman_constant_input_is_zero():
    assert spearman([1, 1, 1], [1, 2, 3]) == 0.0
    assert spearman([1, 2, 3], [5, 5, 5]) == 0.0


def test_spearman_errors():
    with pytest.raises(LengthMismatch):
        spearman([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        spearman([1], [1])


def test_spearman_random_ties_match_oracle():
    rng = random.Random(42)
    for _ in range(200):
        n = rng.randint(3, 30)
        x = [rng.randint(0, 5) for _ in range(n)]
        y = [rng.randint(0, 5) for _ in range(n)]
        if len(set(x)) == 1 or len(set(y)) == 1:
            continue
        assert spearman(x, y) == pytest.approx(spearman_direct(x, y), abs=1e-9)


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40, unique=True))
def test_spearman_self_correlation_is_one(xs):
    assert spearman(xs, xs) == pytest.approx(1.0)


@given(
    st.lists(st.integers(0, 50), min_size=3, max_size=30),
    st.lists(st.integers(0, 50), min_size=3, max_size=30),
)
@settings(max_examples=100)
def test_spearman_invariant_under_increasing_transform(xs, ys):
    n = min(len(xs), len(ys))
    xs, ys = xs[:n], ys[:n]
    before = spearman(xs, ys)
    after = spearman([math.exp(x / 10.0) for x in xs], [y**3 for y in ys])
    assert after == pytest.approx(before, abs=1e-9)


# ---------------------------------------------------------------------------
# information gain


def test_information_gain_perfect_binary_split():
    assert information_gain([0, 0, 1, 1], ["A", "A", "B", "B"]) == pytest.approx(1.0)


def test_information_gain_constant_feature():
    assert information_gain([7, 7, 7, 7], ["A", "A", "B", "B"]) == 0.0


def test_information_gain_fixture_matches_oracle():
    feature = [0, 0, 1, 2]
    labels = ["A", "A", "B", "B"]
    assert information_gain(feature, labels) == pytest.approx(
        information_gain_direct(feature, labels)
    )
    assert information_gain(feature, labels) == pytest.approx(1.0)


def test_information_gain_bounds_and_independence():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(2, 40)
        feature = [rng.randint(0, 3) for _ in range(n)]
        labels = [rng.choice("AB") for _ in range(n)]
        gain = information_gain(feature, labels)
        assert 0.0 <= gain <= entropy_bits(labels) + 1e-12
    # product construction: every (feature, label) combination equally often
    feature = [f for f in (0, 1) for _ in ("A", "B")] * 3
    labels = ["A", "B"] * 2 * 3
    assert information_gain(feature, labels) == pytest.approx(0.0, abs=1e-12)


def test_information_gain_length_mismatch():
    with pytest.raises(LengthMismatch):
        information_gain([1], ["A", "B"])


# ---------------------------------------------------------------------------
# outcome interest


def test_outcome_interest_perfect_correlation():
    log = make_log(
        [
            make_trace("c1", ["a"], outcome=1.0),
            make_trace("c2", ["a", "a"], outcome=2.0),
            make_trace("c3", ["a", "a", "a"], outcome=3.0),
        ]
    )
    idx = instances_in_log(singleton_pattern("a"), log, NO_RULES)
    result = outcome_interest(idx, log)
    assert result.value == pytest.approx(1.0)
    assert not result.degenerate


def test_outcome_interest_degenerate_flag(chain_log):
    idx = instances_in_log(singleton_pattern("zz"), chain_log, NO_RULES)
    result = outcome_interest(idx, chain_log)
    assert result.value == 0.0
    assert result.degenerate


def test_outcome_interest_abs_transform():
    log = make_log(
        [
            make_trace("c1", ["a", "a", "a"], outcome=1.0),
            make_trace("c2", ["a", "a"], outcome=2.0),
            make_trace("c3", ["a"], outcome=3.0),
        ]
    )
    idx = instances_in_log(singleton_pattern("a"), log, NO_RULES)
    assert outcome_interest(idx, log, transform="raw").value == pytest.approx(-1.0)
    assert outcome_interest(idx, log, transform="abs").value == pytest.approx(1.0)


def test_outcome_interest_categorical_uses_information_gain():
    log = make_log(
        [
            make_trace("c1", ["a"], outcome="pos", outcome_kind="categorical"),
            make_trace("c2", ["a"], outcome="pos", outcome_kind="categorical"),
            make_trace("c3", ["b"], outcome="neg", outcome_kind="categorical"),
            make_trace("c4", ["b"], outcome="neg", outcome_kind="categorical"),
        ]
    )
    idx = instances_in_log(singleton_pattern("a"), log, NO_RULES)
    assert outcome_interest(idx, log).value == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# distances


def attrs(numeric=None, categorical=None):
    return CaseAttributes(numeric=numeric or {}, categorical=categorical or {})


def fitted_cfg(log, **kwargs):
    return DistanceConfig(**kwargs).fit(log)


def test_pair_distance_identical_is_zero():
    log = make_log(
        [
            make_trace("c1", ["a"], outcome=1.0, numeric={"x": 3.0}, categorical={"g": "m"}),
            make_trace("c2", ["a"], outcome=2.0, numeric={"x": 9.0}, categorical={"g": "f"}),
        ]
    )
    cfg = fitted_cfg(log, numeric_attrs=("x",), categorical_attrs=("g",))
    record = attrs({"x": 3.0}, {"g": "m"})
    assert pair_distance(record, record, cfg) == 0.0


def test_pair_distance_two_categorical_mismatches():
    log = make_log(
        [
            make_trace("c1", ["a"], outcome=1.0, categorical={"g": "m", "h": "x"}),
            make_trace("c2", ["a"], outcome=2.0, categorical={"g": "f", "h": "y"}),
        ]
    )
    cfg = fitted_cfg(log, categorical_attrs=("g", "h"))
    a = attrs(categorical={"g": "m", "h": "x"})
    b = attrs(categorical={"g": "f", "h": "y"})
    assert pair_distance(a, b, cfg) == pytest.approx(2.0 / 3.0)


def test_pair_distance_single_numeric_extremes():
    log = make_log(
        [
            make_trace("c1", ["a"], outcome=1.0, numeric={"x": 0.0}),
            make_trace("c2", ["a"], outcome=2.0, numeric={"x": 10.0}),
        ]
    )
    cfg = fitted_cfg(log, numeric_attrs=("x",))
    assert pair_distance(attrs({"x": 0.0}), attrs({"x": 10.0}), cfg) == pytest.approx(1.0)


@given(
    st.floats(0, 100),
    st.floats(0, 100),
    st.sampled_from(["m", "f"]),
    st.sampled_from(["m", "f"]),
)
def test_pair_distance_symmetric_and_bounded(x1, x2, g1, g2):
    log = make_log(
        [
            make_trace("c1", ["a"], outcome=1.0, numeric={"x": 0.0}, categorical={"g": "m"}),
            make_trace("c2", ["a"], outcome=2.0, numeric={"x": 100.0}, categorical={"g": "f"}),
        ]
    )
    cfg = fitted_cfg(log, numeric_attrs=("x",), categorical_attrs=("g",))
    a = attrs({"x": x1}, {"g": g1})
    b = attrs({"x": x2}, {"g": g2})
    assert pair_distance(a, b, cfg) == pytest.approx(pair_distance(b, a, cfg))
    assert 0.0 <= pair_distance(a, b, cfg) <= 1.0


def _two_by_two_log():
    # cases with the pattern carry "A", cases without carry "B":
    # every cross pair distance is (0 + 1) / 2 = 0.5
    return make_log(
        [
            make_trace("c1", ["p"], outcome=1.0, categorical={"g": "A"}),
            make_trace("c2", ["p"], outcome=2.0, categorical={"g": "A"}),
            make_trace("c3", ["q"], outcome=3.0, categorical={"g": "B"}),
            make_trace("c4", ["q"], outcome=4.0, categorical={"g": "B"}),
        ]
    )


def test_case_distance_both_aggregations_on_half_distance_pairs():
    log = _two_by_two_log()
    idx = instances_in_log(singleton_pattern("p"), log, NO_RULES)
    literal = case_distance(idx, log, DistanceConfig(categorical_attrs=("g",), aggregation="scaled_sum"))
    mean = case_distance(idx, log, DistanceConfig(categorical_attrs=("g",), aggregation="pair_mean"))
    assert literal.value == pytest.approx(0.5)  # 4 pairs * 0.5 / |L|=4
    assert mean.value == pytest.approx(0.5)
    assert not literal.degenerate


def test_case_distance_identical_attributes_is_zero():
    log = make_log(
        [
            make_trace("c1", ["p"], outcome=1.0, categorical={"g": "A"}, numeric={"x": 5.0}),
            make_trace("c2", ["q"], outcome=2.0, categorical={"g": "A"}, numeric={"x": 5.0}),
        ]
    )
    idx = instances_in_log(singleton_pattern("p"), log, NO_RULES)
    for aggregation in ("pair_mean", "scaled_sum"):
        cfg = DistanceConfig(numeric_attrs=("x",), categorical_attrs=("g",), aggregation=aggregation)
        assert case_distance(idx, log, cfg).value == 0.0


def test_case_distance_empty_cohort_degenerates(chain_log):
    cfg = DistanceConfig(categorical_attrs=("g",))
    everywhere = instances_in_log(singleton_pattern("zz"), chain_log, NO_RULES)
    result = case_distance(everywhere, chain_log, cfg)
    assert result.value == 0.0
    assert result.degenerate


def test_pair_mean_invariant_under_case_duplication():
    log = _two_by_two_log()
    doubled = make_log(
        [t for t in log]
        + [
            make_trace(t.case_id + "x", [e.activity for e in t.events],
                       outcome=t.outcome.value,
                       categorical=dict(t.case_attrs.categorical))
            for t in log
        ]
    )
    cfg = DistanceConfig(categorical_attrs=("g",), aggregation="pair_mean")
    idx1 = instances_in_log(singleton_pattern("p"), log, NO_RULES)
    idx2 = instances_in_log(singleton_pattern("p"), doubled, NO_RULES)
    assert case_distance(idx1, log, cfg).value == pytest.approx(
        case_distance(idx2, doubled, cfg).value
    )


def test_missing_numeric_imputed_with_median():
    log = make_log(
        [
            make_trace("c1", ["p"], outcome=1.0, numeric={"x": 0.0}),
            make_trace("c2", ["p"], outcome=2.0, numeric={"x": 10.0}),
            make_trace("c3", ["q"], outcome=3.0, numeric={"x": None}),
        ]
    )
    cfg = DistanceConfig(numeric_attrs=("x",)).fit(log)
    assert cfg.scaled_numeric(log.traces["c3"].case_attrs) == (0.5,)


# ---------------------------------------------------------------------------
# survival statistics


def test_kaplan_meier_three_events():
    curve = kaplan_meier([1.0, 2.0, 3.0], [True, True, True])
    assert curve == ((1.0, pytest.approx(2 / 3)), (2.0, pytest.approx(1 / 3)), (3.0, pytest.approx(0.0)))


def test_kaplan_meier_all_censored_stays_at_one():
    assert kaplan_meier([1.0, 2.0], [False, False]) == ()


def test_kaplan_meier_single_event_with_censoring():
    curve = kaplan_meier([5.0, 8.0], [True, False])
    assert curve == ((5.0, 0.5),)


def test_kaplan_meier_errors():
    with pytest.raises(EmptyInput):
        kaplan_meier([], [])
    with pytest.raises(ValueError):
        kaplan_meier([0.0], [True])
    with pytest.raises(LengthMismatch):
        kaplan_meier([1.0], [True, False])


def test_kaplan_meier_matches_empirical_survival_without_censoring():
    rng = random.Random(11)
    for _ in range(20):
        times = [rng.randint(1, 20) for _ in range(rng.randint(1, 30))]
        curve = kaplan_meier(times, [True] * len(times))
        last = 1.0
        for t, s in curve:
            empirical = sum(1 for x in times if x > t) / len(times)
            assert s == pytest.approx(empirical)
            assert s <= last + 1e-12
            last = s


def test_log_rank_identical_groups():
    group = ([1.0, 2.0, 3.0], [True, True, True])
    statistic, p = log_rank(group, group)
    assert statistic == 0.0
    assert p == 1.0


def test_log_rank_separated_groups_matches_table():
    a = ([1.0, 2.0, 3.0], [True, True, True])
    b = ([10.0, 20.0, 30.0], [True, True, True])
    statistic, p = log_rank(a, b)
    assert statistic == pytest.approx(log_rank_table(a, b))
    # observed 3 events in group a vs expected 0.5 + 0.4 + 0.25, variance 0.6775
    assert statistic == pytest.approx((3 - 1.15) ** 2 / 0.6775)
    assert 0.0 < p < 0.05


def test_log_rank_empty_group():
    with pytest.raises(EmptyInput):
        log_rank(([], []), ([1.0], [True]))


def test_chi2_tail_against_scipy():
    scipy_stats = pytest.importorskip("scipy.stats")
    for x in (0.0, 0.3, 1.0, 2.5, 5.0517, 10.0, 30.0):
        assert chi2_sf_1df(x) == pytest.approx(float(scipy_stats.chi2.sf(x, 1)), abs=1e-10)


# ---------------------------------------------------------------------------
# dashboard


def _dashboard_log():
    return make_log(
        [
            make_trace("c1", ["p", "x"], outcome=1.0, numeric={"age": 30.0}, categorical={"g": "m"}),
            make_trace("c2", ["p"], outcome=2.0, numeric={"age": 40.0}, categorical={"g": "f"}),
            make_trace("c3", ["p", "y"], outcome=3.0, numeric={"age": 50.0}, categorical={"g": "m"}),
            make_trace("c4", ["q"], outcome=4.0, numeric={"age": 60.0}, categorical={"g": "f"}),
            make_trace("c5", ["q"], outcome=5.0, numeric={"age": 70.0}, categorical={"g": "m"}),
        ]
    )


def test_dashboard_continuous_outcome():
    log = _dashboard_log()
    cfg = DistanceConfig(numeric_attrs=("age",), categorical_attrs=("g",))
    p = singleton_pattern("p")
    idx = instances_in_log(p, log, NO_RULES)
    data = dashboard_stats(p, idx, log, cfg)
    assert data.n_in == 3 and data.n_out == 2
    assert data.median_outcome_in == pytest.approx(2.0)
    assert data.median_outcome_out == pytest.approx(4.5)
    assert data.km_in is not None and data.km_out is not None
    assert data.log_rank_p is not None
    assert data.outcome_classes_in is None
    assert data.categorical["g"]["in"] == {"f": pytest.approx(1 / 3), "m": pytest.approx(2 / 3)}
    payload = data.to_dict()
    assert payload["interest"]["cc"] == pytest.approx(0.6)


def test_dashboard_identical_cohorts_have_equal_proportions():
    log = make_log(
        [
            make_trace("c1", ["p"], outcome=1.0, categorical={"g": "m"}),
            make_trace("c2", ["p"], outcome=2.0, categorical={"g": "f"}),
            make_trace("c3", ["q"], outcome=3.0, categorical={"g": "m"}),
            make_trace("c4", ["q"], outcome=4.0, categorical={"g": "f"}),
        ]
    )
    cfg = DistanceConfig(categorical_attrs=("g",))
    p = singleton_pattern("p")
    idx = instances_in_log(p, log, NO_RULES)
    data = dashboard_stats(p, idx, log, cfg)
    assert data.categorical["g"]["in"] == data.categorical["g"]["out"]


def test_dashboard_attribute_only_inside_cohort():
    log = make_log(
        [
            make_trace("c1", ["p"], outcome="pos", outcome_kind="categorical", categorical={"g": "X"}),
            make_trace("c2", ["p"], outcome="pos", outcome_kind="categorical", categorical={"g": "X"}),
            make_trace("c3", ["q"], outcome="neg", outcome_kind="categorical", categorical={"g": "Y"}),
        ]
    )
    cfg = DistanceConfig(categorical_attrs=("g",))
    p = singleton_pattern("p")
    idx = instances_in_log(p, log, NO_RULES)
    data = dashboard_stats(p, idx, log, cfg)
    assert data.categorical["g"]["out"].get("X", 0.0) == 0.0
    # categorical outcome: no survival panel, class proportions instead
    assert data.km_in is None and data.log_rank_p is None
    assert data.outcome_classes_in == {"pos": 1.0}
    assert data.outcome_classes_out == {"neg": 1.0}


def test_interest_vector_composition(chain_log):
    cfg = DistanceConfig()
    fitted = FittedDistance.build(chain_log, cfg)
    idx = instances_in_log(singleton_pattern("b"), chain_log, NO_RULES)
    vector = interest_vector(idx, chain_log, fitted)
    assert vector.cc == pytest.approx(0.75)
    assert "cd" in vector.degenerate  # no attributes declared

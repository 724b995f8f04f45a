from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tracepatterns.interest import InterestVector
from tracepatterns.pareto import DimensionMismatch, MeasuredPattern, dominates, pareto_front
from tracepatterns.patterns import singleton_pattern

from .oracles import brute_force_front

MAXMAXMIN = ("max", "max", "min")
MAXMAX = ("max", "max", "max")  # third dimension neutralized by constant cd


def vec(cc: float, oi: float, cd: float = 0.0) -> InterestVector:
    return InterestVector(cc=cc, oi=oi, cd=cd)


def measured(index: int, vector: InterestVector) -> MeasuredPattern:
    return MeasuredPattern(pattern=singleton_pattern(f"p{index:03d}"), interest=vector)


def values(front: list[MeasuredPattern]) -> set[tuple[float, float, float]]:
    return {item.interest.as_tuple() for item in front}


def test_dominates_examples():
    assert dominates(vec(0.5, 0.5, 0.2), vec(0.4, 0.5, 0.3), MAXMAXMIN)
    assert not dominates(vec(0.5, 0.5, 0.2), vec(0.5, 0.5, 0.2), MAXMAXMIN)
    assert not dominates(vec(1.0, 0.0), vec(0.0, 1.0), MAXMAX)
    assert not dominates(vec(0.0, 1.0), vec(1.0, 0.0), MAXMAX)


def test_dominates_direction_validation():
    with pytest.raises(ValueError):
        dominates(vec(1, 0), vec(0, 1), ("max", "up", "min"))
    with pytest.raises(DimensionMismatch):
        dominates(vec(1, 0), vec(0, 1), ("max",))


def test_front_basic():
    items = [measured(i, v) for i, v in enumerate([vec(0.1, 1.0), vec(0.2, 2.0), vec(0.0, 3.0)])]
    front = pareto_front(items, MAXMAX)
    assert values(front) == {(0.2, 2.0, 0.0), (0.0, 3.0, 0.0)}
    assert [item.front for item in items] == [False, True, True]


def test_front_keeps_duplicates():
    items = [measured(i, vec(0.5, 0.5, 0.5)) for i in range(4)]
    front = pareto_front(items, MAXMAXMIN)
    assert len(front) == 4
    assert all(item.front for item in items)


def test_front_equal_first_dimension_regression():
    # the dominator ties on the first dimension and must still win
    weak = measured(0, vec(1.0, 3.0))
    strong = measured(1, vec(1.0, 5.0))
    front = pareto_front([weak, strong], MAXMAX)
    assert values(front) == {(1.0, 5.0, 0.0)}
    assert not weak.front and strong.front


def test_front_output_order_deterministic():
    items = [
        measured(3, vec(0.2, 5.0)),
        measured(1, vec(0.9, 1.0)),
        measured(2, vec(0.9, 2.0)),
    ]
    front = pareto_front(items, MAXMAX)
    assert [item.interest.cc for item in front] == [0.9, 0.2]


def random_items(rng: random.Random, count: int) -> list[MeasuredPattern]:
    return [
        measured(
            i,
            vec(
                round(rng.random(), 3),
                round(rng.uniform(-1, 1), 3),
                round(rng.uniform(0, 5), 3),
            ),
        )
        for i in range(count)
    ]


def test_front_matches_brute_force_on_random_points():
    rng = random.Random(17)
    items = random_items(rng, 500)
    front = pareto_front(items, MAXMAXMIN)
    expected = brute_force_front([item.interest.as_tuple() for item in items], MAXMAXMIN)
    assert values(front) == {items[i].interest.as_tuple() for i in expected}
    assert len(front) == len(expected)


def test_front_properties_on_random_points():
    rng = random.Random(23)
    items = random_items(rng, 300)
    front = pareto_front(items, MAXMAXMIN)

    for member in front:
        assert not any(
            dominates(other.interest, member.interest, MAXMAXMIN)
            for other in front
            if other is not member
        )
    front_list = list(front)
    for item in items:
        if not item.front:
            assert any(dominates(member.interest, item.interest, MAXMAXMIN) for member in front_list)

    again = pareto_front(front_list, MAXMAXMIN)
    assert values(again) == values(front)
    assert len(again) == len(front_list)


def test_front_invariant_under_increasing_transforms():
    rng = random.Random(31)
    items = random_items(rng, 200)
    baseline = {item.id for item in pareto_front(items, MAXMAXMIN)}
    transformed = [
        MeasuredPattern(
            pattern=item.pattern,
            interest=InterestVector(
                cc=item.interest.cc**2,  # increasing on [0, 1]
                oi=item.interest.oi**3,
                cd=math.expm1(item.interest.cd),
            ),
        )
        for item in items
    ]
    assert {item.id for item in pareto_front(transformed, MAXMAXMIN)} == baseline


@given(
    st.lists(
        st.tuples(
            st.floats(0, 1, allow_nan=False),
            st.floats(-1, 1, allow_nan=False),
            st.floats(0, 3, allow_nan=False),
        ),
        min_size=1,
        max_size=60,
    )
)
@settings(max_examples=60)
def test_front_never_empty_and_mutually_nondominated(points):
    items = [measured(i, vec(*point)) for i, point in enumerate(points)]
    front = pareto_front(items, MAXMAXMIN)
    assert front
    for a in front:
        for b in front:
            if a is not b:
                assert not dominates(a.interest, b.interest, MAXMAXMIN)


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        pareto_front([], MAXMAXMIN)

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from areaformula.core import (
    AtomicMeasure, Gauge, GaugedFamily, MetricInstance, MetricSpace, OutsideDomainError,
    all_subsets, closed_balls, explicit_gauge, hausdorff_gauge, open_balls, spherical_gauge,
)

from conftest import line_matrix
from oracles import random_matrix, rng_for


def line(xs):
    return MetricSpace([f"p{x}" for x in xs], coords=[[x] for x in xs])


def test_diameter_examples():
    X = line([0, 1, 3])
    assert X.diameter([0, 1, 2]) == 3
    assert X.diameter([1]) == 0
    assert X.diameter([]) == 0


def test_balls():
    X = line([0, 1, 2])
    assert X.closed_ball(1, 1) == {0, 1, 2}
    assert X.open_ball(1, 1) == {1}
    assert X.closed_ball(0, Fraction(1, 2)) == {0}


def test_metric_validation():
    with pytest.raises(ValueError):
        MetricSpace(["a", "b"], matrix=[[0, 1], [2, 0]])
    with pytest.raises(ValueError):
        MetricSpace(["a", "b"], matrix=[[0, 0], [0, 0]])
    with pytest.raises(ValueError):
        MetricSpace(["a", "b", "c"], matrix=[[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(ValueError):
        MetricSpace(["a", "b"], coords=[[0], [0]])


def test_euclidean_exact_and_float():
    X = MetricSpace(["o", "p"], coords=[[0, 0], [3, 4]])
    assert X.d(0, 1) == 5
    Y = MetricSpace(["o", "p"], coords=[[0, 0], [1, 1]], backend="float")
    assert Y.d(0, 1) == pytest.approx(2**0.5)


def test_gauge_examples():
    X = line([0, 2])
    assert hausdorff_gauge(1)(frozenset([0, 1]), X) == 2
    assert hausdorff_gauge(2, 3)(frozenset([0]), X) == 0
    g = explicit_gauge({(0,): 2, (1,): 3})
    assert g(frozenset([0]), X) == 2
    with pytest.raises(OutsideDomainError):
        g(frozenset([0, 1]), X)


def test_spherical_gauge_rejects_non_balls():
    X = line([0, 1, 2, 10])
    with pytest.raises(OutsideDomainError):
        spherical_gauge(1)(frozenset([0, 3]), X)
    assert spherical_gauge(1)(frozenset([0, 1, 2]), X) == 2


def test_measure_modes():
    m = AtomicMeasure.atomic([1, 2, "inf"])
    assert m([0, 1]) == 3 and m([2]) == float("inf") and m([]) == 0
    t = AtomicMeasure.from_table(2, {(0,): 1, (1,): 1, (0, 1): Fraction(3, 2)})
    assert t([0, 1]) == Fraction(3, 2) and t.mode == "table-oracle"
    with pytest.raises(ValueError):
        AtomicMeasure.from_table(2, {(0,): 2, (0, 1): 1})


def test_generated_ball_families_contain_singletons():
    X = MetricSpace(list("abcd"), matrix=random_matrix(4, rng_for(1)))
    for fam in (closed_balls(X), open_balls(X)):
        for i in range(4):
            assert frozenset([i]) in fam
        assert all(X.is_ball(B) for B in fam)
    assert len(all_subsets(X)) == 15


def test_restrict_remaps_family():
    X = MetricSpace(list("abc"), matrix=line_matrix([0, 1, 2]))
    fam = (frozenset([0]), frozenset([1, 2]), frozenset([0, 2]))
    inst = MetricInstance(X, fam, Gauge("explicit", table={S: Fraction(1) for S in fam}), AtomicMeasure.atomic([1, 1, 1]))
    sub = inst.restrict([1, 2])
    assert sub.family == (frozenset([0, 1]),)
    assert sub.space.ids == ("b", "c")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 6), st.integers(0, 6), st.integers(0, 6))
def test_ball_and_diameter_invariants(seed, n, x, r):
    X = MetricSpace([str(i) for i in range(n)], matrix=random_matrix(n, rng_for(seed)))
    x %= n
    assert X.open_ball(x, r) <= X.closed_ball(x, r)
    A, B = X.open_ball(x, r), X.closed_ball(x, r)
    assert X.diameter(A) <= X.diameter(B)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=4, max_size=4), st.sets(st.integers(0, 3)), st.sets(st.integers(0, 3)))
def test_atomic_modularity(masses, A, B):
    m = AtomicMeasure.atomic(masses)
    assert m(A | B) + m(A & B) == m(A) + m(B)


def test_gauged_family_rejects_empty_member():
    X = line([0, 1])
    with pytest.raises(ValueError):
        GaugedFamily.build(X, [frozenset()], hausdorff_gauge(1))

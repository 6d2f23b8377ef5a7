import math
from fractions import Fraction

import pytest

from areaformula.core import AtomicMeasure, MetricInstance, MetricSpace, ResolutionTooCoarseError, spherical_gauge
from areaformula.spaces import (
    GeneratorSpec, ball_diameter_probe, diametric_regularity_probe, discrete_metric, fine_cover_transfer_probe,
    generate, rebuild_override_gauge, spherical_density_comparison,
)
from areaformula.caratheodory import phi


def test_generator_counts():
    assert generate(GeneratorSpec("epsilon-net", h=Fraction(1, 4))).n == 5
    assert generate(GeneratorSpec("epsilon-net", region=((0, 1), (0, 1)), h=Fraction(1, 4))).n == 25
    assert generate(GeneratorSpec("sierpinski", depth=2)).n == 9
    with pytest.raises(ValueError):
        GeneratorSpec("cantor", depth=-1)
    with pytest.raises(ValueError):
        GeneratorSpec("epsilon-net", h=0)
    with pytest.raises(ValueError):
        GeneratorSpec("torus")


def test_random_metric_is_valid_and_deterministic():
    a = generate(GeneratorSpec("random-metric", n=4, seed=7))
    b = generate(GeneratorSpec("random-metric", n=4, seed=7))
    MetricSpace(a.space.ids, matrix=a.space.matrix.tolist())  # revalidates
    assert (a.space.matrix == b.space.matrix).all()


def test_singleton_complete_shape():
    inst = generate(GeneratorSpec("singleton-complete", n=5, seed=3))
    for i in range(5):
        assert frozenset([i]) in inst.family
    assert frozenset(range(5)) in inst.family
    assert all(v > 0 for v in inst.gauge.table.values())


def test_sierpinski_uniform_covers():
    inst = generate(GeneratorSpec("sierpinski", depth=3))
    for delta in (0.1, 0.3, 0.6, 2.0):
        assert phi(inst.gauged, delta, range(inst.n)).value == pytest.approx(1, abs=1e-12)


def test_gauge_override_rebuild():
    inst = generate(GeneratorSpec("cantor", depth=2))
    doubled = rebuild_override_gauge(inst, 1)
    whole = frozenset(range(inst.n))
    assert doubled.gauge.table[whole] == 1
    assert doubled.gauge.table[frozenset([0])] == pytest.approx(1 / 9)


def test_regularity_probe_grid_and_gap():
    grid = generate(GeneratorSpec("epsilon-net", region=((0, 1), (0, 1)), h=Fraction(1, 8)))
    assert diametric_regularity_probe(grid, grid.n // 2).consistent
    xs = [0, 0.125, 0.25, 2.0, 2.125, 2.25]
    X = MetricSpace([f"g{i}" for i in range(6)], coords=[[x] for x in xs], backend="float")
    gap = MetricInstance(X, "closed-balls", spherical_gauge(1), AtomicMeasure.atomic([1] * 6, "float"), resolution=0.125)
    rep = diametric_regularity_probe(gap, 0, radii=[0.125 * k for k in range(1, 20)], neighbourhood=0.3)
    assert not rep.consistent and rep.max_jump > 4 * 0.125
    single = MetricInstance(MetricSpace(["o"], coords=[[0]]), "closed-balls", spherical_gauge(1),
                            AtomicMeasure.atomic([1]), resolution=Fraction(1, 8))
    assert diametric_regularity_probe(single, 0).consistent
    with pytest.raises(ResolutionTooCoarseError):
        diametric_regularity_probe(grid, 0, radii=[Fraction(1, 16)])


def test_ball_diameter_probe_cases():
    inst = generate(GeneratorSpec("epsilon-net", h=Fraction(1, 16)))
    h = inst.resolution
    off = ball_diameter_probe(inst, inst.n // 2, radii=[(k + Fraction(1, 2)) * h for k in range(1, 6)])
    assert off.max_difference == 0 and not off.differences
    on = ball_diameter_probe(inst, inst.n // 2, radii=[k * h for k in range(1, 6)])
    assert 0 < on.max_difference <= 4 * h and not on.differences and not on.contradiction
    zo = discrete_metric(4)
    rep = ball_diameter_probe(zo, 0, radii=[Fraction(1, 2), 1, Fraction(3, 2)], neighbourhood=2)
    assert rep.differences and not rep.regular and not rep.contradiction


def test_spherical_density_comparison_cases():
    inst = generate(GeneratorSpec("epsilon-net", h=Fraction(1, 32), backend="float"))
    reps = spherical_density_comparison(inst, alpha=1, points=[inst.n // 2])
    assert reps[0].regular and reps[0].gap <= 1e-6
    atom = generate(GeneratorSpec("epsilon-net", h=Fraction(1, 32), measure="atom", backend="float"))
    rep = spherical_density_comparison(atom, alpha=1, points=[atom.n // 2])[0]
    assert rep.closed_value == rep.open_value == 1 / (2 / 32)
    assert spherical_density_comparison(inst, alpha=1, points=[]) == []


def test_fine_cover_transfer():
    inst = generate(GeneratorSpec("epsilon-net", region=((0, 1), (0, 1)), h=Fraction(1, 8)))
    for x in (0, inst.n // 2, inst.n - 1):
        assert fine_cover_transfer_probe(inst, x, alpha=2)["holds"]


def test_probe_needs_resolution():
    with pytest.raises(ValueError):
        diametric_regularity_probe(generate(GeneratorSpec("random-metric", n=3)), 0)

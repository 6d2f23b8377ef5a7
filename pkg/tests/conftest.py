import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from areaformula.core import AtomicMeasure, Gauge, MetricInstance, MetricSpace  # noqa: E402


def explicit_instance(matrix, family, weights, masses, ids=None, tau=Fraction(2)):
    n = len(matrix)
    ids = ids or [chr(ord("a") + i) for i in range(n)]
    space = MetricSpace(ids, matrix=matrix)
    family = tuple(frozenset(S) for S in family)
    gauge = Gauge("explicit", table={S: (w if w == float("inf") else Fraction(w)) for S, w in zip(family, weights)})
    return MetricInstance(space, family, gauge, AtomicMeasure.atomic(masses), tau=tau)


def line_matrix(xs):
    return [[Fraction(abs(a - b)) for b in xs] for a in xs]


def singleton_instance(masses, weights):
    n = len(masses)
    return explicit_instance(line_matrix(range(n)), [[i] for i in range(n)], weights, masses)


@pytest.fixture
def abc():
    # masses (1, 2, 3), singleton weights (2, 1, 6)
    return singleton_instance([1, 2, 3], [2, 1, 6])


ACCEPTANCE_LINES = {}


def record(number, ok, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])

"""Carathéodory construction on a finite gauged family.

``phi`` is a weighted set-cover optimum restricted to members of diameter
at most delta; ``psi`` takes its supremum over delta > 0.  On a finite
family phi is a step function of delta that only changes at member
diameters, so finitely many probe values of delta suffice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import GaugedFamily, MetricSpace, PointSet, closed_balls, hausdorff_gauge, spherical_gauge, to_mask
from .extreal import INF, ExtReal, zero

EXACT = "exact"
GREEDY = "greedy-upper-bound"


@dataclass(frozen=True)
class CoverSolution:
    """Optimal (or greedy) delta-cover of a target set.

    ``cover`` lists family indices; it is empty both for the empty target
    (value 0) and for infeasible targets (value +inf).
    """

    value: ExtReal
    cover: tuple[int, ...]
    certificate: str = EXACT

    @property
    def feasible(self) -> bool:
        return self.value != INF


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _bits(m: int):
    i = 0
    while m:
        if m & 1:
            yield i
        m >>= 1
        i += 1


class _CoverProblem:
    """Weighted set cover over bitmasks, solved exactly by branch and bound."""

    def __init__(self, masks, weights, target, zero_value):
        self.masks = masks
        self.weights = weights
        self.target = target
        self.zero = zero_value
        self.holders = {e: [] for e in _bits(target)}
        for k, m in enumerate(masks):
            for e in _bits(m & target):
                self.holders[e].append(k)
        for e in self.holders:
            self.holders[e].sort(key=lambda k: weights[k])

    def lower_bound(self, uncovered: int):
        # Dual-feasible fractional bound: each uncovered element pays its
        # cheapest per-element share of a set that contains it.
        lb = self.zero
        for e in _bits(uncovered):
            best = None
            for k in self.holders[e]:
                share = self.weights[k] / _popcount(self.masks[k] & uncovered)
                if best is None or share < best:
                    best = share
            lb += best
        return lb

    def greedy(self, uncovered: int | None = None):
        uncovered = self.target if uncovered is None else uncovered
        chosen, cost = [], self.zero
        while uncovered:
            best_k, best_ratio = None, None
            for k, m in enumerate(self.masks):
                gain = _popcount(m & uncovered)
                if not gain:
                    continue
                ratio = self.weights[k] / gain
                if best_ratio is None or ratio < best_ratio:
                    best_k, best_ratio = k, ratio
            chosen.append(best_k)
            cost += self.weights[best_k]
            uncovered &= ~self.masks[best_k]
        return cost, chosen

    def solve(self):
        self.best_cost, self.best_cover = self.greedy()
        self._branch(self.target, self.zero, [])
        return self.best_cost, self.best_cover

    def _branch(self, uncovered: int, cost, chosen: list[int]):
        if not uncovered:
            if cost < self.best_cost:
                self.best_cost, self.best_cover = cost, list(chosen)
            return
        if cost + self.lower_bound(uncovered) >= self.best_cost:
            return
        # Every cover contains some set holding the least-covered element.
        pivot = min(_bits(uncovered), key=lambda e: len(self.holders[e]))
        for k in self.holders[pivot]:
            chosen.append(k)
            self._branch(uncovered & ~self.masks[k], cost + self.weights[k], chosen)
            chosen.pop()


def phi(family: GaugedFamily, delta, R: Iterable[int], method: str = "exact") -> CoverSolution:
    """Least gauge sum over subfamilies of diameter <= delta covering R.

    Returns value +inf with an empty cover when no admissible cover exists.
    ``method="greedy"`` returns the greedy cover, an upper bound only.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    target = to_mask(R)
    z = zero(family.backend)
    if not target:
        return CoverSolution(z, (), EXACT)
    free, free_mask = [], 0
    cand = []
    for k, m in enumerate(family.masks):
        if not m & target or family.diams[k] > delta or family.values[k] == INF:
            continue
        if family.values[k] == 0:
            free.append(k)
            free_mask |= m
        else:
            cand.append(k)
    rest = target & ~free_mask
    if not rest:
        return CoverSolution(z, tuple(free), EXACT)
    cand = [k for k in cand if family.masks[k] & rest]
    reach = 0
    for k in cand:
        reach |= family.masks[k]
    if rest & ~reach:
        return CoverSolution(INF, (), EXACT)

    # Sets forced by an element with a single holder are taken up front.
    forced = []
    while True:
        holders = {}
        for k in cand:
            for e in _bits(family.masks[k] & rest):
                holders.setdefault(e, []).append(k)
        single = {hs[0] for hs in holders.values() if len(hs) == 1}
        if not single:
            break
        for k in single:
            forced.append(k)
            rest &= ~family.masks[k]
        cand = [k for k in cand if k not in single and family.masks[k] & rest]
        if not rest:
            break
    base = sum((family.values[k] for k in forced), z)

    problem = _CoverProblem(
        [family.masks[k] for k in cand], [family.values[k] for k in cand], rest, z
    )
    if method == "exact":
        cost, chosen = problem.solve()
        certificate = EXACT
    elif method == "greedy":
        cost, chosen = problem.greedy()
        certificate = GREEDY
    else:
        raise ValueError(f"unknown method {method!r}")
    cover = tuple(sorted(free + forced + [cand[i] for i in chosen]))
    return CoverSolution(base + cost, cover, certificate)


def delta_probes(family: GaugedFamily) -> list:
    """One delta below, between and above the distinct positive member diameters.

    phi is constant in delta on each gap, so these probes see every value it takes.
    """
    diams = sorted({d for d in family.diams if d > 0})
    one = zero(family.backend) + 1
    if not diams:
        return [one]
    probes = [diams[0] / 2]
    probes += [(a + b) / 2 for a, b in zip(diams, diams[1:])]
    probes.append(diams[-1] + one)
    return probes


def psi(family: GaugedFamily, A: Iterable[int]) -> ExtReal:
    """sup over delta > 0 of phi(delta, A).

    phi is nonincreasing in delta, so the supremum is attained at the
    smallest probe and the coarser probes are not solved.
    """
    A = frozenset(A)
    if not A:
        return zero(family.backend)
    return phi(family, delta_probes(family)[0], A).value


def psi_by_probes(family: GaugedFamily, A: Iterable[int]) -> ExtReal:
    """Max of phi over every probe; the defining form of psi, kept for checks."""
    A = frozenset(A)
    if not A:
        return zero(family.backend)
    return max(phi(family, d, A).value for d in delta_probes(family))


def hausdorff_measure(space: MetricSpace, alpha, c_alpha, sets: Iterable[PointSet], A) -> ExtReal:
    """psi for the gauge c_alpha * diam^alpha over the given family."""
    return psi(GaugedFamily.build(space, sets, hausdorff_gauge(alpha, c_alpha)), A)


def spherical_measure(space: MetricSpace, alpha, c_alpha, A) -> ExtReal:
    """psi for c_alpha * diam^alpha restricted to the generated closed balls."""
    family = GaugedFamily.build(space, closed_balls(space), spherical_gauge(alpha, c_alpha))
    return psi(family, A)

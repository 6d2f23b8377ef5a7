"""Finite metric spaces, gauges and measures.

Points are addressed by integer index; ``MetricSpace.ids`` maps indices to
the string identifiers used in instance files.  Point sets are frozensets
of indices.  Everything here is immutable once built.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .extreal import (
    FLOAT,
    INF,
    RATIONAL,
    ExtReal,
    InexactPowerError,
    check_backend,
    coerce,
    coerce_real,
    mul,
    power,
    total,
    zero,
)

PointSet = frozenset

GAUGE_KINDS = ("explicit", "hausdorff", "spherical", "open-spherical")
FAMILY_GENERATORS = ("closed-balls", "open-balls", "all-subsets")

# Largest space for which the full power set may be materialized.
MAX_ALL_SUBSETS = 14


class OutsideDomainError(ValueError):
    """A set is not in the admissible domain of a gauge."""


class NotFineError(ValueError):
    """A covering relation is not fine at the requested point."""


class ResolutionTooCoarseError(ValueError):
    """A probe asks for detail below the instance's resolution floor."""


def _exact_sqrt(x: Fraction) -> Fraction:
    num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if num * num != x.numerator or den * den != x.denominator:
        raise InexactPowerError(
            f"distance sqrt({x}) is irrational; use the float backend"
        )
    return Fraction(num, den)


class MetricSpace:
    """A finite metric space.

    Distances come either from an explicit symmetric matrix or from
    Euclidean coordinates.  With coordinates the full matrix is only
    built on demand, so large grids can be queried row by row.
    """

    def __init__(
        self,
        ids: Sequence[str],
        *,
        matrix=None,
        coords=None,
        backend: str = RATIONAL,
        validate: bool = True,
    ):
        self.backend = check_backend(backend)
        self.ids = tuple(str(i) for i in ids)
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate point identifiers")
        self.n = len(self.ids)
        self._index = {pid: k for k, pid in enumerate(self.ids)}
        self._matrix = None
        self.coords = None
        if coords is not None:
            self.coords = self._coerce_coords(coords)
        if matrix is not None:
            self._matrix = self._coerce_matrix(matrix)
        elif self.coords is None:
            raise ValueError("a metric space needs a distance matrix or coordinates")
        if validate:
            self._validate()

    def _coerce_coords(self, coords):
        rows = [list(c) if isinstance(c, (list, tuple, np.ndarray)) else [c] for c in coords]
        if len(rows) != self.n:
            raise ValueError("one coordinate vector per point is required")
        dims = {len(r) for r in rows}
        if len(dims) != 1 or 0 in dims:
            raise ValueError("coordinate vectors must share a positive dimension")
        if self.backend == FLOAT:
            return np.array([[float(v) for v in r] for r in rows], dtype=float)
        out = np.empty((self.n, dims.pop()), dtype=object)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                out[i, j] = _signed(v)
        return out

    def _coerce_matrix(self, matrix):
        rows = [list(r) for r in matrix]
        if len(rows) != self.n or any(len(r) != self.n for r in rows):
            raise ValueError(f"distance matrix must be {self.n}x{self.n}")
        dtype = float if self.backend == FLOAT else object
        out = np.empty((self.n, self.n), dtype=dtype)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                out[i, j] = coerce_real(v, self.backend)
        return out

    def _validate(self):
        if self._matrix is None:
            if self.n != len({tuple(r) for r in self.coords.tolist()}):
                raise ValueError("duplicate points (identical coordinates)")
            return
        m = self._matrix
        for i in range(self.n):
            if m[i, i] != 0:
                raise ValueError(f"dist[{i}][{i}] must be 0")
            for j in range(i + 1, self.n):
                if m[i, j] != m[j, i]:
                    raise ValueError(f"distance matrix not symmetric at ({i}, {j})")
                if not m[i, j] > 0:
                    raise ValueError(
                        f"points {self.ids[i]!r} and {self.ids[j]!r} coincide (distance 0)"
                    )
        slack = 1e-12 * float(np.max(m)) if self.backend == FLOAT and self.n else 0
        for j in range(self.n):
            bound = m[:, j][:, None] + m[j, :][None, :]
            if np.any(m > bound + slack):
                i, k = np.argwhere(m > bound + slack)[0]
                raise ValueError(
                    f"triangle inequality fails: d({self.ids[i]},{self.ids[k]}) > "
                    f"d({self.ids[i]},{self.ids[j]}) + d({self.ids[j]},{self.ids[k]})"
                )

    # -- lookup -----------------------------------------------------------

    def index(self, pid) -> int:
        if isinstance(pid, (int, np.integer)) and not isinstance(pid, bool):
            if not 0 <= pid < self.n:
                raise IndexError(f"point index {pid} out of range")
            return int(pid)
        try:
            return self._index[str(pid)]
        except KeyError:
            raise KeyError(f"unknown point {pid!r}") from None

    def indices(self, pids: Iterable) -> PointSet:
        return frozenset(self.index(p) for p in pids)

    def names(self, S: Iterable[int]) -> list[str]:
        return [self.ids[i] for i in sorted(S)]

    @property
    def zero(self) -> ExtReal:
        return zero(self.backend)

    # -- distances --------------------------------------------------------

    def row(self, i: int) -> np.ndarray:
        """Distances from point ``i`` to every point."""
        if self._matrix is not None:
            return self._matrix[i]
        c = self.coords
        if self.backend == FLOAT:
            return np.sqrt(((c - c[i]) ** 2).sum(axis=1))
        diff = c - c[i]
        if c.shape[1] == 1:
            return np.abs(diff[:, 0])
        out = np.empty(self.n, dtype=object)
        for k in range(self.n):
            out[k] = _exact_sqrt(sum((v * v for v in diff[k]), Fraction(0)))
        return out

    @cached_property
    def matrix(self) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix
        dtype = float if self.backend == FLOAT else object
        out = np.empty((self.n, self.n), dtype=dtype)
        for i in range(self.n):
            out[i] = self.row(i)
        return out

    @property
    def has_matrix(self) -> bool:
        return self._matrix is not None

    def d(self, i: int, j: int) -> ExtReal:
        if self._matrix is not None:
            return self._matrix[i, j]
        if self.backend == FLOAT:
            return float(np.sqrt(((self.coords[i] - self.coords[j]) ** 2).sum()))
        diff = self.coords[i] - self.coords[j]
        if len(diff) == 1:
            return abs(diff[0])
        return _exact_sqrt(sum((v * v for v in diff), Fraction(0)))

    def diameter(self, S: Iterable[int]) -> ExtReal:
        """Largest pairwise distance in S; 0 for the empty set and singletons."""
        idx = sorted(S)
        for i in idx:
            if not 0 <= i < self.n:
                raise IndexError(f"point index {i} out of range")
        if len(idx) <= 1:
            return self.zero
        if self._matrix is not None:
            return self._matrix[np.ix_(idx, idx)].max()
        if self.backend == FLOAT:
            return float(pdist(self.coords[idx]).max())
        if self.coords.shape[1] == 1:
            vals = [self.coords[i, 0] for i in idx]
            return max(vals) - min(vals)
        return max(self.d(i, j) for i, j in itertools.combinations(idx, 2))

    def distance_values(self, x: int) -> list[ExtReal]:
        """Sorted distinct positive distances from ``x``."""
        return sorted({v for v in self.row(x).tolist() if v > 0})

    # -- balls ------------------------------------------------------------

    def closed_ball(self, x: int, r) -> PointSet:
        return frozenset(np.flatnonzero(self.row(x) <= r).tolist())

    def open_ball(self, x: int, r) -> PointSet:
        return frozenset(np.flatnonzero(self.row(x) < r).tolist())

    def ball_centers(self, S: PointSet) -> list[int]:
        """Points c of S with S equal to the closed ball at c of radius max d(c, S).

        On a finite space the closed-ball and open-ball families coincide as
        families of sets, so this decides membership in either.
        """
        out = []
        for c in sorted(S):
            r = self.row(c)
            radius = max(r[j] for j in S)
            if self.closed_ball(c, radius) == S:
                out.append(c)
        return out

    def is_ball(self, S: PointSet) -> bool:
        return bool(S) and bool(self.ball_centers(S))

    def restrict(self, keep: Sequence[int]) -> "MetricSpace":
        keep = list(keep)
        ids = [self.ids[i] for i in keep]
        if self._matrix is not None:
            sub = self._matrix[np.ix_(keep, keep)]
            return MetricSpace(ids, matrix=sub.tolist(), backend=self.backend, validate=False)
        return MetricSpace(ids, coords=self.coords[keep].tolist(), backend=self.backend, validate=False)


def _signed(v):
    """Coerce a possibly negative coordinate to a Fraction."""
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v)


# -- ball families ----------------------------------------------------------


def closed_balls(space: MetricSpace, *, near: int | None = None, max_diam=None) -> list[PointSet]:
    """Distinct closed balls, one per (center, radius) with radius a realized distance.

    The radius-zero ball (the singleton) is included, matching closed balls of
    radius below the nearest-neighbour distance.  With ``near`` and
    ``max_diam`` only balls containing ``near`` with diameter at most
    ``max_diam`` are produced.
    """
    seen: dict[PointSet, None] = {}
    centers = range(space.n)
    if near is not None:
        row = space.row(near)
        centers = [c for c in range(space.n) if max_diam is None or row[c] <= max_diam]
    for c in centers:
        row = space.row(c)
        radii = [space.zero] + space.distance_values(c)
        for r in radii:
            if max_diam is not None and r > max_diam:
                break
            if near is not None and row[near] > r:
                continue
            ball = frozenset(np.flatnonzero(row <= r).tolist())
            if ball in seen:
                continue
            if max_diam is not None and space.diameter(ball) > max_diam:
                break
            seen[ball] = None
    return list(seen)


def open_balls(space: MetricSpace, *, near: int | None = None, max_diam=None) -> list[PointSet]:
    """Distinct open balls B(c, r) with r ranging over realized distances.

    One extra radius beyond the largest realized distance (or beyond
    ``max_diam``) is used so that the ball equal to the whole reachable
    neighbourhood is produced.
    """
    seen: dict[PointSet, None] = {}
    centers = range(space.n)
    if near is not None:
        row = space.row(near)
        centers = [c for c in range(space.n) if max_diam is None or row[c] <= max_diam]
    for c in centers:
        row = space.row(c)
        dists = space.distance_values(c)
        radii = list(dists)
        radii.append(dists[-1] * 2 if dists else space.zero + 1)
        for r in radii:
            if near is not None and not row[near] < r:
                continue
            ball = frozenset(np.flatnonzero(row < r).tolist())
            if ball in seen:
                continue
            if max_diam is not None and space.diameter(ball) > max_diam:
                break
            seen[ball] = None
    return list(seen)


def all_subsets(space: MetricSpace) -> list[PointSet]:
    if space.n > MAX_ALL_SUBSETS:
        raise ValueError(f"refusing to enumerate 2^{space.n} subsets")
    out = []
    for k in range(1, space.n + 1):
        out.extend(frozenset(c) for c in itertools.combinations(range(space.n), k))
    return out


def generate_family(space: MetricSpace, kind: str, **kw) -> list[PointSet]:
    if kind == "closed-balls":
        return closed_balls(space, **kw)
    if kind == "open-balls":
        return open_balls(space, **kw)
    if kind == "all-subsets":
        return all_subsets(space)
    raise ValueError(f"unknown family generator {kind!r}")


# -- gauges -----------------------------------------------------------------


@dataclass(frozen=True)
class Gauge:
    """A set function zeta on a family of point sets.

    ``hausdorff`` evaluates c_alpha * diam(S)^alpha on any set; the two
    spherical kinds use the same formula but only accept balls; ``explicit``
    looks the value up in ``table``.
    """

    kind: str = "explicit"
    alpha: object = None
    c_alpha: object = 1
    table: Mapping[PointSet, ExtReal] | None = None

    def __post_init__(self):
        if self.kind not in GAUGE_KINDS:
            raise ValueError(f"unknown gauge kind {self.kind!r}")
        if self.kind == "explicit":
            if self.table is None:
                raise ValueError("explicit gauge needs a table")
        else:
            if self.alpha is None or not self.alpha > 0:
                raise ValueError("alpha must be positive")
            if not self.c_alpha > 0:
                raise ValueError("c_alpha must be positive")

    def __call__(self, S: PointSet, space: MetricSpace) -> ExtReal:
        S = frozenset(S)
        if self.kind == "explicit":
            try:
                return self.table[S]
            except KeyError:
                raise OutsideDomainError(
                    f"set {space.names(S)} is not listed in the gauge table"
                ) from None
        if self.kind != "hausdorff" and not space.is_ball(S):
            raise OutsideDomainError(f"set {space.names(S)} is not a ball")
        return self.evaluate(space.diameter(S), space.backend)

    def evaluate(self, diam: ExtReal, backend: str) -> ExtReal:
        """c_alpha * diam^alpha without any domain check."""
        return mul(coerce(self.c_alpha, backend), power(diam, self.alpha, backend))


def hausdorff_gauge(alpha, c_alpha=1) -> Gauge:
    return Gauge("hausdorff", alpha, c_alpha)


def spherical_gauge(alpha, c_alpha=1, *, open_balls: bool = False) -> Gauge:
    return Gauge("open-spherical" if open_balls else "spherical", alpha, c_alpha)


def explicit_gauge(table: Mapping[Iterable[int], object], backend: str = RATIONAL) -> Gauge:
    return Gauge("explicit", table={frozenset(k): coerce(v, backend) for k, v in table.items()})


# -- measures ---------------------------------------------------------------


@dataclass(frozen=True)
class AtomicMeasure:
    """A measure given by point masses, or by a table of set values.

    In ``atomic`` mode mu(E) is the sum of the masses in E.  In
    ``table-oracle`` mode mu(E) is the least listed value over listed
    supersets of E; the table is checked for monotonicity and
    subadditivity when built.
    """

    mass: tuple[ExtReal, ...]
    table: Mapping[PointSet, ExtReal] | None = None
    backend: str = RATIONAL

    def __post_init__(self):
        if self.table is not None:
            _validate_table(self.table)

    @property
    def mode(self) -> str:
        return "atomic" if self.table is None else "table-oracle"

    @classmethod
    def atomic(cls, masses: Iterable, backend: str = RATIONAL) -> "AtomicMeasure":
        return cls(tuple(coerce(m, backend) for m in masses), None, backend)

    @classmethod
    def from_table(cls, n: int, table: Mapping[Iterable[int], object], backend: str = RATIONAL):
        tab = {frozenset(k): coerce(v, backend) for k, v in table.items()}
        mass = []
        for i in range(n):
            mass.append(_table_lookup(tab, frozenset([i])))
        return cls(tuple(mass), tab, backend)

    def __call__(self, E: Iterable[int]) -> ExtReal:
        E = frozenset(E)
        if not E:
            return zero(self.backend)
        if self.table is None:
            return total((self.mass[i] for i in E), self.backend)
        return _table_lookup(self.table, E)

    def restrict(self, keep: Sequence[int]) -> "AtomicMeasure":
        if self.table is not None:
            pos = {old: new for new, old in enumerate(keep)}
            tab = {
                frozenset(pos[i] for i in S): v
                for S, v in self.table.items()
                if S <= set(keep)
            }
            return AtomicMeasure(tuple(self.mass[i] for i in keep), tab, self.backend)
        return AtomicMeasure(tuple(self.mass[i] for i in keep), None, self.backend)


def _table_lookup(table, E: PointSet) -> ExtReal:
    if not E:
        return Fraction(0)
    best = None
    for S, v in table.items():
        if E <= S and (best is None or v < best):
            best = v
    if best is None:
        raise OutsideDomainError(f"measure table lists no superset of {sorted(E)}")
    return best


def _validate_table(table):
    items = list(table.items())
    for (S, a), (T, b) in itertools.product(items, repeat=2):
        if S < T and a > b:
            raise ValueError(f"measure table not monotone: {sorted(S)} vs {sorted(T)}")
        U = S | T
        if U in table and table[U] > a + b:
            raise ValueError(f"measure table not subadditive on {sorted(S)}, {sorted(T)}")


# -- gauged families --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GaugedFamily:
    """Covering family with precomputed gauge values and diameters."""

    space: MetricSpace
    sets: tuple[PointSet, ...]
    values: tuple[ExtReal, ...]
    diams: tuple[ExtReal, ...]

    @classmethod
    def build(cls, space: MetricSpace, sets: Iterable[Iterable[int]], gauge: Gauge) -> "GaugedFamily":
        sets = tuple(frozenset(S) for S in sets)
        for S in sets:
            if not S:
                raise ValueError("the empty set cannot be a member of a covering family")
        diams = tuple(space.diameter(S) for S in sets)
        if gauge.kind == "explicit":
            values = tuple(gauge(S, space) for S in sets)
        else:
            if gauge.kind != "hausdorff":
                for S in sets:
                    if not space.is_ball(S):
                        raise OutsideDomainError(f"set {space.names(S)} is not a ball")
            values = tuple(gauge.evaluate(d, space.backend) for d in diams)
        return cls(space, sets, values, diams)

    def __len__(self) -> int:
        return len(self.sets)

    @property
    def backend(self) -> str:
        return self.space.backend

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(to_mask(S) for S in self.sets)

    @cached_property
    def by_point(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.space.n)]
        for k, S in enumerate(self.sets):
            for i in S:
                out[i].append(k)
        return tuple(tuple(v) for v in out)

    def containing(self, x: int) -> tuple[int, ...]:
        return self.by_point[x]

    def index_of(self, S: Iterable[int]) -> int | None:
        S = frozenset(S)
        for k, T in enumerate(self.sets):
            if T == S:
                return k
        return None


def to_mask(S: Iterable[int]) -> int:
    m = 0
    for i in S:
        m |= 1 << i
    return m


def from_mask(m: int) -> PointSet:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return frozenset(out)


# -- instances --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MetricInstance:
    """A metric space together with its covering family, gauge and measure.

    ``family`` is either an explicit tuple of point sets or the name of a
    generator (``closed-balls``, ``open-balls``, ``all-subsets``) that is
    expanded on demand.  ``resolution`` marks an epsilon-net of a continuum
    set: sets below that diameter are treated as sub-resolution.
    """

    space: MetricSpace
    family: tuple[PointSet, ...] | str
    gauge: Gauge
    measure: AtomicMeasure
    tau: ExtReal = Fraction(2)
    resolution: ExtReal | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.tau > 1:
            raise ValueError("tau must exceed 1")
        if self.resolution is not None and not self.resolution > 0:
            raise ValueError("resolution must be positive")
        if len(self.measure.mass) != self.space.n:
            raise ValueError("measure must assign a mass to every point")
        if isinstance(self.family, str) and self.family not in FAMILY_GENERATORS:
            raise ValueError(f"unknown family generator {self.family!r}")

    @property
    def backend(self) -> str:
        return self.space.backend

    @property
    def n(self) -> int:
        return self.space.n

    @cached_property
    def gauged(self) -> GaugedFamily:
        return self.gauged_family()

    def family_sets(self, **locality) -> list[PointSet]:
        if isinstance(self.family, str):
            return generate_family(self.space, self.family, **locality)
        return list(self.family)

    def gauged_family(self, **locality) -> GaugedFamily:
        return GaugedFamily.build(self.space, self.family_sets(**locality), self.gauge)

    def with_(self, **changes) -> "MetricInstance":
        fields = dict(
            space=self.space,
            family=self.family,
            gauge=self.gauge,
            measure=self.measure,
            tau=self.tau,
            resolution=self.resolution,
            meta=dict(self.meta),
        )
        fields.update(changes)
        return MetricInstance(**fields)

    def restrict(self, keep: Sequence[int]) -> "MetricInstance":
        """Sub-instance on the points ``keep``; family members leaving it are dropped."""
        keep = sorted(keep)
        pos = {old: new for new, old in enumerate(keep)}
        space = self.space.restrict(keep)
        family = self.family
        gauge = self.gauge
        if not isinstance(family, str):
            family = tuple(frozenset(pos[i] for i in S) for S in family if S <= set(keep))
        if gauge.kind == "explicit":
            gauge = Gauge(
                "explicit",
                table={frozenset(pos[i] for i in S): v for S, v in gauge.table.items() if S <= set(keep)},
            )
        return self.with_(space=space, family=family, gauge=gauge, measure=self.measure.restrict(keep))

"""Instance generators and probes for discretized continuum instances."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import (
    AtomicMeasure,
    Gauge,
    GaugedFamily,
    MetricInstance,
    MetricSpace,
    NotFineError,
    ResolutionTooCoarseError,
    closed_balls,
    hausdorff_gauge,
    open_balls,
    spherical_gauge,
)
from .density import GRID_SLACK, DensityProfile, density_profile, filter_family
from .extreal import FLOAT, INF, RATIONAL, coerce_real, encode, rel_gap

CANTOR_DIM = math.log(2) / math.log(3)
SIERPINSKI_DIM = math.log(3) / math.log(2)

GENERATOR_KINDS = ("cantor", "sierpinski", "epsilon-net", "random-metric", "singleton-complete")


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of a generated instance.

    Only the fields relevant to ``kind`` are read.  ``measure`` is one of
    ``uniform``, ``random``, ``atom`` (one unit atom at the middle point,
    zero elsewhere) or, for singleton-complete instances, ``mixed``
    (random zero masses and weights) and ``heavy`` (some infinite masses).
    """

    kind: str
    depth: int = 3
    n: int = 5
    seed: int = 0
    region: tuple[tuple[float, float], ...] = ((0, 1),)
    h: object = Fraction(1, 4)
    alpha: object = None
    c_alpha: object = 1
    family: str | None = None
    measure: str = "uniform"
    extras: int = 3
    backend: str | None = None
    tau: object = Fraction(2)

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator {self.kind!r}; expected one of {GENERATOR_KINDS}")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        object.__setattr__(self, "h", Fraction(str(self.h)))
        if not self.h > 0:
            raise ValueError("h must be positive")

    def describe(self) -> dict:
        out = {"kind": self.kind, "seed": self.seed}
        if self.kind in ("cantor", "sierpinski"):
            out["depth"] = self.depth
        if self.kind == "epsilon-net":
            out["region"] = [[encode(Fraction(str(a))), encode(Fraction(str(b)))] for a, b in self.region]
            out["h"] = encode(Fraction(str(self.h)))
        if self.kind in ("random-metric", "singleton-complete"):
            out["n"] = self.n
        out["measure"] = self.measure
        if self.family:
            out["family"] = self.family
        return out


def generate(spec: GeneratorSpec) -> MetricInstance:
    builder = {
        "cantor": _cantor,
        "sierpinski": _sierpinski,
        "epsilon-net": _epsilon_net,
        "random-metric": _random_metric_instance,
        "singleton-complete": _singleton_complete,
    }[spec.kind]
    return builder(spec)


# -- self-similar fractals ----------------------------------------------------


def cantor_intervals(depth: int) -> list[list[tuple[Fraction, Fraction]]]:
    """Construction intervals of the middle-thirds Cantor set, per depth."""
    levels = [[(Fraction(0), Fraction(1))]]
    for _ in range(depth):
        nxt = []
        for a, b in levels[-1]:
            third = (b - a) / 3
            nxt += [(a, a + third), (b - third, b)]
        levels.append(nxt)
    return levels


def _explicit_from_override(sets, diameters, alpha, c_alpha):
    return Gauge("explicit", table={S: float(c_alpha) * float(d) ** float(alpha) for S, d in zip(sets, diameters)})


def rebuild_override_gauge(instance: MetricInstance, alpha, c_alpha=None) -> MetricInstance:
    """Recompute an explicit gauge from its recorded per-member diameters."""
    override = instance.meta.get("gauge_override")
    if not override:
        raise ValueError("instance has no gauge override to rebuild")
    c_alpha = override.get("c_alpha", 1) if c_alpha is None else c_alpha
    diams = [Fraction(d) for d in override["diameters"]]
    gauge = _explicit_from_override(instance.family, diams, alpha, c_alpha)
    meta = dict(instance.meta)
    meta["gauge_override"] = dict(override, alpha=float(alpha), c_alpha=encode(Fraction(str(c_alpha))))
    return instance.with_(gauge=gauge, meta=meta)


def _cantor(spec: GeneratorSpec) -> MetricInstance:
    d = spec.depth
    alpha = CANTOR_DIM if spec.alpha is None else spec.alpha
    levels = cantor_intervals(d)
    leaves = levels[-1]
    reps = [(a + b) / 2 for a, b in leaves]
    touching = 0
    sets, diameters = [], []
    for k in range(d + 1):
        width = Fraction(1, 3**k)
        for j in range(3**k):
            lo, hi = j * width, (j + 1) * width
            if not any(lo <= b and a <= hi for a, b in leaves):
                continue
            touching += 1
            members = frozenset(i for i, p in enumerate(reps) if lo <= p <= hi)
            if members:
                sets.append(members)
                diameters.append(width)
    space = MetricSpace([f"c{i}" for i in range(len(reps))], coords=[[p] for p in reps], backend=FLOAT)
    gauge = _explicit_from_override(sets, diameters, alpha, spec.c_alpha)
    measure = AtomicMeasure.atomic([Fraction(1, 2**d)] * len(reps), FLOAT)
    meta = {
        "generator": spec.describe(),
        "triadic_intervals": touching,
        "gauge_override": {
            "alpha": float(alpha),
            "c_alpha": encode(Fraction(str(spec.c_alpha))),
            "diameters": [encode(w) for w in diameters],
        },
    }
    return MetricInstance(space, tuple(sets), gauge, measure, tau=spec.tau, meta=meta)


def _sierpinski(spec: GeneratorSpec) -> MetricInstance:
    d = spec.depth
    alpha = SIERPINSKI_DIM if spec.alpha is None else spec.alpha
    corners = [(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)]
    words = list(itertools.product(range(3), repeat=d))

    def centroid(word):
        # Apply the contractions p -> (p + corner) / 2 innermost first.
        x, y = 0.5, math.sqrt(3) / 6
        for w in reversed(word):
            x, y = (x + corners[w][0]) / 2, (y + corners[w][1]) / 2
        return (x, y)

    reps = [centroid(w) for w in words]
    sets, diameters = [], []
    for k in range(d + 1):
        for prefix in itertools.product(range(3), repeat=k):
            members = frozenset(i for i, w in enumerate(words) if w[:k] == prefix)
            sets.append(members)
            diameters.append(Fraction(1, 2**k))
    space = MetricSpace([f"s{i}" for i in range(len(reps))], coords=reps, backend=FLOAT)
    gauge = _explicit_from_override(sets, diameters, alpha, spec.c_alpha)
    measure = AtomicMeasure.atomic([Fraction(1, 3**d)] * len(reps), FLOAT)
    meta = {
        "generator": spec.describe(),
        "gauge_override": {
            "alpha": float(alpha),
            "c_alpha": encode(Fraction(str(spec.c_alpha))),
            "diameters": [encode(w) for w in diameters],
        },
    }
    return MetricInstance(space, tuple(sets), gauge, measure, tau=spec.tau, meta=meta)


# -- epsilon-nets -------------------------------------------------------------


def _epsilon_net(spec: GeneratorSpec) -> MetricInstance:
    dim = len(spec.region)
    backend = spec.backend or (RATIONAL if dim == 1 else FLOAT)
    h = Fraction(str(spec.h))
    axes = []
    for lo, hi in spec.region:
        lo, hi = Fraction(str(lo)), Fraction(str(hi))
        steps = (hi - lo) / h
        if steps.denominator != 1:
            raise ValueError("region extent must be a multiple of h")
        axes.append([lo + k * h for k in range(int(steps) + 1)])
    pts = list(itertools.product(*axes))
    ids = ["p" + "_".join(str(k) for k in idx) for idx in itertools.product(*(range(len(a)) for a in axes))]
    space = MetricSpace(ids, coords=[list(p) for p in pts], backend=backend, validate=False)
    alpha = dim if spec.alpha is None else spec.alpha
    fam_kind = spec.family or "closed-balls"
    if fam_kind == "intervals":
        if dim != 1:
            raise ValueError("interval families need a one-dimensional region")
        n = len(pts)
        family = tuple(frozenset(range(i, j + 1)) for i in range(n) for j in range(i, n))
        gauge = hausdorff_gauge(alpha, spec.c_alpha)
    elif fam_kind in ("closed-balls", "open-balls"):
        family = fam_kind
        gauge = spherical_gauge(alpha, spec.c_alpha, open_balls=fam_kind == "open-balls")
    elif fam_kind == "all-subsets":
        family = fam_kind
        gauge = hausdorff_gauge(alpha, spec.c_alpha)
    else:
        raise ValueError(f"unknown family {fam_kind!r} for an epsilon-net")
    masses = _masses(spec, len(pts), h**dim, backend)
    meta = {"generator": spec.describe()}
    return MetricInstance(
        space, family, gauge, AtomicMeasure.atomic(masses, backend), tau=spec.tau,
        resolution=coerce_real(h, backend), meta=meta,
    )


def _masses(spec: GeneratorSpec, n: int, unit, backend):
    rng = random.Random(spec.seed)
    if spec.measure == "uniform":
        return [unit] * n
    if spec.measure == "atom":
        out = [Fraction(0)] * n
        out[n // 2] = Fraction(1)
        return out
    if spec.measure == "random":
        return [Fraction(rng.randint(1, 8), rng.randint(1, 4)) for _ in range(n)]
    raise ValueError(f"unknown measure {spec.measure!r}")


# -- random finite metrics ----------------------------------------------------


def random_metric(n: int, rng: random.Random, max_weight: int = 9) -> list[list[Fraction]]:
    """Shortest-path completion of a random symmetric integer matrix."""
    d = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = Fraction(rng.randint(1, max_weight))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def _random_metric_instance(spec: GeneratorSpec) -> MetricInstance:
    rng = random.Random(spec.seed)
    space = MetricSpace([f"x{i}" for i in range(spec.n)], matrix=random_metric(spec.n, rng), backend=RATIONAL)
    alpha = Fraction(1) if spec.alpha is None else spec.alpha
    fam = spec.family or "closed-balls"
    gauge = hausdorff_gauge(alpha, spec.c_alpha) if fam == "all-subsets" else spherical_gauge(alpha, spec.c_alpha)
    measure = AtomicMeasure.atomic(_masses(spec, spec.n, Fraction(1), RATIONAL), RATIONAL)
    return MetricInstance(space, fam, gauge, measure, tau=spec.tau, meta={"generator": spec.describe()})


def _weight(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 12), rng.randint(1, 4))


def _singleton_complete(spec: GeneratorSpec) -> MetricInstance:
    rng = random.Random(spec.seed)
    n = spec.n
    space = MetricSpace([f"x{i}" for i in range(n)], matrix=random_metric(n, rng), backend=RATIONAL)
    mixed = spec.measure == "mixed"
    sets = [frozenset([i]) for i in range(n)]
    table = {}
    masses = []
    for i in range(n):
        w, m = _weight(rng), _weight(rng)
        if spec.measure == "heavy" and rng.random() < 0.3:
            m = INF
        if mixed:
            roll = rng.random()
            if roll < 0.2:
                w = Fraction(0)
            elif roll < 0.4:
                m = Fraction(0)
        table[sets[i]] = w
        masses.append(m)
    if n >= 2:
        full = frozenset(range(n))
        for _ in range(spec.extras):
            size = rng.randint(2, n)
            S = frozenset(rng.sample(range(n), size))
            if S not in table:
                sets.append(S)
                table[S] = _weight(rng)
        if full not in table:
            sets.append(full)
            table[full] = _weight(rng)
    gauge = Gauge("explicit", table=table)
    return MetricInstance(
        space, tuple(sets), gauge, AtomicMeasure.atomic(masses, RATIONAL), tau=spec.tau,
        meta={"generator": spec.describe()},
    )


def mask_atom(instance: MetricInstance, x: int) -> MetricInstance:
    """Drop the singleton {x} from an explicit family, keeping the mass at x."""
    target = frozenset([x])
    family = tuple(S for S in instance.family if S != target)
    table = {S: v for S, v in instance.gauge.table.items() if S != target}
    meta = dict(instance.meta, masked_atom=instance.space.ids[x])
    return instance.with_(family=family, gauge=Gauge("explicit", table=table), meta=meta)


def discrete_metric(n: int, h=Fraction(1, 8)) -> MetricInstance:
    """The 0-1 metric on n points, carrying resolution floor h."""
    m = [[Fraction(0 if i == j else 1) for j in range(n)] for i in range(n)]
    space = MetricSpace([f"q{i}" for i in range(n)], matrix=m, backend=RATIONAL)
    measure = AtomicMeasure.atomic([Fraction(1)] * n, RATIONAL)
    return MetricInstance(space, "closed-balls", spherical_gauge(1), measure, resolution=Fraction(h))


# -- probes ---------------------------------------------------------------------


def _need_resolution(instance: MetricInstance):
    if instance.resolution is None:
        raise ValueError("probe needs an instance with a resolution floor")
    return instance.resolution


def _default_radii(h, top=8):
    return [h * k / 2 for k in range(1, 2 * top + 1)]


def _neighbourhood(space: MetricSpace, x: int, R) -> list[int]:
    row = space.row(x)
    return [y for y in range(space.n) if row[y] < R]


@dataclass
class RegularityReport:
    point: str
    neighbourhood: object
    radii: list
    max_jump: object
    slack: object
    consistent: bool
    delta: object
    worst: tuple | None = None


def diametric_regularity_probe(instance: MetricInstance, x: int, radii: Sequence | None = None,
                               neighbourhood=None) -> RegularityReport:
    """Largest jump of r -> diam(B(y, r)) over a radii grid, for y near x.

    Consistent with regularity when no jump exceeds GRID_SLACK * h.
    ``delta`` is the largest grid radius reached before the first bad jump.
    """
    h = _need_resolution(instance)
    space = instance.space
    radii = sorted(radii) if radii is not None else _default_radii(h)
    if not radii or max(radii) <= h:
        raise ResolutionTooCoarseError("probe radii do not exceed the resolution floor")
    R = 2 * h if neighbourhood is None else neighbourhood
    slack = GRID_SLACK * h
    max_jump, worst = space.zero, None
    first_bad = None
    for y in _neighbourhood(space, x, R):
        prev = None
        for k, r in enumerate(radii):
            dia = space.diameter(space.open_ball(y, r))
            if prev is not None:
                jump = dia - prev
                if jump > max_jump:
                    max_jump, worst = jump, (space.ids[y], r)
                if jump > slack and (first_bad is None or k < first_bad):
                    first_bad = k
            prev = dia
    delta = radii[-1] if first_bad is None else radii[first_bad - 1]
    return RegularityReport(space.ids[x], R, list(radii), max_jump, slack, max_jump <= slack, delta, worst)


@dataclass
class BallDiameterReport:
    point: str
    regular: bool
    max_difference: object
    slack: object
    differences: list = field(default_factory=list)

    @property
    def contradiction(self) -> bool:
        """A flagged difference on a space classified as regular."""
        return self.regular and bool(self.differences)


def ball_diameter_probe(instance: MetricInstance, x: int, radii: Sequence | None = None,
                        neighbourhood=None) -> BallDiameterReport:
    """Compare diam of open and closed balls of equal center and radius near x."""
    h = _need_resolution(instance)
    space = instance.space
    radii = sorted(radii) if radii is not None else _default_radii(h)
    reg = diametric_regularity_probe(instance, x, radii, neighbourhood)
    slack = GRID_SLACK * h
    worst, flagged = space.zero, []
    for y in _neighbourhood(space, x, reg.neighbourhood):
        for r in radii:
            do = space.diameter(space.open_ball(y, r))
            dc = space.diameter(space.closed_ball(y, r))
            diff = dc - do
            worst = max(worst, diff)
            if diff > slack:
                flagged.append((space.ids[y], r, do, dc))
    return BallDiameterReport(space.ids[x], reg.consistent, worst, slack, flagged)


def _ball_profile(instance: MetricInstance, x: int, kind: str, alpha, c_alpha, max_scale) -> DensityProfile:
    space = instance.space
    if kind == "closed":
        sets = closed_balls(space, near=x, max_diam=max_scale)
        gauge = spherical_gauge(alpha, c_alpha)
    else:
        sets = open_balls(space, near=x, max_diam=max_scale)
        gauge = spherical_gauge(alpha, c_alpha, open_balls=True)
    # Ball membership is guaranteed by construction.
    family = GaugedFamily.build(space, sets, Gauge("hausdorff", gauge.alpha, gauge.c_alpha))
    return density_profile(filter_family(instance.measure, family), x, instance.resolution)


def _value_at_or_below(profile: DensityProfile, scale):
    for s, v in zip(profile.scales, profile.values):
        if s <= scale:
            return v
    return None


@dataclass
class SphericalComparison:
    point: str
    regular: bool
    closed: DensityProfile
    open: DensityProfile
    scale: object
    closed_value: object
    open_value: object
    gap: float


def spherical_density_comparison(instance: MetricInstance, alpha=None, c_alpha=1, points: Sequence[int] | None = None,
                                 max_scale=None) -> list[SphericalComparison]:
    """Closed-ball and open-ball density profiles at each probe point.

    Both profiles are built independently from locally generated ball
    families; they are compared at the finest scale both reach.
    """
    h = _need_resolution(instance)
    if alpha is None:
        alpha = instance.gauge.alpha
    if points is None:
        points = [instance.n // 2]
    max_scale = GRID_SLACK * 2 * h if max_scale is None else max_scale
    out = []
    for x in points:
        reg = diametric_regularity_probe(instance, x)
        closed = _ball_profile(instance, x, "closed", alpha, c_alpha, max_scale)
        if not closed.fine:
            raise NotFineError(f"closed-ball family not fine at {instance.space.ids[x]!r} at resolution")
        opened = _ball_profile(instance, x, "open", alpha, c_alpha, max_scale)
        if not opened.fine:
            raise NotFineError(f"open-ball family not fine at {instance.space.ids[x]!r} at resolution")
        scale = max(closed.scales[-1], opened.scales[-1])
        cv, ov = _value_at_or_below(closed, scale), _value_at_or_below(opened, scale)
        out.append(SphericalComparison(instance.space.ids[x], reg.consistent, closed, opened, scale, cv, ov, rel_gap(cv, ov)))
    return out


def fine_cover_transfer_probe(instance: MetricInstance, x: int, alpha=None, c_alpha=1, max_scale=None) -> dict:
    """Closed-ball fineness at x should carry over to open balls.

    At the resolution floor this reads: every closed-ball diameter class at x
    admits an open ball containing x whose diameter is no larger.
    """
    h = instance.resolution
    if alpha is None:
        alpha = instance.gauge.alpha
    if max_scale is None and h is not None:
        max_scale = GRID_SLACK * 2 * h
    closed = _ball_profile(instance, x, "closed", alpha, c_alpha, max_scale)
    opened = _ball_profile(instance, x, "open", alpha, c_alpha, max_scale)
    classes_ok = all(any(o <= s for o in opened.scales) for s in closed.scales)
    return {
        "point": instance.space.ids[x],
        "closed_fine": closed.fine,
        "open_fine": opened.fine,
        "classes_ok": classes_ok,
        "holds": (not closed.fine) or (opened.fine and classes_ok),
    }

"""Hypothesis checks and verdicts for the area formula and its lemmas."""

from __future__ import annotations

import itertools
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .caratheodory import delta_probes, phi
from .core import (
    GaugedFamily,
    MetricInstance,
    PointSet,
    ResolutionTooCoarseError,
    closed_balls,
    hausdorff_gauge,
    spherical_gauge,
    to_mask,
)
from .density import (
    DensityProfile,
    check_c_eta,
    density_profile,
    filter_family,
    quotient,
    search_c_eta,
    semantics_label,
)
from .extreal import FLOAT, INF, ExtReal, mul, to_float, zero

VERIFIED = "verified"
VIOLATED = "violated"
ASSUMED = "assumed"
UNDECIDABLE = "not-decidable-at-scale"

EQUAL = "equal"
FORMULA_VIOLATED = "violated"
HYPOTHESES_FAILED = "hypotheses-failed"
VACUOUS = "vacuous"

EXHAUSTIVE_LIMIT = 12
DEFAULT_SAMPLES = 256
FLOAT_TOLERANCE = 1e-9
C_ETA_LIMIT = 3000

VARIANTS = {
    "general-I": (
        ("1", "regular-borel"), ("2", "closed"), ("3", "fine"), ("4", "borel-A"),
        ("5", "open-cover"), ("6", "c-eta"), ("7", "zero-sigma"), ("8", "abs-cont"),
        ("F", "borel-F"),
    ),
    "general-II": (
        ("1", "borel-regular"), ("2", "members-measurable"), ("3", "fine"), ("4", "measurable-A"),
        ("5", "open-cover"), ("6", "c-eta"), ("7", "abs-cont"), ("F", "measurable-F"),
    ),
    "hausdorff-I": (
        ("1", "regular-borel"), ("2", "fine"), ("3", "borel-A"), ("4", "open-cover"),
        ("5", "zero-sigma"), ("6", "abs-cont"),
    ),
    "hausdorff-II": (
        ("1", "borel-regular"), ("2", "fine"), ("3", "measurable-A"), ("4", "open-cover"),
        ("5", "abs-cont"),
    ),
    "spherical-I": (
        ("1", "diam-regular"), ("2", "regular-borel"), ("3", "fine"), ("4", "borel-A"),
        ("5", "open-cover"), ("6", "zero-sigma"), ("7", "abs-cont"),
    ),
    "spherical-II": (
        ("1", "diam-regular"), ("2", "borel-regular"), ("3", "fine"), ("4", "measurable-A"),
        ("5", "open-cover"), ("6", "abs-cont"),
    ),
}

STATEMENTS = {
    "regular-borel": "mu is a regular Borel measure",
    "borel-regular": "mu is Borel regular",
    "closed": "every kept member is closed",
    "members-measurable": "members are Borel and kept members are closed",
    "fine": "the kept family covers A finely",
    "borel-A": "A is a Borel set",
    "measurable-A": "A is psi-measurable and sigma-finite for psi",
    "open-cover": "A is covered by countably many open sets of finite mu-measure",
    "c-eta": "the (c, eta, S~) condition holds",
    "zero-sigma": "{x in A: F(x) = 0} is sigma-finite for psi",
    "abs-cont": "mu restricted to A is absolutely continuous w.r.t. psi restricted to A",
    "borel-F": "F is Borel on A",
    "measurable-F": "F is psi-measurable on A",
    "diam-regular": "X is diametrically regular",
    "B-measurable": "B is mu-measurable",
}

# Conditions that only have continuum content; on a resolution-floor
# instance the finite net cannot decide them.
_CONTINUUM_ONLY = {
    "closed", "members-measurable", "open-cover", "zero-sigma", "abs-cont",
    "measurable-A", "borel-F", "measurable-F",
}


@dataclass
class Condition:
    label: str
    tag: str
    statement: str
    status: str
    witness: object = None
    kind: str = "hypothesis"


@dataclass
class HypothesisReport:
    theorem: str
    conditions: list[Condition]
    semantics: str

    @property
    def all_verified(self) -> bool:
        return all(c.status == VERIFIED for c in self.conditions if c.kind == "hypothesis")

    @property
    def failed(self) -> list[Condition]:
        return [c for c in self.conditions if c.kind == "hypothesis" and c.status != VERIFIED]

    def get(self, label: str) -> Condition:
        for c in self.conditions:
            if c.label == label:
                return c
        raise KeyError(label)


def subsets_of(points: Iterable[int], seed: int = 0, samples: int = DEFAULT_SAMPLES,
               limit: int = EXHAUSTIVE_LIMIT) -> tuple[list[PointSet], bool]:
    """Nonempty subsets: all of them up to ``limit`` points, else a seeded sample."""
    pts = sorted(points)
    if len(pts) <= limit:
        out = [frozenset(c) for r in range(1, len(pts) + 1) for c in itertools.combinations(pts, r)]
        return out, True
    rng = random.Random(seed)
    seen = {frozenset([p]) for p in pts} | {frozenset(pts)}
    while len(seen) < len(pts) + 1 + samples:
        E = frozenset(p for p in pts if rng.random() < 0.5)
        if E:
            seen.add(E)
    return sorted(seen, key=lambda E: (len(E), sorted(E))), False


def _finest_subfamily(family: GaugedFamily):
    probe = delta_probes(family)[0]
    keep = [k for k in range(len(family)) if family.diams[k] <= probe]
    sub = GaugedFamily(
        family.space,
        tuple(family.sets[k] for k in keep),
        tuple(family.values[k] for k in keep),
        tuple(family.diams[k] for k in keep),
    )
    return sub, probe


class Analysis:
    """Cached psi values, filtering and density profiles for one family."""

    def __init__(self, instance: MetricInstance, family: GaugedFamily | None = None):
        self.instance = instance
        self.family = instance.gauged if family is None else family
        self.filtered = filter_family(instance.measure, self.family)
        self.resolution = instance.resolution
        self.backend = instance.backend
        self._fine, self._probe = _finest_subfamily(self.family)
        self._psi: dict[int, ExtReal] = {}
        self._profiles: dict[int, DensityProfile] = {}

    def psi(self, E: Iterable[int]) -> ExtReal:
        m = to_mask(E)
        if m not in self._psi:
            self._psi[m] = phi(self._fine, self._probe, E).value if m else zero(self.backend)
        return self._psi[m]

    def mu(self, E: Iterable[int]) -> ExtReal:
        return self.instance.measure(E)

    def profile(self, x: int) -> DensityProfile:
        if x not in self._profiles:
            self._profiles[x] = density_profile(self.filtered, x, self.resolution)
        return self._profiles[x]

    def is_fine(self, x: int) -> bool:
        return self.profile(x).fine

    def density(self, x: int) -> ExtReal:
        """F(x); at non-fine points the finest available class (0 if none)."""
        prof = self.profile(x)
        if prof.fine:
            return prof.limit
        return prof.values[-1] if prof.values else zero(self.backend)


def integrate_against_psi(g: Mapping[int, ExtReal], B: Iterable[int], family: GaugedFamily | None = None,
                          psi: Callable[[PointSet], ExtReal] | None = None) -> ExtReal:
    """Layer-cake integral of g over B against psi.

    sum_i (t_i - t_{i+1}) psi({g >= t_i}) over the distinct values t_1 > ... > t_m
    of g on B with t_{m+1} = 0; an infinite level contributes inf * psi({g = inf}).
    """
    B = frozenset(B)
    if psi is None:
        if family is None:
            raise ValueError("need a family or a psi function")
        ana_fine, probe = _finest_subfamily(family)
        psi = lambda E: phi(ana_fine, probe, E).value if E else zero(family.backend)  # noqa: E731
    if not B:
        return psi(frozenset())
    acc = psi(frozenset()) * 0
    top = frozenset(x for x in B if g[x] == INF)
    if top:
        acc = acc + mul(INF, psi(top))
    levels = sorted({g[x] for x in B if g[x] != INF}, reverse=True)
    for i, t in enumerate(levels):
        nxt = levels[i + 1] if i + 1 < len(levels) else 0
        step = t - nxt
        if step == 0:
            continue
        acc = acc + mul(step, psi(frozenset(x for x in B if g[x] >= t)))
    return acc


# -- hypothesis evaluation -----------------------------------------------------


def _status(ok: bool) -> str:
    return VERIFIED if ok else VIOLATED


class _Checker:
    def __init__(self, ana: Analysis, A: PointSet, seed: int, samples: int, c_eta=None):
        self.ana = ana
        self.A = A
        self.seed = seed
        self.samples = samples
        self.c_eta = c_eta
        self.space = ana.instance.space

    def name(self, x):
        return self.space.ids[x]

    def run(self, tag: str):
        if self.ana.resolution is not None and tag in _CONTINUUM_ONLY:
            return ASSUMED, "continuum property; not decidable on the net"
        return getattr(self, "_" + tag.replace("-", "_"))()

    def _regular_borel(self):
        if self.ana.instance.measure.mode == "atomic":
            return VERIFIED, "atomic measure on a finite space"
        return ASSUMED, "table oracle; additivity not certified"

    _borel_regular = _regular_borel

    def _closed(self):
        return VERIFIED, "finite metric spaces are discrete"

    def _members_measurable(self):
        return VERIFIED, "finite metric spaces are discrete"

    def _borel_A(self):
        return VERIFIED, "finite sets are Borel"

    def _fine(self):
        bad = [x for x in sorted(self.A) if not self.ana.is_fine(x)]
        if bad:
            return VIOLATED, {"not_fine": [self.name(x) for x in bad]}
        return VERIFIED, None

    def _open_cover(self):
        bad = [x for x in sorted(self.A) if self.ana.mu([x]) == INF]
        if bad:
            return VIOLATED, {"infinite_atoms": [self.name(x) for x in bad]}
        return VERIFIED, None

    def _c_eta(self):
        filt = self.ana.filtered
        if len(filt.kept) > C_ETA_LIMIT:
            return UNDECIDABLE, f"{len(filt.kept)} kept members"
        rep = self.c_eta if self.c_eta is not None else search_c_eta(filt, self.ana.instance.tau)
        if rep.feasible:
            return VERIFIED, {"c": rep.c, "eta": rep.eta}
        return VIOLATED, {"members": [self.space.names(filt.family.sets[e.member]) for e in rep.failures[:5]]}

    def _zero_sigma(self):
        zeros = [x for x in sorted(self.A) if self.ana.density(x) == 0]
        bad = [x for x in zeros if self.ana.psi([x]) == INF]
        if bad:
            return VIOLATED, {"infinite_psi_atoms": [self.name(x) for x in bad]}
        return VERIFIED, None

    def _abs_cont(self):
        subsets, exhaustive = subsets_of(self.A, self.seed, self.samples)
        for E in subsets:
            if self.ana.psi(E) == 0 and self.ana.mu(E) != 0:
                return VIOLATED, {"set": self.space.names(E), "exhaustive": exhaustive}
        return VERIFIED, {"exhaustive": exhaustive, "checked": len(subsets)}

    def _borel_F(self):
        return VERIFIED, "every function on a finite discrete space is Borel"

    _measurable_F = _borel_F

    def _measurable_A(self):
        ana = self.ana
        inf_atoms = [x for x in sorted(self.A) if ana.psi([x]) == INF]
        if inf_atoms:
            return VIOLATED, {"not_sigma_finite": [self.name(x) for x in inf_atoms]}
        tests, exhaustive = subsets_of(range(self.space.n), self.seed, self.samples)
        for T in tests:
            inside, outside = T & self.A, T - self.A
            if inside and outside and ana.psi(T) != ana.psi(inside) + ana.psi(outside):
                return VIOLATED, {"test_set": self.space.names(T), "exhaustive": exhaustive}
        return VERIFIED, {"exhaustive": exhaustive}

    def _diam_regular(self):
        if self.ana.resolution is None:
            return VERIFIED, "balls below the least distance are singletons"
        from .spaces import diametric_regularity_probe

        bad = []
        for x in sorted(self.A)[:16]:
            try:
                rep = diametric_regularity_probe(self.ana.instance, x)
            except ResolutionTooCoarseError as exc:
                return UNDECIDABLE, str(exc)
            if not rep.consistent:
                bad.append(self.name(x))
        return (VIOLATED, {"jumps_at": bad}) if bad else (VERIFIED, None)


def _conditions(ana: Analysis, A: PointSet, spec: Sequence[tuple[str, str]], seed: int, samples: int,
                c_eta=None) -> list[Condition]:
    chk = _Checker(ana, A, seed, samples, c_eta)
    out = []
    for label, tag in spec:
        status, witness = chk.run(tag)
        out.append(Condition(label, tag, STATEMENTS[tag], status, witness))
    return out


# -- area formula ----------------------------------------------------------------


def _variant_family(instance: MetricInstance, variant: str, alpha, c_alpha) -> GaugedFamily:
    kind = variant.split("-")[0]
    if kind == "general":
        return instance.gauged
    if alpha is None:
        alpha = instance.gauge.alpha or instance.meta.get("gauge_override", {}).get("alpha")
    if alpha is None:
        raise ValueError(f"variant {variant} needs alpha")
    if c_alpha is None:
        c_alpha = instance.gauge.c_alpha if instance.gauge.kind != "explicit" else 1
    if kind == "hausdorff":
        return GaugedFamily.build(instance.space, instance.family_sets(), hausdorff_gauge(alpha, c_alpha))
    return GaugedFamily.build(instance.space, closed_balls(instance.space), spherical_gauge(alpha, c_alpha))


@dataclass
class AreaFormulaReport:
    variant: str
    B: list
    lhs: ExtReal
    rhs: ExtReal
    backend: str
    densities: dict
    not_fine: list
    verdict: str
    gap: float
    hypotheses: HypothesisReport
    formula_equal: bool = True


def values_equal(a: ExtReal, b: ExtReal, backend: str, tolerance: float = FLOAT_TOLERANCE) -> bool:
    if a == b:
        return True
    if a == INF or b == INF:
        return False
    if backend == FLOAT:
        return abs(float(a) - float(b)) <= tolerance * max(1.0, abs(float(a)))
    return False


class AreaFormula:
    """Area-formula evaluator for one instance, variant and domain A.

    Hypotheses and densities are computed once; ``check(B)`` then compares
    mu(B) with the integral of F over B against psi.
    """

    def __init__(self, instance: MetricInstance, variant: str = "general-I", A: Iterable[int] | None = None, *,
                 alpha=None, c_alpha=None, seed: int = 0, samples: int = DEFAULT_SAMPLES,
                 tolerance: float = FLOAT_TOLERANCE):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; expected one of {tuple(VARIANTS)}")
        self.instance = instance
        self.variant = variant
        self.A = frozenset(range(instance.n)) if A is None else frozenset(A)
        self.tolerance = tolerance
        self.analysis = Analysis(instance, _variant_family(instance, variant, alpha, c_alpha))
        conds = _conditions(self.analysis, self.A, VARIANTS[variant], seed, samples)
        if variant.endswith("-II"):
            conds.append(Condition("B", "B-measurable", STATEMENTS["B-measurable"], UNDECIDABLE,
                                   "part of the conclusion", kind="conclusion"))
        self.hypotheses = HypothesisReport(variant, conds, semantics_label(instance.resolution))
        self.F = {x: self.analysis.density(x) for x in self.A}
        self.not_fine = sorted(x for x in self.A if not self.analysis.is_fine(x))

    def check(self, B: Iterable[int] | None = None) -> AreaFormulaReport:
        B = self.A if B is None else frozenset(B)
        if not B <= self.A:
            raise ValueError("B must be a subset of A")
        ana = self.analysis
        lhs = ana.mu(B)
        rhs = integrate_against_psi(self.F, B, psi=ana.psi)
        equal = values_equal(lhs, rhs, ana.backend, self.tolerance)
        if equal:
            verdict = EQUAL
        elif self.hypotheses.all_verified:
            verdict = FORMULA_VIOLATED
        else:
            verdict = HYPOTHESES_FAILED
        names = self.instance.space.ids
        return AreaFormulaReport(
            self.variant, sorted(names[x] for x in B), lhs, rhs, ana.backend,
            {names[x]: self.F[x] for x in sorted(B)}, [names[x] for x in self.not_fine if x in B],
            verdict, 0.0 if equal else _gap(lhs, rhs), self.hypotheses, equal,
        )


def _gap(a, b) -> float:
    if a == INF or b == INF:
        return INF
    return abs(float(a) - float(b))


def verify_area_formula(instance: MetricInstance, B: Iterable[int] | None = None, variant: str = "general-I",
                        A: Iterable[int] | None = None, **kw) -> AreaFormulaReport:
    return AreaFormula(instance, variant, A, **kw).check(B)


# -- lemmas --------------------------------------------------------------------------


@dataclass
class LemmaReport:
    lemma: str
    t: ExtReal
    hypotheses: HypothesisReport
    checked: int = 0
    exhaustive: bool = True
    violations: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if not self.hypotheses.all_verified:
            return HYPOTHESES_FAILED
        if self.violations:
            return VIOLATED
        if self.checked == 0:
            return VACUOUS
        return VERIFIED


def _threshold_condition(label, ana, pts, t, below: bool):
    bad = []
    for x in sorted(pts):
        if not ana.is_fine(x):
            return Condition(label, "density-threshold", "", UNDECIDABLE, "density undefined off the fine set")
        F = ana.density(x)
        if (below and not F < t) or (not below and not F > t):
            bad.append(ana.instance.space.ids[x])
    text = f"F < {t} on A" if below else f"F > {t} on B"
    return Condition(label, "density-threshold", text, VIOLATED if bad else VERIFIED, {"points": bad} if bad else None)


def verify_lemma_minor(instance: MetricInstance, A: Iterable[int], t, *, family: GaugedFamily | None = None,
                       seed: int = 0, samples: int = DEFAULT_SAMPLES) -> LemmaReport:
    """If F < t on A (regular mu, fine cover) then mu(E) <= t psi(E) for E in A."""
    A = frozenset(A)
    ana = Analysis(instance, family)
    conds = _conditions(ana, A, (("1", "regular-borel"), ("2", "fine")), seed, samples)
    conds.append(_threshold_condition("3", ana, A, t, below=True))
    rep = LemmaReport("minor", t, HypothesisReport("lemma-minor", conds, semantics_label(instance.resolution)))
    subsets, rep.exhaustive = subsets_of(A, seed, samples) if A else ([], True)
    for E in subsets:
        lhs, rhs = ana.mu(E), mul(t, ana.psi(E))
        if not lhs <= rhs:
            rep.violations.append({"set": instance.space.names(E), "mu": lhs, "t_psi": rhs})
    rep.checked = len(subsets)
    return rep


def verify_lemma_major(instance: MetricInstance, B: Iterable[int], t, V: Iterable[int] | None = None, *,
                       c=None, eta=None, family: GaugedFamily | None = None) -> LemmaReport:
    """If F > t on B (closed members, fine cover, (c, eta) condition) then
    t psi(B) <= mu(V) for every open V containing B."""
    B = frozenset(B)
    V = B if V is None else frozenset(V)
    if not B <= V:
        raise ValueError("V must contain B")
    ana = Analysis(instance, family)
    given = None
    if c is not None and eta is not None:
        given = check_c_eta(ana.filtered, instance.tau, c, eta)
    conds = _conditions(ana, B, (("1", "closed"), ("2", "fine"), ("3", "c-eta")), 0, DEFAULT_SAMPLES, given)
    conds.append(_threshold_condition("4", ana, B, t, below=False))
    rep = LemmaReport("major", t, HypothesisReport("lemma-major", conds, semantics_label(instance.resolution)))
    if B:
        lhs, rhs = mul(t, ana.psi(B)), ana.mu(V)
        rep.checked = 1
        rep.detail = {"t_psi_B": lhs, "mu_V": rhs}
        if not lhs <= rhs:
            rep.violations.append(rep.detail)
    return rep


# -- absolute continuity -----------------------------------------------------------


@dataclass
class AbsContReport:
    hypotheses: HypothesisReport
    absolutely_continuous: bool
    infinite_set_null: bool
    infinite_points: list
    witness: list | None
    exhaustive: bool

    @property
    def agree(self) -> bool:
        return self.absolutely_continuous == self.infinite_set_null

    @property
    def forward_holds(self) -> bool:
        """mu({F = inf}) = 0 implies absolute continuity."""
        return self.absolutely_continuous or not self.infinite_set_null

    @property
    def verdict(self) -> str:
        if not self.hypotheses.all_verified:
            return HYPOTHESES_FAILED
        return VERIFIED if self.agree else VIOLATED


ABS_CONT_HYPOTHESES = (("1", "regular-borel"), ("2", "closed"), ("3", "fine"), ("4", "open-cover"), ("5", "c-eta"))


def check_absolute_continuity(instance: MetricInstance, A: Iterable[int] | None = None, *,
                              family: GaugedFamily | None = None, seed: int = 0,
                              samples: int = DEFAULT_SAMPLES) -> AbsContReport:
    """Compare mu << psi on A with mu({x in A: F(x) = inf}) = 0."""
    A = frozenset(range(instance.n)) if A is None else frozenset(A)
    ana = Analysis(instance, family)
    conds = _conditions(ana, A, ABS_CONT_HYPOTHESES, seed, samples)
    hyp = HypothesisReport("absolute-continuity", conds, semantics_label(instance.resolution))
    subsets, exhaustive = subsets_of(A, seed, samples) if A else ([], True)
    witness = None
    for E in subsets:
        if ana.psi(E) == 0 and ana.mu(E) != 0:
            witness = instance.space.names(E)
            break
    inf_pts = frozenset(x for x in A if ana.density(x) == INF)
    return AbsContReport(hyp, witness is None, ana.mu(inf_pts) == 0, instance.space.names(inf_pts), witness, exhaustive)


# -- lower semicontinuity probe ------------------------------------------------------


@dataclass
class SemicontinuityReport:
    delta: ExtReal
    t: ExtReal
    super_level: list
    rows: list
    violations: list

    @property
    def verified(self) -> bool:
        return not self.violations


def semicontinuity_probe(instance: MetricInstance, A: Iterable[int] | None, delta, t, alpha=None, c_alpha=1,
                         family: GaugedFamily | None = None) -> SemicontinuityReport:
    """Openness of {x in A: truncated density > t} on a resolution-floor instance.

    The truncated density at x is the sup of mu(S)/zeta(S) over members
    containing x with diam(S) < delta, zeta being c * diam^alpha.  For each
    point y of the super-level set the witness radius (distance to the rest
    of A) is compared with the radius the openness argument predicts.
    """
    h = instance.resolution
    if h is not None and h >= delta:
        raise ResolutionTooCoarseError("resolution floor is not below delta")
    A = frozenset(range(instance.n)) if A is None else frozenset(A)
    if alpha is None:
        alpha = instance.gauge.alpha
    space = instance.space
    fam = GaugedFamily.build(space, instance.family_sets(), hausdorff_gauge(alpha, c_alpha)) if family is None else family
    filt = filter_family(instance.measure, fam)
    best: dict[int, tuple] = {}
    for k in filt.kept:
        d = fam.diams[k]
        if not d < delta or (h is not None and d < h):
            continue
        q = quotient(filt, k)
        for x in fam.sets[k]:
            if x in A and (x not in best or q > best[x][0]):
                best[x] = (q, k)
    S = sorted(x for x in A if x in best and best[x][0] > t)
    rest = [x for x in A if x not in set(S)]
    rows, bad = [], []
    for y in S:
        q, k = best[y]
        dS, mS = to_float(fam.diams[k]), to_float(filt.mu[k])
        eps = (float(delta) - dS) / 2
        if mS != INF:
            eps = min(eps, ((mS / (float(c_alpha) * float(t))) ** (1 / float(alpha)) - dS) / 2)
        row = space.row(y)
        w = min((to_float(row[z]) for z in rest), default=INF)
        rows.append({"point": space.ids[y], "density": q, "eps": eps, "witness": w})
        if w < eps and (h is None or eps > float(h)):
            bad.append(rows[-1])
    return SemicontinuityReport(delta, t, space.names(S), rows, bad)


# -- counterexample hunting ------------------------------------------------------------

CORPORA = ("singleton-complete", "masked-atom", "alpha-atomic", "mixed", "heavy")


def corpus_instance(corpus: str, seed: int) -> MetricInstance:
    from .spaces import GeneratorSpec, generate, mask_atom

    rng = random.Random(seed)
    if corpus == "alpha-atomic":
        spec = GeneratorSpec("random-metric", n=rng.randint(2, 6), seed=seed, family="all-subsets", measure="random")
        return generate(spec)
    measure = {"mixed": "mixed", "heavy": "heavy"}.get(corpus, "random")
    if corpus not in CORPORA:
        raise ValueError(f"unknown corpus {corpus!r}; expected one of {CORPORA}")
    inst = generate(GeneratorSpec("singleton-complete", n=rng.randint(1, 8), seed=seed, measure=measure))
    if corpus == "masked-atom":
        inst = mask_atom(inst, rng.randrange(inst.n))
    return inst


def _lemma_thresholds(ev: AreaFormula):
    finite = [v for v in ev.F.values() if v != INF]
    pos = [v for v in ev.F.values() if v > 0]
    minor_t = (max(finite) if finite else 0) * 2 + 1
    major_t = min(pos) / 2 if pos and min(pos) != INF else (1 if pos else 0)
    return minor_t, major_t


def _hunt_one(args):
    seed, variant, corpus, lemmas = args
    inst = corpus_instance(corpus, seed)
    ev = AreaFormula(inst, variant, seed=seed)
    rng = random.Random(seed)
    Bs = [ev.A] + [frozenset(x for x in ev.A if rng.random() < 0.5) for _ in range(3)]
    bad_B = None
    for B in Bs:
        rep = ev.check(B)
        if not rep.formula_equal:
            bad_B = sorted(B)
            break
    out = {
        "seed": seed,
        "verified": ev.hypotheses.all_verified,
        "holds": bad_B is None,
        "bad_B": bad_B,
    }
    if lemmas:
        tm, tM = _lemma_thresholds(ev)
        out["minor"] = verify_lemma_minor(inst, ev.A, tm, family=ev.analysis.family, seed=seed).verdict
        out["major"] = verify_lemma_major(inst, ev.A, tM, family=ev.analysis.family).verdict
    return out


@dataclass
class HuntSummary:
    variant: str
    corpus: str
    seed: int
    instances: int
    table: Counter
    lemmas: dict
    counterexamples: list

    def rows(self):
        return [
            {"hypotheses_verified": v, "formula_holds": h, "count": n}
            for (v, h), n in sorted(self.table.items())
        ]


def shrink(instance: MetricInstance, predicate: Callable[[MetricInstance], bool]) -> MetricInstance:
    """Greedily drop points, then family members, while the predicate persists."""
    cur = instance
    changed = True
    while changed:
        changed = False
        for x in range(cur.n):
            if cur.n <= 1:
                break
            cand = cur.restrict([i for i in range(cur.n) if i != x])
            if predicate(cand):
                cur, changed = cand, True
                break
        if changed or isinstance(cur.family, str):
            continue
        for S in cur.family:
            fam = tuple(T for T in cur.family if T != S)
            gauge = cur.gauge
            if gauge.kind == "explicit":
                gauge = type(gauge)("explicit", table={T: v for T, v in gauge.table.items() if T != S})
            cand = cur.with_(family=fam, gauge=gauge)
            if predicate(cand):
                cur, changed = cand, True
                break
    return cur


def hunt(seed: int, n_instances: int, variant: str = "general-I", corpus: str = "singleton-complete", *,
         workers: int = 1, lemmas: bool = True, shrink_counterexamples: bool = True) -> HuntSummary:
    """Tabulate hypothesis status against formula outcome over a seeded corpus."""
    jobs = [(seed + i, variant, corpus, lemmas) for i in range(n_instances)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_hunt_one, jobs, chunksize=8))
    else:
        results = [_hunt_one(j) for j in jobs]
    table = Counter((r["verified"], r["holds"]) for r in results)
    lem = {}
    if lemmas:
        lem = {"minor": Counter(r["minor"] for r in results), "major": Counter(r["major"] for r in results)}
    found = []
    for r in results:
        if r["verified"] and not r["holds"]:
            inst = corpus_instance(corpus, r["seed"])
            if shrink_counterexamples:
                def still_bad(c, variant=variant):
                    ev = AreaFormula(c, variant)
                    return ev.hypotheses.all_verified and not ev.check().formula_equal
                if still_bad(inst):
                    inst = shrink(inst, still_bad)
            found.append({"seed": r["seed"], "instance": inst, "B": r["bad_B"]})
    return HuntSummary(variant, corpus, seed, n_instances, table, lem, found)


"""Filtered families, covering limits, Federer densities and enlargements.

Two semantics for "arbitrarily small diameter" are supported:

* exact (``resolution=None``): a relation is fine at x iff it holds a set
  of diameter 0 containing x, and covering limits are read off the
  diameter-0 class;
* resolution ``h`` (epsilon-nets of a continuum set): members of diameter
  below ``h`` are sub-resolution and ignored, the relation is fine at x iff
  a remaining member containing x has diameter at most ``GRID_SLACK * h``,
  and limits are read off the finest remaining diameter class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .core import GaugedFamily, NotFineError, PointSet, to_mask
from .extreal import INF, ExtReal, mul

BOTH_ZERO = "both-zero"
BOTH_INFINITE = "both-infinite"

GRID_SLACK = 4

EXACT_SEMANTICS = "exact"


def semantics_label(resolution) -> str:
    return EXACT_SEMANTICS if resolution is None else f"resolution(h={float(resolution):.17g})"


@dataclass(frozen=True, eq=False)
class FilteredFamily:
    """Partition of a gauged family into kept members and dropped ones.

    A member is dropped when its gauge and measure are both 0 or both +inf;
    on the kept members the quotient mu/zeta is unambiguous.
    """

    family: GaugedFamily
    mu: tuple[ExtReal, ...]
    kept: tuple[int, ...]
    dropped: dict[int, str] = field(default_factory=dict)

    @property
    def space(self):
        return self.family.space

    def is_kept(self, k: int) -> bool:
        return k not in self.dropped

    def kept_containing(self, x: int) -> list[int]:
        return [k for k in self.family.containing(x) if k not in self.dropped]

    def kept_family(self) -> GaugedFamily:
        f = self.family
        return GaugedFamily(
            f.space,
            tuple(f.sets[k] for k in self.kept),
            tuple(f.values[k] for k in self.kept),
            tuple(f.diams[k] for k in self.kept),
        )


def filter_family(measure, family: GaugedFamily) -> FilteredFamily:
    mu = tuple(measure(S) for S in family.sets)
    kept, dropped = [], {}
    for k, (m, z) in enumerate(zip(mu, family.values)):
        if m == 0 and z == 0:
            dropped[k] = BOTH_ZERO
        elif m == INF and z == INF:
            dropped[k] = BOTH_INFINITE
        else:
            kept.append(k)
    return FilteredFamily(family, mu, tuple(kept), dropped)


def quotient_value(mu: ExtReal, zeta: ExtReal) -> ExtReal:
    """mu/zeta with +inf when zeta = 0 and 0 when zeta = +inf.

    Both-zero and both-infinite pairs are excluded by the filtering and
    raise ValueError here.
    """
    if (mu == 0 and zeta == 0) or (mu == INF and zeta == INF):
        raise ValueError("set is not in the filtered family")
    return extended_quotient(mu, zeta)


def extended_quotient(mu: ExtReal, zeta: ExtReal) -> ExtReal:
    """The same three branches applied to every set, unfiltered."""
    if zeta == 0:
        return INF
    if zeta == INF:
        return 0 if mu == INF else mu * 0
    return mu / zeta


def quotient(filtered: FilteredFamily, k: int) -> ExtReal:
    if not filtered.is_kept(k):
        raise ValueError(
            f"family member {k} was filtered out ({filtered.dropped[k]})"
        )
    return quotient_value(filtered.mu[k], filtered.family.values[k])


# -- covering limits --------------------------------------------------------


@dataclass(frozen=True)
class DensityProfile:
    """Step function of a covering limit as the diameter bound shrinks.

    ``scales`` are the distinct member diameters in descending order.  The
    value at scale D is the sup (or inf) of f over members containing x
    with diameter < eps for every eps just above D, i.e. over members of
    diameter <= D.  ``limit`` is the value at the finest scale when the
    relation is fine there, else None.
    """

    scales: tuple[ExtReal, ...]
    values: tuple[ExtReal, ...]
    limit: ExtReal | None
    fine: bool
    semantics: str = EXACT_SEMANTICS
    mode: str = "sup"

    def value_at(self, eps) -> ExtReal | None:
        """Value of the bracket for the strict bound diam < eps."""
        out = None
        for s, v in zip(self.scales, self.values):
            if s < eps:
                out = v
                break
        return out

    @property
    def finest(self) -> tuple[ExtReal, ExtReal] | None:
        if not self.scales:
            return None
        return self.scales[-1], self.values[-1]


def covering_profile(
    entries: Iterable[tuple[ExtReal, ExtReal]],
    *,
    mode: str = "sup",
    resolution=None,
) -> DensityProfile:
    """Profile of (diameter, value) pairs for the members of C({x})."""
    pick = max if mode == "sup" else min
    floor = resolution
    by_diam: dict = {}
    for d, v in entries:
        if floor is not None and d < floor:
            continue
        by_diam[d] = v if d not in by_diam else pick(by_diam[d], v)
    scales = sorted(by_diam)
    values, acc = [], None
    for d in scales:
        acc = by_diam[d] if acc is None else pick(acc, by_diam[d])
        values.append(acc)
    scales.reverse()
    values.reverse()
    if floor is None:
        fine = bool(scales) and scales[-1] == 0
    else:
        fine = bool(scales) and scales[-1] <= GRID_SLACK * floor
    limit = values[-1] if fine else None
    return DensityProfile(tuple(scales), tuple(values), limit, fine, semantics_label(resolution), mode)


def is_fine(sets: Sequence[PointSet], diams: Sequence[ExtReal], x: int, resolution=None) -> bool:
    return covering_profile(
        ((d, 0) for S, d in zip(sets, diams) if x in S), resolution=resolution
    ).fine


def covers_finely(sets: Sequence[PointSet], diams: Sequence[ExtReal], A: Iterable[int], resolution=None) -> bool:
    return all(is_fine(sets, diams, a, resolution) for a in A)


def _limit(sets, diams, x, f, mode, resolution):
    prof = covering_profile(
        ((d, f(k)) for k, (S, d) in enumerate(zip(sets, diams)) if x in S),
        mode=mode,
        resolution=resolution,
    )
    if not prof.fine:
        raise NotFineError(f"covering relation is not fine at point {x}")
    return prof.limit


def covering_limsup(sets, diams, x: int, f: Callable[[int], ExtReal], resolution=None) -> ExtReal:
    """inf over eps of sup{f(S): x in S, diam S < eps}; f takes a member index."""
    return _limit(sets, diams, x, f, "sup", resolution)


def covering_liminf(sets, diams, x: int, f: Callable[[int], ExtReal], resolution=None) -> ExtReal:
    return _limit(sets, diams, x, f, "inf", resolution)


# -- Federer density --------------------------------------------------------


def density_profile(filtered: FilteredFamily, x: int, resolution=None) -> DensityProfile:
    fam = filtered.family
    return covering_profile(
        ((fam.diams[k], quotient(filtered, k)) for k in filtered.kept_containing(x)),
        resolution=resolution,
    )


def federer_density(filtered: FilteredFamily, x: int, resolution=None) -> ExtReal:
    """Upper density of mu with respect to the gauge at x.

    Raises NotFineError when the filtered relation is not fine at x.
    """
    prof = density_profile(filtered, x, resolution)
    if not prof.fine:
        raise NotFineError(
            f"filtered family is not fine at {filtered.space.ids[x]!r} ({prof.semantics})"
        )
    return prof.limit


def unfiltered_density(measure, family: GaugedFamily, x: int) -> ExtReal:
    """Covering limsup of the extended quotient over every member containing x.

    With a diameter-power gauge and {x} in the family this is always +inf,
    which is why the density is taken over the filtered family instead.
    """
    if family.index_of([x]) is None:
        raise ValueError("family must contain the singleton of the point")
    return covering_limsup(
        family.sets,
        family.diams,
        x,
        lambda k: extended_quotient(measure(family.sets[k]), family.values[k]),
    )


# -- enlargements and the (c, eta) condition --------------------------------


def enlargement(S: Iterable[int], filtered: FilteredFamily, tau) -> PointSet:
    """Union of kept members T meeting S with diam(T) <= tau * diam(S)."""
    if not tau > 1:
        raise ValueError("tau must exceed 1")
    S = frozenset(S)
    fam = filtered.family
    bound = mul(tau, fam.space.diameter(S))
    mask = to_mask(S)
    out = 0
    for k in filtered.kept:
        if fam.masks[k] & mask and fam.diams[k] <= bound:
            out |= fam.masks[k]
    return frozenset(i for i in range(fam.space.n) if out >> i & 1)


def _ratio(top: ExtReal, bottom: ExtReal) -> ExtReal:
    """Least factor f with top <= f * bottom (0 when any factor works)."""
    if bottom == INF or top == 0:
        return top * 0 if top != INF else 0
    if bottom == 0:
        return INF
    return top / bottom


@dataclass(frozen=True)
class CEtaEntry:
    member: int
    hat: PointSet
    tilde: int | None
    c_needed: ExtReal | None = None
    eta_needed: ExtReal | None = None

    @property
    def ok(self) -> bool:
        return self.tilde is not None


@dataclass(frozen=True)
class CEtaReport:
    c: ExtReal | None
    eta: ExtReal | None
    feasible: bool
    entries: tuple[CEtaEntry, ...]

    @property
    def failures(self) -> list[CEtaEntry]:
        return [e for e in self.entries if not e.ok]


def _candidates(filtered: FilteredFamily, k: int, tau):
    """(hat, [(index, c_needed, eta_needed)]) for kept member k."""
    fam = filtered.family
    S = fam.sets[k]
    hat = enlargement(S, filtered, tau)
    hmask = to_mask(hat)
    dS, zS = fam.diams[k], fam.values[k]
    out = []
    for j, m in enumerate(fam.masks):
        if hmask & ~m:
            continue
        c_req = _ratio(fam.diams[j], dS)
        if c_req != INF:
            c_req = max(c_req, 1)
        out.append((j, c_req, _ratio(fam.values[j], zS)))
    return hat, out


def check_c_eta(filtered: FilteredFamily, tau, c, eta) -> CEtaReport:
    """Verify that each kept S has a member S~ containing its enlargement with
    diam(S~) <= c diam(S) and zeta(S~) <= eta zeta(S)."""
    if not c >= 1 or not eta > 0:
        raise ValueError("need c >= 1 and eta > 0")
    fam = filtered.family
    entries = []
    for k in filtered.kept:
        hat, cands = _candidates(filtered, k, tau)
        hit = None
        for j, _, _ in cands:
            if fam.diams[j] <= mul(c, fam.diams[k]) and fam.values[j] <= mul(eta, fam.values[k]):
                hit = j
                break
        entries.append(CEtaEntry(k, hat, hit))
    return CEtaReport(c, eta, all(e.ok for e in entries), tuple(entries))


def search_c_eta(filtered: FilteredFamily, tau) -> CEtaReport:
    """Lexicographically least (c, eta) making the condition hold, or infeasible.

    When every kept member is matched by a candidate needing no gauge
    slack, any eta > 0 works and eta = 1 is reported.
    """
    per_member = []
    for k in filtered.kept:
        hat, cands = _candidates(filtered, k, tau)
        per_member.append((k, hat, [t for t in cands if t[1] != INF and t[2] != INF]))
    bad = [CEtaEntry(k, hat, None) for k, hat, cands in per_member if not cands]
    if bad:
        return CEtaReport(None, None, False, tuple(bad))
    one = filtered.space.zero + 1
    c = max((min(t[1] for t in cands) for _, _, cands in per_member), default=one)
    entries, eta = [], None
    for k, hat, cands in per_member:
        j, cj, ej = min((t for t in cands if t[1] <= c), key=lambda t: (t[2], t[1]))
        entries.append(CEtaEntry(k, hat, j, cj, ej))
        eta = ej if eta is None else max(eta, ej)
    if eta is None or eta == 0:
        eta = one
    return CEtaReport(c, eta, True, tuple(entries))


def spherical_s_tilde(filtered: FilteredFamily, k: int, tau) -> PointSet:
    """Closed ball about a center of ball member k with radius (1 + tau) diam.

    Any point of the ball serves as center; the smallest index is used.
    """
    fam = filtered.family
    space = fam.space
    centers = space.ball_centers(fam.sets[k])
    if not centers:
        raise ValueError("member is not a ball")
    return space.closed_ball(centers[0], mul(1 + tau, fam.diams[k]))

"""Command-line front end.

Exit status: 0 when the check passes (formula equal, lemma verified, ...),
1 when it reports a violation or failed hypotheses, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io as _io
import json
import sys
from collections import Counter
from fractions import Fraction

from .caratheodory import delta_probes, phi, psi
from .core import MetricInstance, NotFineError, OutsideDomainError, ResolutionTooCoarseError
from .density import density_profile, enlargement, federer_density, filter_family
from .extreal import INF, encode
from .io import InstanceFormatError, dumps_instance, instance_from_dict
from .spaces import (
    GENERATOR_KINDS,
    GeneratorSpec,
    ball_diameter_probe,
    diametric_regularity_probe,
    generate,
    rebuild_override_gauge,
    spherical_density_comparison,
)
from .theorems import (
    CORPORA,
    EQUAL,
    VARIANTS,
    VERIFIED,
    AreaFormula,
    check_absolute_continuity,
    hunt,
    semicontinuity_probe,
    verify_lemma_major,
    verify_lemma_minor,
)


class UsageError(Exception):
    pass


def jsonable(obj):
    if isinstance(obj, (Fraction, float)) or obj == INF:
        return encode(obj) if not isinstance(obj, bool) else obj
    if isinstance(obj, int) or obj is None or isinstance(obj, str):
        return obj
    if dataclasses.is_dataclass(obj):
        out = {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        for name in ("all_verified", "verdict", "agree", "forward_holds", "verified", "contradiction"):
            if hasattr(type(obj), name) and isinstance(getattr(type(obj), name), property):
                out[name] = jsonable(getattr(obj, name))
        return out
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    return str(obj)


def _num(text):
    return Fraction(text) if "." not in text and "e" not in text.lower() else float(text)


def _load(args) -> MetricInstance:
    try:
        if args.instance == "-":
            doc = json.load(sys.stdin)
        else:
            with open(args.instance) as fh:
                doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.instance}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.instance}: invalid JSON ({exc})") from None
    if getattr(args, "backend", None):
        doc["backend"] = args.backend
    inst = instance_from_dict(doc)
    alpha = getattr(args, "alpha", None)
    if alpha is not None and inst.meta.get("gauge_override"):
        inst = rebuild_override_gauge(inst, float(alpha))
    return inst


def _points(inst, text, default_all=True):
    if text is None:
        if default_all:
            return frozenset(range(inst.n))
        raise UsageError("a point set is required (--set)")
    names = [t for t in (s.strip() for s in text.split(",")) if t]
    try:
        return inst.space.indices(names)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"unknown point in --set: {exc}") from None


def _point(inst, name):
    if name is None:
        raise UsageError("--point is required")
    try:
        return inst.space.index(name)
    except (KeyError, ValueError):
        raise UsageError(f"unknown point {name!r}") from None


def _emit(args, payload):
    sys.stdout.write(json.dumps(jsonable(payload), indent=2) + "\n")


def _emit_profile(args, prof):
    if args.out == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scale", "value"])
        for s, v in zip(prof.scales, prof.values):
            w.writerow([_fmt(s), _fmt(v)])
        sys.stdout.write(buf.getvalue())
    else:
        _emit(args, prof)


@dataclasses.dataclass
class _Steps:
    scales: list
    values: list


def _fmt(v):
    return "inf" if v == INF else format(float(v), ".17g")


# -- commands --------------------------------------------------------------------


def cmd_measure(args) -> int:
    inst = _load(args)
    A = _points(inst, args.set)
    fam = inst.gauged
    if args.profile:
        probes = sorted(delta_probes(fam), reverse=True)
        values = [phi(fam, d, A, method=args.method).value for d in probes]
        _emit_profile(args, _Steps(probes, values))
        return 0
    if args.delta is not None:
        sol = phi(fam, _num(args.delta), A, method=args.method)
        _emit(args, {"delta": _num(args.delta), "value": sol.value, "cover": [inst.space.names(fam.sets[k]) for k in sol.cover],
                     "certificate": sol.certificate})
    else:
        _emit(args, {"psi": psi(fam, A)})
    return 0


def cmd_density(args) -> int:
    inst = _load(args)
    x = _point(inst, args.point)
    filt = filter_family(inst.measure, inst.gauged)
    if args.profile:
        _emit_profile(args, density_profile(filt, x, inst.resolution))
        return 0
    _emit(args, {"point": args.point, "density": federer_density(filt, x, inst.resolution)})
    return 0


def cmd_enlarge(args) -> int:
    inst = _load(args)
    S = _points(inst, args.set, default_all=False)
    tau = _num(args.tau) if args.tau else inst.tau
    filt = filter_family(inst.measure, inst.gauged)
    _emit(args, {"set": inst.space.names(S), "tau": tau, "enlargement": inst.space.names(enlargement(S, filt, tau))})
    return 0


def cmd_area_check(args) -> int:
    inst = _load(args)
    A = _points(inst, args.domain)
    B = _points(inst, args.set) if args.set else A
    ev = AreaFormula(inst, args.variant, A, seed=args.seed, tolerance=args.tolerance)
    rep = ev.check(B)
    _emit(args, rep)
    return 0 if rep.verdict == EQUAL else 1


def cmd_lemmas(args) -> int:
    inst = _load(args)
    A = _points(inst, args.set)
    t = _num(args.t)
    if args.lemma == "minor":
        rep = verify_lemma_minor(inst, A, t, seed=args.seed)
    else:
        rep = verify_lemma_major(inst, A, t)
    _emit(args, rep)
    return 0 if rep.verdict in (VERIFIED, "vacuous") else 1


def cmd_abscont(args) -> int:
    inst = _load(args)
    rep = check_absolute_continuity(inst, _points(inst, args.set), seed=args.seed)
    _emit(args, rep)
    return 0 if rep.verdict == VERIFIED else 1


def cmd_probe(args) -> int:
    inst = _load(args)
    if args.kind == "semicontinuity":
        if args.delta is None or args.t is None:
            raise UsageError("semicontinuity probe needs --delta and --t")
        rep = semicontinuity_probe(inst, _points(inst, args.set), _num(args.delta), _num(args.t),
                                   alpha=_num(args.alpha) if args.alpha else None)
        _emit(args, rep)
        return 0 if rep.verified else 1
    x = _point(inst, args.point)
    if args.kind == "regularity":
        rep = diametric_regularity_probe(inst, x)
        _emit(args, rep)
        return 0 if rep.consistent else 1
    if args.kind == "ball-diameter":
        rep = ball_diameter_probe(inst, x)
        _emit(args, rep)
        return 1 if rep.contradiction else 0
    reps = spherical_density_comparison(inst, alpha=_num(args.alpha) if args.alpha else None, points=[x])
    _emit(args, reps)
    return 0 if all(r.gap <= args.tolerance for r in reps) else 1


def cmd_gen(args) -> int:
    region = tuple(tuple(_num(v) for v in part.split(":")) for part in args.region.split(",")) if args.region else ((0, 1),)
    spec = GeneratorSpec(
        args.kind, depth=args.depth, n=args.n, seed=args.seed, region=region, h=_num(args.h),
        alpha=_num(args.alpha) if args.alpha else None, family=args.family, measure=args.measure,
        backend=args.backend,
    )
    sys.stdout.write(dumps_instance(generate(spec)))
    return 0


def cmd_hunt(args) -> int:
    summary = hunt(args.seed, args.count, args.variant, args.corpus, workers=args.workers)
    payload = {
        "variant": summary.variant,
        "corpus": summary.corpus,
        "seed": summary.seed,
        "instances": summary.instances,
        "table": summary.rows(),
        "lemmas": {k: dict(Counter(v)) for k, v in summary.lemmas.items()},
        "counterexamples": [
            {"seed": c["seed"], "B": c["B"], "instance": json.loads(dumps_instance(c["instance"]))}
            for c in summary.counterexamples
        ],
    }
    _emit(args, payload)
    return 1 if summary.counterexamples else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="areaformula", description="Measures, densities and area-formula checks on finite metric spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_instance(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("instance", help="instance JSON file, or - for stdin")
        sp.add_argument("--backend", choices=("rational", "float"))
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", choices=("json", "csv"), default="json")
        sp.add_argument("--tolerance", type=float, default=1e-9)
        sp.add_argument("--alpha")
        return sp

    sp = with_instance("measure", "phi_delta or psi of a point set")
    sp.add_argument("--set")
    sp.add_argument("--delta")
    sp.add_argument("--method", choices=("exact", "greedy"), default="exact")
    sp.add_argument("--profile", action="store_true", help="print phi at every delta probe")
    sp.set_defaults(func=cmd_measure)

    sp = with_instance("density", "Federer density at a point")
    sp.add_argument("--point")
    sp.add_argument("--profile", action="store_true", help="print the density step function")
    sp.set_defaults(func=cmd_density)

    sp = with_instance("enlarge", "enlargement of a point set")
    sp.add_argument("--set")
    sp.add_argument("--tau")
    sp.set_defaults(func=cmd_enlarge)

    sp = with_instance("area-check", "compare mu(B) with the integral of the density")
    sp.add_argument("--variant", choices=tuple(VARIANTS), default="general-I")
    sp.add_argument("--set", help="B (default: A)")
    sp.add_argument("--domain", help="A (default: every point)")
    sp.set_defaults(func=cmd_area_check)

    sp = with_instance("lemmas", "check a density lemma at threshold t")
    sp.add_argument("--lemma", choices=("minor", "major"), default="minor",
                    help="minor: F < t gives mu <= t psi; major: F > t gives t psi <= mu")
    sp.add_argument("--set")
    sp.add_argument("--t", required=True)
    sp.set_defaults(func=cmd_lemmas)

    sp = with_instance("abscont", "absolute continuity versus the infinite-density set")
    sp.add_argument("--set")
    sp.set_defaults(func=cmd_abscont)

    sp = with_instance("probe", "resolution-floor probes")
    sp.add_argument("--kind", choices=("regularity", "ball-diameter", "spherical", "semicontinuity"), default="regularity")
    sp.add_argument("--point")
    sp.add_argument("--set")
    sp.add_argument("--delta")
    sp.add_argument("--t")
    sp.set_defaults(func=cmd_probe)

    sp = sub.add_parser("gen", help="generate an instance")
    sp.add_argument("kind", choices=GENERATOR_KINDS)
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--region", help="lo:hi per axis, comma separated (default 0:1)")
    sp.add_argument("--h", default="1/4")
    sp.add_argument("--alpha")
    sp.add_argument("--family")
    sp.add_argument("--measure", default="uniform")
    sp.add_argument("--backend", choices=("rational", "float"))
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("hunt", help="search a seeded corpus for counterexamples")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--variant", choices=tuple(VARIANTS), default="general-I")
    sp.add_argument("--corpus", choices=CORPORA, default="singleton-complete")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_hunt)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InstanceFormatError, OutsideDomainError, NotFineError,
            ResolutionTooCoarseError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

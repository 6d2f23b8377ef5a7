"""JSON instance files.

Numbers may be written as JSON numbers, as "p/q" strings (exact under the
rational backend) or as "inf".  Point sets are lists of point ids.

    {
      "backend": "rational",
      "points": ["a", "b"],                      # or [{"id": "a", "coords": [0]}, ...]
      "metric": {"matrix": [[0, 1], [1, 0]]},    # or "euclidean"
      "family": [{"members": ["a"], "zeta": 2}], # or {"generate": "closed-balls"}
      "gauge": {"type": "explicit"},             # or {"type": "hausdorff", "alpha": 1, "c_alpha": 1}
      "measure": {"type": "atomic", "mass": {"a": 1, "b": 2}},
                                                 # or {"type": "table", "table": [{"members": [...], "value": ...}]}
      "tau": 2,
      "resolution": null,
      "meta": {}
    }
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .core import AtomicMeasure, Gauge, MetricInstance, MetricSpace
from .extreal import FLOAT, RATIONAL, coerce, coerce_real, encode


class InstanceFormatError(ValueError):
    """The instance file is malformed."""


def _num(x, backend):
    try:
        return coerce(x, backend)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError(f"bad number {x!r}: {exc}") from None


def _param(x):
    """Gauge exponents and constants keep their own exactness."""
    if isinstance(x, float):
        return x
    if isinstance(x, str) and "." in x:
        return float(x)
    return Fraction(x)


def _encode_param(x):
    return x if isinstance(x, float) else encode(Fraction(x))


def instance_from_dict(doc: dict) -> MetricInstance:
    try:
        return _from_dict(doc)
    except KeyError as exc:
        raise InstanceFormatError(f"missing key {exc}") from None


def _from_dict(doc):
    backend = doc.get("backend", RATIONAL)
    if backend not in (RATIONAL, FLOAT):
        raise InstanceFormatError(f"unknown backend {backend!r}")
    pts = doc["points"]
    ids = [p["id"] if isinstance(p, dict) else p for p in pts]
    metric = doc.get("metric", "euclidean")
    try:
        if metric == "euclidean":
            coords = [p["coords"] for p in pts]
            space = MetricSpace(ids, coords=coords, backend=backend)
        else:
            space = MetricSpace(ids, matrix=metric["matrix"], backend=backend)
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"bad metric: {exc}") from None

    def pset(members):
        try:
            return space.indices(members)
        except (KeyError, ValueError) as exc:
            raise InstanceFormatError(f"unknown point in {members!r}: {exc}") from None

    gdoc = doc.get("gauge", {"type": "explicit"})
    fam_doc = doc["family"]
    table = {}
    if isinstance(fam_doc, dict):
        family = fam_doc["generate"]
    else:
        family = []
        for entry in fam_doc:
            members = entry["members"] if isinstance(entry, dict) else entry
            S = pset(members)
            family.append(S)
            if isinstance(entry, dict) and "zeta" in entry:
                table[S] = _num(entry["zeta"], backend)
        family = tuple(family)
    try:
        if gdoc["type"] == "explicit":
            gauge = Gauge("explicit", table=table)
        else:
            gauge = Gauge(gdoc["type"], _param(gdoc["alpha"]), _param(gdoc.get("c_alpha", 1)))
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"bad gauge: {exc}") from None

    mdoc = doc["measure"]
    if mdoc.get("type", "atomic") == "table":
        tab = {pset(e["members"]): _num(e["value"], backend) for e in mdoc["table"]}
        try:
            measure = AtomicMeasure.from_table(space.n, {tuple(k): v for k, v in tab.items()}, backend)
        except ValueError as exc:
            raise InstanceFormatError(f"bad measure table: {exc}") from None
    else:
        masses = mdoc["mass"]
        if isinstance(masses, dict):
            masses = [masses.get(pid, 0) for pid in space.ids]
        measure = AtomicMeasure.atomic([_num(m, backend) for m in masses], backend)
    res = doc.get("resolution")
    try:
        return MetricInstance(
            space, family, gauge, measure,
            tau=coerce_real(doc.get("tau", 2), backend),
            resolution=None if res is None else coerce_real(res, backend),
            meta=dict(doc.get("meta", {})),
        )
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None


def instance_to_dict(inst: MetricInstance) -> dict:
    space = inst.space
    names = lambda S: [space.ids[i] for i in sorted(S)]  # noqa: E731
    if space.has_matrix:
        points = list(space.ids)
        metric = {"matrix": [[encode(v) for v in row] for row in space.matrix.tolist()]}
    else:
        points = [{"id": pid, "coords": [_coord(v) for v in row]} for pid, row in zip(space.ids, space.coords.tolist())]
        metric = "euclidean"
    if isinstance(inst.family, str):
        family = {"generate": inst.family}
    elif inst.gauge.kind == "explicit":
        family = [{"members": names(S), "zeta": encode(inst.gauge.table[S])} for S in inst.family]
    else:
        family = [{"members": names(S)} for S in inst.family]
    if inst.gauge.kind == "explicit":
        gauge = {"type": "explicit"}
    else:
        gauge = {"type": inst.gauge.kind, "alpha": _encode_param(inst.gauge.alpha),
                 "c_alpha": _encode_param(inst.gauge.c_alpha)}
    m = inst.measure
    if m.table is not None:
        measure = {"type": "table", "table": [{"members": names(S), "value": encode(v)} for S, v in m.table.items()]}
    else:
        measure = {"type": "atomic", "mass": {pid: encode(v) for pid, v in zip(space.ids, m.mass)}}
    return {
        "backend": inst.backend,
        "points": points,
        "metric": metric,
        "family": family,
        "gauge": gauge,
        "measure": measure,
        "tau": encode(inst.tau),
        "resolution": None if inst.resolution is None else encode(inst.resolution),
        "meta": inst.meta,
    }


def _coord(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return float(v)


def load_instance(path) -> MetricInstance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: invalid JSON ({exc})") from None
    return instance_from_dict(doc)


def dumps_instance(inst: MetricInstance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def save_instance(inst: MetricInstance, path) -> None:
    Path(path).write_text(dumps_instance(inst))

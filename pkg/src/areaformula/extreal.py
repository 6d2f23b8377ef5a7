"""Values in the extended half-line [0, +inf].

Values are plain Python numbers: ``Fraction`` under the rational backend,
``float`` under the float backend, and ``math.inf`` for +inf in both.
Comparisons between the two work natively; the helpers here pin down the
conventions that plain arithmetic gets wrong (``0 * inf``) and keep every
value inside the declared backend.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction
from typing import Iterable, Union

INF = math.inf

ExtReal = Union[Fraction, float]

RATIONAL = "rational"
FLOAT = "float"
BACKENDS = (RATIONAL, FLOAT)


class InexactPowerError(ValueError):
    """A power has no exact rational value; use the float backend."""


def check_backend(backend: str) -> str:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    return backend


def zero(backend: str) -> ExtReal:
    return Fraction(0) if backend == RATIONAL else 0.0


def is_inf(x) -> bool:
    return x == INF


def coerce(x, backend: str = RATIONAL) -> ExtReal:
    """Convert ``x`` into a value of ``backend``.

    Accepts ints, Fractions, floats, numpy scalars and strings such as
    ``"3"``, ``"2/7"``, ``"0.25"`` and ``"inf"``.  Floats entering the
    rational backend are read through their shortest repr, so ``0.1``
    becomes ``1/10`` rather than its binary expansion.
    """
    if isinstance(x, str):
        token = x.strip().lower()
        if token in ("inf", "+inf", "infinity", "+infinity"):
            return INF
        value = Fraction(token)
    elif isinstance(x, bool):
        raise TypeError("booleans are not extended reals")
    elif isinstance(x, numbers.Rational):
        value = Fraction(x)
    elif isinstance(x, numbers.Real):
        x = float(x)
        if math.isnan(x):
            raise ValueError("NaN is not an extended real")
        if math.isinf(x):
            if x < 0:
                raise ValueError("-inf lies outside [0, +inf]")
            return INF
        if backend == FLOAT:
            if x < 0:
                raise ValueError(f"negative value {x} lies outside [0, +inf]")
            return x
        value = Fraction(repr(x))
    else:
        raise TypeError(f"cannot interpret {x!r} as an extended real")
    if value < 0:
        raise ValueError(f"negative value {value} lies outside [0, +inf]")
    return value if check_backend(backend) == RATIONAL else float(value)


def coerce_real(x, backend: str = RATIONAL) -> ExtReal:
    """Like :func:`coerce` but rejects +inf (for coordinates, radii, tau...)."""
    value = coerce(x, backend)
    if value == INF:
        raise ValueError("expected a finite value")
    return value


def mul(a: ExtReal, b: ExtReal) -> ExtReal:
    """Product with the measure-theoretic convention 0 * inf = 0."""
    if a == 0:
        return a
    if b == 0:
        return b
    return a * b


def total(values: Iterable[ExtReal], backend: str = RATIONAL) -> ExtReal:
    acc = zero(backend)
    for v in values:
        if v == INF:
            return INF
        acc += v
    return acc


def _iroot(n: int, k: int) -> int | None:
    """Exact integer k-th root of n >= 0, or None."""
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    return x if x**k == n else None


def power(base: ExtReal, alpha, backend: str = RATIONAL) -> ExtReal:
    """``base ** alpha`` for alpha > 0, exact under the rational backend.

    Raises InexactPowerError when the rational result does not exist.
    """
    if base == INF:
        return INF
    if base == 0:
        return zero(backend)
    if backend == FLOAT:
        return float(base) ** float(alpha)
    if not isinstance(alpha, (int, Fraction)):
        raise InexactPowerError(f"exponent {alpha!r} is not rational")
    alpha = Fraction(alpha)
    base = Fraction(base)
    p, q = alpha.numerator, alpha.denominator
    raised = base**p
    if q == 1:
        return raised
    num = _iroot(raised.numerator, q)
    den = _iroot(raised.denominator, q)
    if num is None or den is None:
        raise InexactPowerError(f"{base}**{alpha} is irrational")
    return Fraction(num, den)


def encode(x: ExtReal):
    """JSON-friendly form: "inf", an int, a "p/q" string, or a float."""
    if x == INF:
        return "inf"
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return x.numerator
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    return float(x)


def to_float(x: ExtReal) -> float:
    return INF if x == INF else float(x)


def rel_gap(a: ExtReal, b: ExtReal) -> float:
    """|a - b| / max(|a|, |b|), with 0 for equal values (including inf, inf)."""
    if a == b:
        return 0.0
    if a == INF or b == INF:
        return INF
    scale = max(abs(float(a)), abs(float(b)))
    return abs(float(a) - float(b)) / scale

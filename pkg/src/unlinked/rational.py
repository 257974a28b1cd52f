"""Exact rational helpers and piecewise-linear functions on Fractions.

A piecewise-linear (PL) function is stored as a tuple of ``(x, y)``
Fraction pairs with strictly increasing ``x``.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

Point = tuple[Fraction, Fraction]
PL = tuple[Point, ...]


def Q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to Fraction.

    Floats are rejected on purpose: silently rounding them would break the
    exactness every model computation relies on.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def fmt(x: Fraction) -> str:
    """Serialize as ``"p/q"`` (or ``"p"`` for integers)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def make_pl(points: Iterable[Sequence]) -> PL:
    return tuple((Q(x), Q(y)) for x, y in points)


def pl_eval(f: PL, x: Fraction) -> Fraction:
    if x < f[0][0] or x > f[-1][0]:
        raise ValueError(f"{x} outside [{f[0][0]}, {f[-1][0]}]")
    for (x0, y0), (x1, y1) in zip(f, f[1:]):
        if x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    return f[-1][1]


def piece_integral(x0, y0, x1, y1, a, b) -> Fraction:
    """Integral over [a, b] of the line through (x0, y0), (x1, y1)."""
    slope = (y1 - y0) / (x1 - x0)
    ya = y0 + slope * (a - x0)
    yb = y0 + slope * (b - x0)
    return (b - a) * (ya + yb) / 2


def pl_integral(f: PL, a: Fraction | None = None, b: Fraction | None = None) -> Fraction:
    """Exact integral of f over [a, b] (defaults: the whole domain)."""
    a = f[0][0] if a is None else a
    b = f[-1][0] if b is None else b
    if a > b:
        return -pl_integral(f, b, a)
    total = Fraction(0)
    for (x0, y0), (x1, y1) in zip(f, f[1:]):
        lo, hi = max(a, x0), min(b, x1)
        if lo < hi:
            total += piece_integral(x0, y0, x1, y1, lo, hi)
    return total


def pl_simplify(f: PL) -> PL:
    """Drop collinear interior breakpoints and duplicate abscissae."""
    pts: list[Point] = []
    for p in f:
        if pts and p[0] == pts[-1][0]:
            continue
        pts.append(p)
    out = [pts[0]]
    for i in range(1, len(pts) - 1):
        (x0, y0), (x1, y1), (x2, y2) = out[-1], pts[i], pts[i + 1]
        if (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0):
            continue
        out.append(pts[i])
    if len(pts) > 1:
        out.append(pts[-1])
    return tuple(out)


def pl_refine(f: PL, xs: Iterable[Fraction]) -> PL:
    """Insert extra breakpoints (inside the domain) without changing f."""
    keep = sorted({x for x, _ in f} | {x for x in xs if f[0][0] <= x <= f[-1][0]})
    return tuple((x, pl_eval(f, x)) for x in keep)


def pl_min_const(f: PL, c: Fraction) -> PL:
    """Pointwise min(f, c), exact, with crossing points inserted."""
    xs = []
    for (x0, y0), (x1, y1) in zip(f, f[1:]):
        if (y0 - c) * (y1 - c) < 0:
            xs.append(x0 + (c - y0) * (x1 - x0) / (y1 - y0))
    g = pl_refine(f, xs)
    return tuple((x, min(y, c)) for x, y in g)


def pl_combine(terms: Sequence[tuple[Fraction, PL]]) -> PL:
    """Linear combination sum(c_i * f_i) on a common domain."""
    xs = sorted({x for _, f in terms for x, _ in f})
    return tuple((x, sum((c * pl_eval(f, x) for c, f in terms), Fraction(0))) for x in xs)


def pl_level_crossings(f: PL, c: Fraction) -> list[Fraction]:
    """Points where f == c, including touches; raises on a flat segment at c."""
    hits = set()
    for (x0, y0), (x1, y1) in zip(f, f[1:]):
        if y0 == c and y1 == c:
            raise ValueError(f"flat segment at level {c} on [{x0}, {x1}]")
        if y0 == c:
            hits.add(x0)
        if y1 == c:
            hits.add(x1)
        if (y0 - c) * (y1 - c) < 0:
            hits.add(x0 + (c - y0) * (x1 - x0) / (y1 - y0))
    return sorted(hits)

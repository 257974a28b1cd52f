"""A single foliated annulus described by its rotation profile.

The rotation number on a level circle enclosing area ``a`` is
``rho(a) = f'(a)`` where the Hamiltonian restricted to the annulus reads
``H = f(enclosed area)``.  Profiles are piecewise linear in ``a`` with
rational data, so levels are piecewise quadratic and every fixed point is
the root of a linear equation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DegenerateProfile, Diagnostic, OutOfRange
from .rational import PL, Q, ceil, floor, make_pl, piece_integral


@dataclass(frozen=True)
class RhoProfile:
    """Piecewise-linear rotation number as a function of enclosed area.

    Area is always the absolute enclosed area, increasing outward.
    """

    breakpoints: PL

    @classmethod
    def of(cls, points: Iterable[Sequence]) -> "RhoProfile":
        return cls(make_pl(points))

    @property
    def area_lo(self) -> Fraction:
        return self.breakpoints[0][0]

    @property
    def area_hi(self) -> Fraction:
        return self.breakpoints[-1][0]

    def rho(self, a: Fraction) -> Fraction:
        bp = self.breakpoints
        if a < bp[0][0] or a > bp[-1][0]:
            raise OutOfRange(f"area {a} outside [{bp[0][0]}, {bp[-1][0]}]")
        for (x0, y0), (x1, y1) in zip(bp, bp[1:]):
            if a <= x1:
                return y0 + (y1 - y0) * (a - x0) / (x1 - x0)
        return bp[-1][1]

    def pieces(self):
        return zip(self.breakpoints, self.breakpoints[1:])


@dataclass(frozen=True)
class EdgeGeometry:
    area_lo: Fraction
    area_hi: Fraction
    level_at_lo: Fraction

    @classmethod
    def for_profile(cls, profile: RhoProfile, level_at_lo) -> "EdgeGeometry":
        return cls(profile.area_lo, profile.area_hi, Q(level_at_lo))


@dataclass(frozen=True)
class OrbitPoint:
    """A circle of fixed points of the time-one map inside an annulus."""

    edge_id: str | None
    area: Fraction
    k: int
    level: Fraction
    action: Fraction


def action_of(level, area, k) -> Fraction:
    """Action of a fixed point: ``level - area * k``."""
    return Q(level) - Q(area) * k


def _check_range(geom: EdgeGeometry, a: Fraction) -> None:
    if a < geom.area_lo or a > geom.area_hi:
        raise OutOfRange(f"area {a} outside [{geom.area_lo}, {geom.area_hi}]")


def level_at(geom: EdgeGeometry, profile: RhoProfile, a) -> Fraction:
    """Level of the circle enclosing area ``a``, by exact integration of rho."""
    a = Q(a)
    _check_range(geom, a)
    total = geom.level_at_lo
    for (x0, y0), (x1, y1) in profile.pieces():
        if x0 >= a:
            break
        lo, hi = max(geom.area_lo, x0), min(a, x1)
        if lo < hi:
            total += piece_integral(x0, y0, x1, y1, lo, hi)
    return total


def level_span(profile: RhoProfile) -> Fraction:
    """Integral of rho over the whole edge (outer level minus inner level)."""
    return sum((piece_integral(x0, y0, x1, y1, x0, x1) for (x0, y0), (x1, y1) in profile.pieces()),
               Fraction(0))


def rotation_roots(profile: RhoProfile) -> list[tuple[Fraction, int]]:
    """All ``(a, k)`` with ``rho(a) = k`` a nonzero integer, open interval only.

    Roots on a shared breakpoint are reported once; a tangential touch at a
    breakpoint gives a single root.
    """
    lo, hi = profile.area_lo, profile.area_hi
    roots: set[tuple[Fraction, int]] = set()
    for (x0, y0), (x1, y1) in profile.pieces():
        if y0 == y1:
            if y0.denominator == 1 and y0 != 0:
                raise DegenerateProfile(f"rho is constantly {y0} on [{x0}, {x1}]")
            continue
        for k in range(ceil(min(y0, y1)), floor(max(y0, y1)) + 1):
            if k == 0:
                continue
            a = x0 + (k - y0) * (x1 - x0) / (y1 - y0)
            if lo < a < hi:
                roots.add((a, k))
    return sorted(roots)


def fixed_points(geom: EdgeGeometry, profile: RhoProfile, edge_id: str | None = None) -> list[OrbitPoint]:
    """Orbit circles on the edge, sorted by area (endpoints excluded)."""
    out = []
    for a, k in rotation_roots(profile):
        lev = level_at(geom, profile, a)
        out.append(OrbitPoint(edge_id, a, k, lev, action_of(lev, a, k)))
    return out


def validate_profile(profile: RhoProfile) -> list[Diagnostic]:
    """Check the profile invariants, returning diagnostics (never raising)."""
    bp = profile.breakpoints
    diags: list[Diagnostic] = []
    if len(bp) < 2:
        return [Diagnostic("TooFewBreakpoints", "a profile needs at least two breakpoints", (len(bp),))]
    for i in range(len(bp) - 1):
        if bp[i + 1][0] <= bp[i][0]:
            diags.append(Diagnostic("NonIncreasingArea", "breakpoint areas must increase", (i, i + 1)))
    if diags:
        return diags
    for i in range(len(bp) - 1):
        y0, y1 = bp[i][1], bp[i + 1][1]
        if y0 == y1 and y0 != 0 and y0.denominator == 1:
            diags.append(Diagnostic("FlatIntegerSegment", f"rho is constantly {y0}", (i, i + 1)))
    signs = {(y > 0) - (y < 0) for _, y in bp if y != 0}
    if len(signs) > 1:
        idx = tuple(i for i, (_, y) in enumerate(bp) if y != 0)
        diags.append(Diagnostic("SignChangeInInterior", "rho changes sign inside the edge", idx))
    interior_zeros = tuple(i for i in range(1, len(bp) - 1) if bp[i][1] == 0)
    if interior_zeros:
        diags.append(Diagnostic("InteriorZero", "rho vanishes at an interior breakpoint", interior_zeros))
    if not signs:
        diags.append(Diagnostic("InteriorZero", "rho vanishes identically", tuple(range(len(bp)))))
    return diags


def direction(profile: RhoProfile) -> int:
    """Sign of rho on the open interior (0 if identically zero)."""
    for _, y in profile.breakpoints:
        if y != 0:
            return 1 if y > 0 else -1
    return 0

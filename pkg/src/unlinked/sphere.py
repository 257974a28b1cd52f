"""Height-function Hamiltonians ``H = h(z)`` on the unit-area sphere.

The height ``z`` runs from the south pole (0) to the north pole (1) and
doubles as the area of ``{z' <= z}``.  A fixed circle at height ``z`` with
``h'(z) = k`` capped by the disk through the north pole plus ``m`` copies
of the sphere class ``A`` has action ``h(z) + k (1 - z) - m``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ConstructionFailed, DegenerateProfile, HypothesisViolated, InvalidOrbit, OutOfRange
from .rational import PL, Q, ceil, floor, make_pl, pl_eval, pl_integral, pl_level_crossings, pl_simplify

F = Fraction

# Each extra copy of the sphere class in the capping lowers the index by this much.
CZ_SHIFT_PER_A = 2


@dataclass(frozen=True)
class HeightProfile:
    """``h' `` as a PL function on [0, 1] together with ``h(0)``."""

    dh: PL
    h0: Fraction

    @classmethod
    def of(cls, points: Iterable[Sequence], h0) -> "HeightProfile":
        dh = make_pl(points)
        if dh[0][0] != 0 or dh[-1][0] != 1:
            raise OutOfRange("a height profile spans exactly [0, 1]")
        if any(b[0] <= a[0] for a, b in zip(dh, dh[1:])):
            raise OutOfRange("breakpoints must be strictly increasing")
        return cls(dh, Q(h0))

    def h(self, z) -> Fraction:
        z = Q(z)
        if z < 0 or z > 1:
            raise OutOfRange(f"z = {z} outside [0, 1]")
        return self.h0 + pl_integral(self.dh, F(0), z)

    def slope(self, z) -> Fraction:
        return pl_eval(self.dh, Q(z))


def sphere_fixed_points(hp: HeightProfile) -> list[tuple[Fraction, int]]:
    """Poles (with ``k = 0``) and every interior circle with ``h'(z) = k != 0``."""
    out = {(F(0), 0), (F(1), 0)}
    dh = hp.dh
    for (x0, y0), (x1, y1) in zip(dh, dh[1:]):
        if y0 == y1:
            if y0.denominator == 1 and y0 != 0:
                raise DegenerateProfile(f"h' is constantly {y0} on [{x0}, {x1}]")
            continue
        for k in range(ceil(min(y0, y1)), floor(max(y0, y1)) + 1):
            if k == 0:
                continue
            z = x0 + (k - y0) * (x1 - x0) / (y1 - y0)
            if 0 < z < 1:
                out.add((z, k))
    return sorted(out)


def _is_fixed(hp: HeightProfile, z: Fraction, k: int) -> bool:
    if z in (0, 1):
        return k == 0
    return 0 < z < 1 and k != 0 and hp.slope(z) == k


def capped_action(hp: HeightProfile, z, k: int, m: int) -> Fraction:
    z = Q(z)
    if not _is_fixed(hp, z, k):
        raise InvalidOrbit(f"({z}, {k}) is not a fixed circle of the profile")
    return hp.h(z) + k * (1 - z) - m


def _local_trend(hp: HeightProfile, z: Fraction) -> int:
    """+1 if h' increases through z, -1 if it decreases, 0 at a flat or turning point."""
    eps = min(b[0] - a[0] for a, b in zip(hp.dh, hp.dh[1:])) / 1000
    lo, hi = max(F(0), z - eps), min(F(1), z + eps)
    left, right = hp.slope(lo), hp.slope(hi)
    here = hp.slope(z)
    if left < here < right:
        return 1
    if left > here > right:
        return -1
    return 0


def cz_index(hp: HeightProfile, z, k: int, m: int = 0) -> int:
    """Even index of the capped orbit after a small perturbation.

    Interior circles split into an index pair; the even member is reported:
    ``2k`` where ``h'`` increases and ``2k + 2`` where it decreases.  The
    south pole counts as a minimum unless ``h'(0) < 0``; the north pole is
    a maximum when ``h'(1) > 0``.
    """
    z = Q(z)
    if not _is_fixed(hp, z, k):
        raise InvalidOrbit(f"({z}, {k}) is not a fixed circle of the profile")
    if z == 0:
        base = 2 if hp.slope(0) < 0 else 0
    elif z == 1:
        base = 2 if hp.slope(1) > 0 else 0
    else:
        base = 2 * k if _local_trend(hp, z) >= 0 else 2 * k + 2
    return base - CZ_SHIFT_PER_A * m


@dataclass(frozen=True)
class CappedOrbit:
    z: Fraction
    k: int
    m: int
    action: Fraction
    cz_index: int


def capped_orbits(hp: HeightProfile, cappings: Iterable[int] = range(-2, 3)) -> list[CappedOrbit]:
    ms = list(cappings)
    return [CappedOrbit(z, k, m, capped_action(hp, z, k, m), cz_index(hp, z, k, m))
            for z, k in sphere_fixed_points(hp) for m in ms]


# --------------------------------------------------------------------------
# closed form for simple bumps

@dataclass(frozen=True)
class BumpData:
    delta: Fraction
    z_beta: Fraction
    z_alpha: Fraction
    candidates: dict = field(default_factory=dict)


def bump_data(hp: HeightProfile, warn: bool = True) -> BumpData:
    """Check the four structural hypotheses and the two action orderings."""
    dh = hp.dh
    if dh[0][1] != 0 or dh[1][1] != 0:
        raise HypothesisViolated("1", "h' must vanish on an initial interval [0, delta]")
    i = 1
    while i + 1 < len(dh) and dh[i + 1][1] == 0:
        i += 1
    delta = dh[i][0]
    if delta >= 1:
        raise HypothesisViolated("1", "h' vanishes identically")
    inner = [y for x, y in dh if delta < x < 1]
    if any(not (0 < y < 2) for y in inner) or not (0 <= dh[-1][1] < 2):
        raise HypothesisViolated("2", "need 0 < h' < 2 on (delta, 1)")
    try:
        ones = pl_level_crossings(dh, F(1))
    except ValueError as exc:
        raise HypothesisViolated("3", str(exc)) from None
    if len(ones) != 2:
        raise HypothesisViolated("3", f"h' = 1 at {len(ones)} points, expected exactly two")
    zb, za = ones
    if _local_trend(hp, zb) != 1 or _local_trend(hp, za) != -1:
        raise HypothesisViolated("3", "h' must cross 1 upward at z_beta and downward at z_alpha")
    if dh[-1][1] == 0:
        raise HypothesisViolated("4", "h'(1) must be nonzero")
    if warn and dh[-1][1] >= F(1, 2):
        warnings.warn(f"h'(1) = {dh[-1][1]} is not small", stacklevel=3)
    cand = {
        "S,-A": capped_action(hp, 0, 0, -1),
        "beta": capped_action(hp, zb, 1, 0),
        "alpha#A": capped_action(hp, za, 1, 1),
        "N": capped_action(hp, 1, 0, 0),
    }
    others = [v for key, v in cand.items() if key != "alpha#A"]
    if not all(cand["alpha#A"] < v for v in others):
        raise HypothesisViolated("ordering", "[alpha, u_alpha # A] is not strictly the smallest candidate action")
    if not cand["beta"] < cand["S,-A"]:
        raise HypothesisViolated("ordering", "[beta, u_beta] must lie below [S, -A]")
    return BumpData(delta, zb, za, cand)


def c_simple_bump(hp: HeightProfile, warn: bool = True) -> Fraction:
    """``min(h(z_beta) + 1 - z_beta, h(1))`` for profiles meeting the bump hypotheses."""
    b = bump_data(hp, warn)
    return min(b.candidates["beta"], b.candidates["N"])


# --------------------------------------------------------------------------
# failure of the max formula

@dataclass(frozen=True)
class CounterexampleReport:
    c_sum: Fraction          # c(H); c of the flattened sum differs by at most c_sum_error
    c_sum_error: Fraction    # sup |h_tilde - h|
    c1: Fraction             # upper bound: H_1 <= 0
    c2: Fraction
    gap: Fraction            # max(c1, c2) - c_sum
    gap_lower: Fraction      # gap - c_sum_error, a lower bound for the true gap
    parameters: dict
    h: HeightProfile
    h_tilde: HeightProfile
    h1: HeightProfile
    h2: HeightProfile


def _sup_abs_difference(a: HeightProfile, b: HeightProfile) -> Fraction:
    xs = sorted({x for x, _ in a.dh} | {x for x, _ in b.dh})
    cand = set(xs)
    for x0, x1 in zip(xs, xs[1:]):
        d0 = pl_eval(a.dh, x0) - pl_eval(b.dh, x0)
        d1 = pl_eval(a.dh, x1) - pl_eval(b.dh, x1)
        if d0 * d1 < 0:
            cand.add(x0 + d0 * (x1 - x0) / (d0 - d1))
    return max(abs(a.h(x) - b.h(x)) for x in cand)


def counterexample(z_beta, delta_prime, right_span: int = 10, h_top=F(3, 5), dh_end=F(1, 20)) -> CounterexampleReport:
    """Build ``h``, flatten it to zero around ``z = 1/2`` and split the result as ``h1 + h2``.

    ``h`` has ``h(0) = -1/2``, ``h(1/2) = 0``, ``h(1) = h_top`` and
    ``h(z_beta) = -1/2 + z_beta/5``.  The flattened ``h_tilde`` vanishes on
    ``[1/2 - d, 1/2 + d]``; it rejoins ``h`` over ``[1/2 - 2d, 1/2 - d]`` on
    the left and over ``[1/2 + d, 1/2 + right_span d]`` on the right, the
    longer right ramp keeping ``h2' < 2``.
    """
    zb, d = Q(z_beta), Q(delta_prime)
    half = F(1, 2)
    if not 0 < zb < half:
        raise ConstructionFailed("0 < z_beta < 1/2", f"z_beta = {zb}")
    if d <= 0:
        raise ConstructionFailed("delta_prime > 0", f"delta_prime = {d}")
    rise = zb / 5
    delta = zb - 2 * rise
    v_half = 2 * (half - rise) / (half - zb) - 1
    if not 1 < v_half < 2:
        raise ConstructionFailed("1 < h' < 2 on (z_beta, 1/2)",
                                 f"h'(1/2) would be {float(v_half):.4g}; z_beta is too close to 1/2")
    z_peak, z_alpha = F(7, 10), F(9, 10)
    # pick h'(z_peak) so that h(1) = h_top
    tail = (1 + dh_end) / 2 * (1 - z_alpha)
    v_peak = (h_top - tail - v_half * (z_peak - half) / 2 - (z_alpha - z_peak) / 2) / ((z_peak - half) / 2 + (z_alpha - z_peak) / 2)
    if not 1 < v_peak < 2:
        raise ConstructionFailed("1 < h' < 2 on (1/2, z_alpha)", f"h'({z_peak}) would be {float(v_peak):.4g}")
    dh = ((F(0), F(0)), (delta, F(0)), (zb, F(1)), (half, v_half), (z_peak, v_peak), (z_alpha, F(1)), (F(1), dh_end))
    h = HeightProfile(dh, F(-1, 2))
    if h.h(half) != 0 or h.h(1) <= half:
        raise ConstructionFailed("h(1/2) = 0 < 1/2 < h(1)", "internal inconsistency")

    left0, right1 = half - 2 * d, half + right_span * d
    if left0 <= zb:
        raise ConstructionFailed("1/2 - 2 delta' > z_beta", f"delta_prime = {d} is too large")
    if right1 >= z_alpha:
        raise ConstructionFailed("1/2 + span delta' < z_alpha", f"delta_prime = {d} is too large")
    v_a, v_b = pl_eval(dh, left0), pl_eval(dh, right1)
    need_l = -h.h(left0)
    p_left = (4 * need_l / d - v_a) / 2
    need_r = h.h(right1)
    p_right = (2 * need_r / d - (right_span - 2) * v_b) / (right_span - 1)
    if not 1 < p_right < 2:
        raise ConstructionFailed("1 < h2' < 2 on the right ramp", f"ramp peak {float(p_right):.4g}")
    if p_left < 0:
        raise ConstructionFailed("left ramp", f"ramp peak {float(p_left):.4g}")

    before = [p for p in dh if p[0] < left0]
    after = [p for p in dh if p[0] > right1]
    ramp = [(left0, v_a), (half - 3 * d / 2, p_left), (half - d, F(0)), (half + d, F(0)),
            (half + 2 * d, p_right), (right1, v_b)]
    dh_t = pl_simplify(tuple(before + ramp + after))
    h_t = HeightProfile(dh_t, F(-1, 2))
    dh1 = pl_simplify(tuple([p for p in dh_t if p[0] <= half - d] + [(F(1), F(0))]))
    dh2 = pl_simplify(tuple([(F(0), F(0))] + [p for p in dh_t if p[0] >= half + d]))
    h1 = HeightProfile(dh1, F(-1, 2))
    h2 = HeightProfile(dh2, F(0))
    if any(h_t.h(x) != h1.h(x) + h2.h(x) for x, _ in dh_t):
        raise ConstructionFailed("h_tilde = h1 + h2", "split does not add up")

    c_sum = c_simple_bump(h, warn=False)
    c2 = c_simple_bump(h2, warn=False)
    c1 = max(h1.h(x) for x, _ in dh1)  # max H_1 bounds c(H_1) from above
    err = _sup_abs_difference(h_t, h)
    gap = max(c1, c2) - c_sum
    params = {"z_beta": zb, "delta_prime": d, "right_span": right_span, "delta": delta,
              "z_alpha": z_alpha, "h_zbeta": h.h(zb), "h1_top": h.h(1)}
    return CounterexampleReport(c_sum, err, c1, c2, gap, gap - err, params, h, h_t, h1, h2)

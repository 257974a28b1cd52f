"""One-parameter families of models and their bifurcation diagrams.

The special deformation shrinks a radial profile ``g = -f'`` to zero by
first lowering the part above ``N``, then the part between ``N - 1`` and
``N``, and so on, at a speed chosen so the total integral drops at the
constant rate ``h``.  Actions of a family are computed exactly at each
sampled parameter and then linked into branches by nearest continuation.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import Collision, DegenerateProfile, NotInSpectrum, OutOfRange, OverlapError, TrackingAmbiguous
from .morse_tree import PlaneTree, TreeEdge, Node, spectrum
from .profile import RhoProfile
from .rational import PL, Q, ceil, floor, pl_eval, pl_integral, pl_min_const, pl_simplify

F = Fraction


# --------------------------------------------------------------------------
# flattening and truncation

def _integer_contacts(g: PL) -> list[tuple[Fraction, int]]:
    """Isolated points of the open domain where g takes a positive integer value."""
    lo, hi = g[0][0], g[-1][0]
    hits: set[tuple[Fraction, int]] = set()
    flat: set[tuple[Fraction, int]] = set()
    for (x0, y0), (x1, y1) in zip(g, g[1:]):
        if y0 == y1:
            if y0.denominator == 1 and y0 > 0:
                flat.add((x0, int(y0)))
                flat.add((x1, int(y0)))
            continue
        for ell in range(max(1, ceil(min(y0, y1))), floor(max(y0, y1)) + 1):
            x = x0 + (ell - y0) * (x1 - x0) / (y1 - y0)
            hits.add((x, ell))
    return sorted(p for p in hits - flat if lo < p[0] < hi)


def flatten_at_integers(g: RhoProfile, width=None) -> RhoProfile:
    """Replace g by its integer value on ``[s - w, s + w]`` around each integer contact.

    Continuity is restored by linear ramps on ``[s - 2w, s - w]`` and
    ``[s + w, s + 2w]``, so g is untouched outside the ``2w``-neighbourhoods.
    Existing plateaus are left alone.  The default ``w`` is 1/100 of the
    shortest gap between contacts (and the domain ends).
    """
    bp = g.breakpoints
    contacts = _integer_contacts(bp)
    if not contacts:
        return g
    lo, hi = bp[0][0], bp[-1][0]
    xs = [lo] + [s for s, _ in contacts] + [hi]
    if width is None:
        w = min(b - a for a, b in zip(xs, xs[1:])) / 100
    else:
        w = Q(width)
    if w <= 0:
        raise OverlapError("flattening width must be positive")
    windows = [(s - 2 * w, s + 2 * w) for s, _ in contacts]
    if windows[0][0] <= lo or windows[-1][1] >= hi:
        raise OverlapError("a flattening neighbourhood reaches the end of the domain")
    for (a0, b0), (a1, b1) in zip(windows, windows[1:]):
        if a1 <= b0:
            raise OverlapError(f"flattening neighbourhoods overlap near {b0} and {a1}")
    pts = [(x, y) for x, y in bp if not any(a < x < b for a, b in windows)]
    for (s, ell), (a, b) in zip(contacts, windows):
        pts += [(a, pl_eval(bp, a)), (s - w, F(ell)), (s + w, F(ell)), (b, pl_eval(bp, b))]
    pts.sort()
    return RhoProfile(pl_simplify(tuple(pts)))


@dataclass(frozen=True)
class TruncationData:
    g: RhoProfile
    N: int
    gamma: tuple[PL, ...]
    delta: tuple[PL, ...]
    hk: tuple[Fraction, ...]
    h: Fraction
    tau: tuple[Fraction, ...]


def truncation_data(g: RhoProfile) -> TruncationData:
    """Level truncations ``gamma_k = min(g, k)`` and the schedule ``tau_k``."""
    bp = g.breakpoints
    if any(y < 0 for _, y in bp):
        raise DegenerateProfile("g = -f' must be nonnegative")
    n = floor(max(y for _, y in bp))
    gamma = tuple(pl_min_const(bp, F(k)) for k in range(n + 2))
    delta = []
    for k in range(n + 1):
        xs = sorted({x for x, _ in gamma[k]} | {x for x, _ in gamma[k + 1]})
        delta.append(tuple((x, pl_eval(gamma[k + 1], x) - pl_eval(gamma[k], x)) for x in xs))
    hk = tuple(pl_integral(d) for d in delta)
    if any(v == 0 for v in hk):
        raise DegenerateProfile(f"empty truncation layer: h_k = {[str(v) for v in hk]}")
    h = sum(hk, F(0))
    tau = tuple(sum(hk[k:], F(0)) / h for k in range(n + 2))
    return TruncationData(g, n, gamma, tuple(delta), hk, h, tau)


def special_deformation(td: TruncationData, sigma) -> RhoProfile:
    """``g_sigma = gamma_k + (h / h_k)(tau_k - sigma) delta_k`` for ``sigma`` in ``[tau_{k+1}, tau_k)``."""
    s = Q(sigma)
    if s < 0 or s > 1:
        raise OutOfRange(f"sigma = {s} outside [0, 1]")
    if s == 1:
        return RhoProfile(tuple((x, F(0)) for x, _ in td.g.breakpoints))
    k = next(k for k in range(td.N + 1) if td.tau[k + 1] <= s < td.tau[k])
    c = td.h / td.hk[k] * (td.tau[k] - s)
    xs = sorted({x for x, _ in td.gamma[k]} | {x for x, _ in td.delta[k]})
    pts = tuple((x, pl_eval(td.gamma[k], x) + c * pl_eval(td.delta[k], x)) for x in xs)
    return RhoProfile(pts)


# --------------------------------------------------------------------------
# radial spectra tolerant of plateaus

@dataclass(frozen=True)
class RadialFixed:
    """Fixed circles of the radial Hamiltonian ``f(s) = integral_s^end g`` at one integer value."""

    ell: int
    s_lo: Fraction
    s_hi: Fraction
    action: Fraction


def radial_spectrum(g: RhoProfile) -> list[RadialFixed]:
    """Actions ``ell * s + integral_s g`` at every point or plateau where ``g = ell``.

    Plateaus contribute one value each (the action is constant along them).
    The two ends of the domain are excluded: they belong to the inner
    constant region and to the outside of the support.
    """
    bp = g.breakpoints
    lo, hi = bp[0][0], bp[-1][0]
    out: list[RadialFixed] = []
    top = floor(max(y for _, y in bp))
    for ell in range(0, top + 1):
        runs: list[list[Fraction]] = []
        for (x0, y0), (x1, y1) in zip(bp, bp[1:]):
            if y0 == y1 == ell:
                seg = [x0, x1]
            elif (y0 - ell) * (y1 - ell) <= 0 and y0 != y1:
                x = x0 + (ell - y0) * (x1 - x0) / (y1 - y0)
                seg = [x, x]
            else:
                continue
            if runs and seg[0] <= runs[-1][1]:
                runs[-1][1] = max(runs[-1][1], seg[1])
            else:
                runs.append(seg)
        for a, b in runs:
            if a == lo or b == hi:
                continue
            out.append(RadialFixed(ell, a, b, ell * a + pl_integral(bp, a, hi)))
    return out


# --------------------------------------------------------------------------
# families

Source = tuple[Fraction, str, str]  # (action, provenance, source key)


class Family(Protocol):
    """Anything with ``spectrum_at``; an optional ``speed`` attribute bounds |d action / d sigma|."""

    def spectrum_at(self, sigma: Fraction) -> list[Source]: ...


def forest_spectrum(trees: Sequence[PlaneTree], shift=F(0), provenance: str = "model") -> list[Source]:
    """Union of tree spectra with a single trivial entry, every action shifted by ``shift``."""
    out: list[Source] = [(shift, provenance, "Y")]
    for i, t in enumerate(trees):
        for s in spectrum(t):
            if s.kind != "trivial":
                out.append((s.action + shift, provenance, f"{i}:{s.label}"))
    return out


@dataclass(frozen=True)
class ConstantFamily:
    trees: tuple[PlaneTree, ...]

    def spectrum_at(self, sigma) -> list[Source]:
        return forest_spectrum(self.trees)


@dataclass(frozen=True)
class ShiftFamily:
    """``K_sigma = K_0 + sigma * r``: every action moves with slope ``r``."""

    trees: tuple[PlaneTree, ...]
    r: Fraction

    @property
    def speed(self) -> Fraction:
        return abs(self.r)

    def spectrum_at(self, sigma) -> list[Source]:
        return forest_spectrum(self.trees, Q(sigma) * self.r)


def interpolate_trees(t0: PlaneTree, t1: PlaneTree, sigma) -> PlaneTree:
    """``(1 - sigma) t0 + sigma t1`` for trees with identical combinatorics and areas."""
    s = Q(sigma)
    n1 = {n.id: n for n in t1.nodes}
    e1 = {e.id: e for e in t1.edges}
    if set(n1) != {n.id for n in t0.nodes} or set(e1) != {e.id for e in t0.edges}:
        raise ValueError("linear families need trees with the same node and edge ids")
    nodes = tuple(Node(n.id, n.kind, (1 - s) * n.level + s * n1[n.id].level) for n in t0.nodes)
    edges = []
    for e in t0.edges:
        f = e1[e.id]
        if (e.area_lo, e.area_hi, e.inner, e.outer) != (f.area_lo, f.area_hi, f.inner, f.outer):
            raise ValueError(f"edge {e.id} differs in areas or endpoints")
        xs = sorted({x for x, _ in e.profile.breakpoints} | {x for x, _ in f.profile.breakpoints})
        bp = tuple((x, (1 - s) * e.profile.rho(x) + s * f.profile.rho(x)) for x in xs)
        edges.append(TreeEdge(e.id, RhoProfile(bp), (1 - s) * e.level_at_lo + s * f.level_at_lo, e.inner, e.outer))
    return PlaneTree(nodes, tuple(edges))


@dataclass(frozen=True)
class LinearFamily:
    t0: PlaneTree
    t1: PlaneTree

    def spectrum_at(self, sigma) -> list[Source]:
        return forest_spectrum([interpolate_trees(self.t0, self.t1, sigma)])


@dataclass(frozen=True)
class SpecialFamily:
    """``K_sigma = F_sigma + (inside parts)``.

    ``F_sigma`` is the radial Hamiltonian with ``-f' = g_sigma`` whose
    constant top ``(1 - sigma) h`` covers the disk where the inside trees
    live; their actions ride on that top.
    """

    td: TruncationData
    inside: tuple[PlaneTree, ...] = ()

    @classmethod
    def from_profile(cls, g: RhoProfile, flatten_width=None, inside: Sequence[PlaneTree] = ()) -> "SpecialFamily":
        return cls(truncation_data(flatten_at_integers(g, flatten_width)), tuple(inside))

    @property
    def h(self) -> Fraction:
        return self.td.h

    @property
    def speed(self) -> Fraction:
        return self.td.h

    def spectrum_at(self, sigma) -> list[Source]:
        s = Q(sigma)
        gs = special_deformation(self.td, s)
        out: list[Source] = [(F(0), "outside", "Y")]
        for p in radial_spectrum(gs):
            out.append((p.action, "outside", f"l{p.ell}@{p.s_lo}"))
        out += forest_spectrum(self.inside, (1 - s) * self.td.h, "inside")
        return out


# --------------------------------------------------------------------------
# tracking

@dataclass
class Branch:
    id: int
    provenance: str
    sigmas: list[float] = field(default_factory=list)
    values: list[float] = field(default_factory=list)

    def predict(self, sigma: float) -> float:
        if len(self.values) < 2:
            return self.values[-1]
        s0, s1 = self.sigmas[-2], self.sigmas[-1]
        v0, v1 = self.values[-2], self.values[-1]
        return v1 + (v1 - v0) * (sigma - s1) / (s1 - s0)

    def value_at(self, sigma: float) -> float | None:
        try:
            return self.values[self.sigmas.index(sigma)]
        except ValueError:
            return None


@dataclass
class BifurcationDiagram:
    sigmas: list[float]
    branches: list[Branch]
    spectra: list[list[float]]
    births: list[tuple[float, int]] = field(default_factory=list)
    deaths: list[tuple[float, int]] = field(default_factory=list)


def default_grid(n: int = 512) -> list[float]:
    return [float(x) for x in np.linspace(0.0, 1.0, n)]


def _eval(args):
    family, sigma = args
    return sorted(((float(a), prov, key) for a, prov, key in family.spectrum_at(F(sigma))), key=lambda t: (t[0], t[2]))


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("UNLK_THREADS", "1")))
    except ValueError:
        return 1


MAX_REFINE = 8


def _costs(live: list[Branch], s: float, ds: float, values: np.ndarray, speed: float, tol: float,
           gate: float | None):
    preds = np.array([b.predict(s) for b in live])
    scale = max([1.0, speed] + [abs(b.values[-1] - b.values[-2]) / (b.sigmas[-1] - b.sigmas[-2])
                                for b in live if len(b.values) > 1])
    if gate is None:
        gate = max(4.0 * scale * ds, 100 * tol)
    if len(live) and len(values):
        cost = np.abs(preds[:, None] - values[None, :])
    else:
        cost = np.zeros((len(live), len(values)))
    return cost, gate, scale * ds


def _unclear(live: list[Branch], cost: np.ndarray, values: np.ndarray, gate: float, reach: float, tol: float):
    """First branch whose continuation is not evident, with a flag for an exact tie.

    A branch with history must be at most half as far from its best value
    as from the next distinct one.  A fresh branch cannot move more than
    ``reach`` in one step, so two distinct values inside that window are
    already unclear.
    """
    for bi in range(cost.shape[0]):
        near = np.flatnonzero(cost[bi] <= gate)
        if len(near) < 2:
            continue
        order = near[np.argsort(cost[bi, near], kind="stable")]
        d1 = cost[bi, order[0]]
        for j in order[1:]:
            if abs(values[j] - values[order[0]]) > tol:
                d2 = cost[bi, j]
                fresh = len(live[bi].values) < 2 and d2 <= 1.01 * reach + tol
                if d1 > 0.5 * d2 or fresh:
                    return bi, d2 - d1 < tol
                break
    return None


def bifurcation(family: Family, grid: Sequence[float] | None = None, tol: float = 1e-9,
                gate: float | None = None) -> BifurcationDiagram:
    """Sample ``spec(K_sigma)`` on the grid and link values into branches.

    Each live branch is extrapolated linearly to the next sample and matched
    to the closest unused value (optimal assignment).  Values farther than
    ``gate`` from every prediction start new branches; unmatched branches
    end.  The default gate is four steps at the fastest observed slope, or
    at the family's ``speed`` when that is larger.

    When some branch is not clearly closer to one value than to the next
    distinct one, the step is bisected (up to ``MAX_REFINE`` times) and the
    extra samples join the diagram.  If a branch still sees two different
    values equally close (within ``tol``), :class:`TrackingAmbiguous` is
    raised instead of guessing.
    """
    sig = list(default_grid() if grid is None else grid)
    jobs = [(family, s) for s in sig]
    if _workers() > 1 and len(sig) > 8:
        with ProcessPoolExecutor(max_workers=_workers()) as ex:
            spectra = list(ex.map(_eval, jobs, chunksize=16))
    else:
        spectra = [_eval(j) for j in jobs]
    speed = float(getattr(family, "speed", 1))

    branches: list[Branch] = []
    live: list[Branch] = []
    births, deaths = [], []
    out_sig: list[float] = []
    out_spec: list[list[float]] = []

    def start(s, spec) -> None:
        for v, prov, _ in spec:
            b = Branch(len(branches), prov, [s], [v])
            branches.append(b)
            live.append(b)
            births.append((s, b.id))

    # samples still to link, nearest last
    todo = [(s, spec, 0) for s, spec in zip(sig, spectra)][::-1]
    while todo:
        s, spec, depth = todo.pop()
        if not out_sig:
            start(s, spec)
            out_sig.append(s)
            out_spec.append([v for v, _, _ in spec])
            continue
        prev = out_sig[-1]
        values = np.array([v for v, _, _ in spec])
        cost, g, reach = _costs(live, s, s - prev, values, speed, tol, gate)
        bad = _unclear(live, cost, values, g, reach, tol)
        if bad is not None and depth < MAX_REFINE:
            mid = (prev + s) / 2
            todo.append((s, spec, depth + 1))
            todo.append((mid, _eval((family, mid)), depth + 1))
            continue
        if bad is not None and bad[1]:
            raise TrackingAmbiguous(s, f"branch {live[bad[0]].id} is equidistant from two values")
        big = 1e300
        masked = np.where(cost <= g, cost, big)
        rows, cols = linear_sum_assignment(masked) if masked.size else (np.array([], int), np.array([], int))
        matched_b, matched_v = set(), set()
        for r, c in zip(rows, cols):
            if masked[r, c] < big:
                live[r].sigmas.append(s)
                live[r].values.append(float(values[c]))
                matched_b.add(r)
                matched_v.add(c)
        new_live = []
        for bi, b in enumerate(live):
            if bi in matched_b:
                new_live.append(b)
            else:
                deaths.append((prev, b.id))
        live[:] = new_live
        start(s, [x for c, x in enumerate(spec) if c not in matched_v])
        out_sig.append(s)
        out_spec.append([v for v, _, _ in spec])
    return BifurcationDiagram(out_sig, branches, out_spec, births, deaths)


@dataclass(frozen=True)
class SlopeReport:
    min_slope: float
    threshold: float
    passed: bool
    branch: int | None
    sigma: float | None


def slope_check(d: BifurcationDiagram, h: float, tol: float = 1e-6) -> SlopeReport:
    """Smallest finite-difference slope over all branches against ``-h (1 + tol)``."""
    best, where = 0.0, (None, None)
    for b in d.branches:
        for i in range(1, len(b.values)):
            slope = (b.values[i] - b.values[i - 1]) / (b.sigmas[i] - b.sigmas[i - 1])
            if slope < best:
                best, where = slope, (b.id, b.sigmas[i - 1])
    thr = -h * (1 + tol)
    return SlopeReport(best, thr, best >= thr, *where)


def continue_c(d: BifurcationDiagram, c0: float, tol: float = 1e-9) -> list[tuple[float, float]]:
    """Follow the branch through ``(sigma_0, c0)``; once it reaches 0 it stays at 0."""
    s0 = d.sigmas[0]
    start = [b for b in d.branches if b.sigmas[0] == s0 and abs(b.values[0] - c0) <= tol]
    if not start:
        raise NotInSpectrum(f"{c0!r} is not a spectral value at sigma={s0!r}")
    if len(start) > 1:
        raise Collision(s0, f"{len(start)} branches start at {c0!r}")
    b = start[0]
    out: list[tuple[float, float]] = []
    clamped = False
    for i, s in enumerate(d.sigmas):
        if clamped:
            out.append((s, 0.0))
            continue
        v = b.value_at(s)
        if v is None:
            raise Collision(s, f"branch {b.id} ends before the family does")
        if v <= tol:
            clamped = True
            out.append((s, 0.0))
            continue
        for other in d.branches:
            if other is b:
                continue
            u = other.value_at(s)
            if u is not None and abs(u - v) <= tol:
                raise Collision(s, f"branch {other.id} meets the followed branch")
        out.append((s, v))
    return out

"""Nested-disk tree models of compactly supported Hamiltonians on the plane.

A :class:`PlaneTree` has one node per critical point (extrema and saddles)
and one edge per annulus of regular level circles.  Each edge carries a
:class:`~unlinked.profile.RhoProfile` over absolute enclosed area, so that
``level = level_at_lo + integral of rho``.  The outer end of the root edge is
the support boundary, at level 0.

Two independent evaluations of the invariant are provided:

* :func:`nu_oracle` enumerates every maximal negative unlinked set (mnus)
  by brute force and takes ``min sup action``;
* :func:`nu_recursive` peels off the outermost saddle and recurses.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import Diagnostic, InvalidPoint, InvalidTree, TooLarge
from .profile import (
    EdgeGeometry,
    OrbitPoint,
    RhoProfile,
    direction,
    fixed_points,
    level_at,
    validate_profile,
)
from .rational import Q

EXTREMUM = "extremum"
SADDLE = "saddle"


@dataclass(frozen=True)
class Node:
    id: str
    kind: str
    level: Fraction


@dataclass(frozen=True)
class TreeEdge:
    """An annulus between ``inner`` (a node) and ``outer`` (a node or None for the boundary)."""

    id: str
    profile: RhoProfile
    level_at_lo: Fraction
    inner: str
    outer: str | None

    @property
    def geom(self) -> EdgeGeometry:
        return EdgeGeometry(self.profile.area_lo, self.profile.area_hi, self.level_at_lo)

    @property
    def area_lo(self) -> Fraction:
        return self.profile.area_lo

    @property
    def area_hi(self) -> Fraction:
        return self.profile.area_hi

    def level(self, a) -> Fraction:
        return level_at(self.geom, self.profile, a)

    @property
    def level_at_hi(self) -> Fraction:
        return self.level(self.area_hi)


@dataclass(frozen=True)
class PlaneTree:
    nodes: tuple[Node, ...] = ()
    edges: tuple[TreeEdge, ...] = ()

    @cached_property
    def _node_by_id(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def _edge_by_id(self) -> dict[str, TreeEdge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _parent(self) -> dict[str, TreeEdge]:
        return {e.inner: e for e in self.edges}

    @cached_property
    def _children(self) -> dict[str | None, list[TreeEdge]]:
        out: dict[str | None, list[TreeEdge]] = {}
        for e in self.edges:
            out.setdefault(e.outer, []).append(e)
        return out

    def node(self, node_id: str) -> Node:
        return self._node_by_id[node_id]

    def edge(self, edge_id: str) -> TreeEdge:
        return self._edge_by_id[edge_id]

    def parent_edge(self, node_id: str) -> TreeEdge:
        return self._parent[node_id]

    def child_edges(self, node_id: str | None) -> list[TreeEdge]:
        return list(self._children.get(node_id, ()))

    @property
    def is_empty(self) -> bool:
        return not self.nodes and not self.edges

    @property
    def root_edge(self) -> TreeEdge | None:
        roots = self.child_edges(None)
        return roots[0] if roots else None

    @property
    def total_area(self) -> Fraction:
        r = self.root_edge
        return Fraction(0) if r is None else r.area_hi

    @cached_property
    def subtree_nodes(self) -> dict[str, frozenset[str]]:
        """Node ids at or below each node (guarded against cycles)."""
        out: dict[str, frozenset[str]] = {}

        def visit(nid: str, seen: frozenset[str]) -> frozenset[str]:
            if nid in out:
                return out[nid]
            acc = {nid}
            for e in self.child_edges(nid):
                if e.inner not in seen:
                    acc |= visit(e.inner, seen | {e.inner})
            out[nid] = frozenset(acc)
            return out[nid]

        for n in self.nodes:
            visit(n.id, frozenset({n.id}))
        return out

    def node_rho(self, node_id: str) -> Fraction:
        """Rotation number at a critical point: 0 at saddles, edge endpoint value at extrema."""
        n = self.node(node_id)
        if n.kind == SADDLE:
            return Fraction(0)
        return self.parent_edge(node_id).profile.breakpoints[0][1]

    def depth(self) -> int:
        """Number of nodes on the longest boundary-to-leaf path."""
        def d(nid: str) -> int:
            return 1 + max((d(e.inner) for e in self.child_edges(nid)), default=0)
        r = self.root_edge
        return 0 if r is None else d(r.inner)


def make_tree(nodes: Iterable, edges: Iterable) -> PlaneTree:
    """Build a tree from loose tuples.

    ``nodes`` are ``(id, kind, level)``; ``edges`` are
    ``(id, rho_breakpoints, level_at_lo, inner, outer)``.
    """
    ns = tuple(Node(i, kind, Q(level)) for i, kind, level in nodes)
    es = tuple(TreeEdge(i, RhoProfile.of(bp), Q(l0), inner, outer) for i, bp, l0, inner, outer in edges)
    return PlaneTree(ns, es)


def negate(t: PlaneTree) -> PlaneTree:
    """The tree of -H: levels and rotation numbers change sign."""
    nodes = tuple(replace(n, level=-n.level) for n in t.nodes)
    edges = tuple(
        replace(e, profile=RhoProfile(tuple((a, -r) for a, r in e.profile.breakpoints)), level_at_lo=-e.level_at_lo)
        for e in t.edges
    )
    return PlaneTree(nodes, edges)


def rescale_areas(t: PlaneTree, factor) -> PlaneTree:
    """Scale every area by ``factor`` and rho by ``1/factor``; levels are unchanged."""
    lam = Q(factor)
    edges = tuple(
        replace(e, profile=RhoProfile(tuple((a * lam, r / lam) for a, r in e.profile.breakpoints)))
        for e in t.edges
    )
    return PlaneTree(t.nodes, edges)


# --------------------------------------------------------------------------
# validation

def validate_tree(t: PlaneTree) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    if t.is_empty:
        return diags
    D = Diagnostic
    ids = [n.id for n in t.nodes]
    if len(set(ids)) != len(ids):
        diags.append(D("DuplicateId", "node ids must be unique"))
    eids = [e.id for e in t.edges]
    if len(set(eids)) != len(eids):
        diags.append(D("DuplicateId", "edge ids must be unique"))
    known = set(ids)
    for n in t.nodes:
        if n.kind not in (EXTREMUM, SADDLE):
            diags.append(D("UnknownKind", f"node kind {n.kind!r}", (n.id,)))
    for e in t.edges:
        if e.inner not in known or (e.outer is not None and e.outer not in known):
            diags.append(D("DanglingEdge", "edge endpoint is not a node", (e.id,)))
    if diags:
        return diags

    roots = t.child_edges(None)
    if len(roots) != 1:
        diags.append(D("BoundaryCount", f"expected exactly one boundary edge, found {len(roots)}"))
    inner_count: dict[str, int] = {}
    for e in t.edges:
        inner_count[e.inner] = inner_count.get(e.inner, 0) + 1
    for n in t.nodes:
        if inner_count.get(n.id, 0) != 1:
            diags.append(D("DegreeError", "every node needs exactly one outer (parent) edge", (n.id,)))
        nchild = len(t.child_edges(n.id))
        want = 0 if n.kind == EXTREMUM else 2
        if nchild != want:
            diags.append(D("DegreeError", f"{n.kind} has {nchild} inner edges, expected {want}", (n.id,)))
    if diags:
        return diags
    # every node must reach the boundary
    for n in t.nodes:
        cur, seen = n.id, set()
        while cur is not None:
            if cur in seen:
                diags.append(D("Cycle", "parent chain does not reach the boundary", (n.id,)))
                break
            seen.add(cur)
            cur = t.parent_edge(cur).outer
    if diags:
        return diags

    for e in t.edges:
        for d in validate_profile(e.profile):
            diags.append(D(d.code, d.message, (e.id,) + d.where))
    if diags:
        return diags

    for e in t.edges:
        bp = e.profile.breakpoints
        inner = t.node(e.inner)
        if inner.kind == EXTREMUM and e.area_lo != 0:
            diags.append(D("AreaMismatch", "an extremum edge must start at area 0", (e.id,)))
        if bp[-1][1] != 0:
            where = "boundary" if e.outer is None else "saddle"
            diags.append(D("NonVanishingRho", f"rho must vanish at the {where} end", (e.id,)))
        if inner.kind == SADDLE and bp[0][1] != 0:
            diags.append(D("NonVanishingRho", "rho must vanish at the saddle end", (e.id,)))
        if inner.level != e.level_at_lo:
            diags.append(D("LevelMismatch", f"inner node level {inner.level} != level_at_lo {e.level_at_lo}", (e.id,)))
        outer_level = Fraction(0) if e.outer is None else t.node(e.outer).level
        if e.level_at_hi != outer_level:
            diags.append(D("LevelMismatch", f"integrated outer level {e.level_at_hi} != {outer_level}", (e.id,)))

    for n in t.nodes:
        if n.kind != SADDLE:
            continue
        kids = t.child_edges(n.id)
        parent = t.parent_edge(n.id)
        if parent.area_lo != sum(k.area_hi for k in kids):
            diags.append(D("AreaMismatch", "parent area_lo must equal the sum of child areas", (n.id, parent.id)))
        # side of each adjacent annulus relative to the saddle level
        sides = [direction(parent.profile)] + [-direction(k.profile) for k in kids]
        if len(set(sides)) == 1:
            diags.append(D("NonMorseSaddle", "all three adjacent annuli lie on the same side", (n.id,)))

    levels: dict[Fraction, str] = {}
    for n in t.nodes:
        if n.level == 0:
            code = "SaddleAtZeroLevel" if n.kind == SADDLE else "ExtremumAtZeroLevel"
            diags.append(D(code, "critical levels must be nonzero", (n.id,)))
        if n.level in levels:
            diags.append(D("DuplicateLevel", f"level {n.level} repeated", (levels[n.level], n.id)))
        levels.setdefault(n.level, n.id)
    return diags


def _require_valid(t: PlaneTree) -> None:
    diags = validate_tree(t)
    if diags:
        raise InvalidTree(diags)


# --------------------------------------------------------------------------
# spectrum

TRIVIAL = "trivial"
CRITICAL = "critical"
ORBIT = "orbit"


@dataclass(frozen=True)
class SpectrumEntry:
    """One fixed point (or circle of fixed points) with its action.

    ``ident`` is ``"Y"`` for the trivial fixed points, a node id for
    critical points and an edge id for orbits.
    """

    kind: str
    ident: str
    area: Fraction
    rho: Fraction
    level: Fraction
    action: Fraction

    @property
    def negative(self) -> bool:
        return self.rho <= 0

    @property
    def key(self) -> tuple:
        return (self.kind, self.ident, self.area)

    @property
    def label(self) -> str:
        if self.kind == ORBIT:
            a = self.area
            return f"{self.ident}@{a.numerator}" + ("" if a.denominator == 1 else f"/{a.denominator}")
        return self.ident


Y_ENTRY = SpectrumEntry(TRIVIAL, "Y", Fraction(0), Fraction(0), Fraction(0), Fraction(0))

_KIND_ORDER = {TRIVIAL: 0, CRITICAL: 1, ORBIT: 2}


def _entry_sort_key(s: SpectrumEntry):
    return (s.action, _KIND_ORDER[s.kind], s.ident, s.area)


def spectrum(t: PlaneTree) -> list[SpectrumEntry]:
    """Every fixed point of the time-one map, sorted by action."""
    out = [Y_ENTRY]
    for n in t.nodes:
        area = Fraction(0) if n.kind == EXTREMUM else t.parent_edge(n.id).area_lo
        out.append(SpectrumEntry(CRITICAL, n.id, area, t.node_rho(n.id), n.level, n.level))
    for e in t.edges:
        for p in fixed_points(e.geom, e.profile, e.id):
            out.append(SpectrumEntry(ORBIT, e.id, p.area, Fraction(p.k), p.level, p.action))
    out.sort(key=_entry_sort_key)
    return out


def orbit_points(t: PlaneTree) -> list[OrbitPoint]:
    return [p for e in t.edges for p in fixed_points(e.geom, e.profile, e.id)]


# --------------------------------------------------------------------------
# brute-force oracle over maximal negative unlinked sets

@dataclass(frozen=True)
class Mnus:
    members: tuple[SpectrumEntry, ...]
    sup_action: Fraction

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(m.label for m in self.members)


def _encloses(t: PlaneTree, x: SpectrumEntry, y: SpectrumEntry) -> bool:
    """True when y lies strictly inside the disk bounded by orbit x."""
    if x.kind != ORBIT or y.kind == TRIVIAL or x.key == y.key:
        return False
    ex = t.edge(x.ident)
    below = t.subtree_nodes[ex.inner]
    if y.kind == CRITICAL:
        return y.ident in below
    if y.ident == x.ident:
        return y.area < x.area
    return t.edge(y.ident).inner in below


def _tagged_negative_points(trees: Sequence[PlaneTree]):
    pts = []
    for ti, t in enumerate(trees):
        for s in spectrum(t):
            if s.kind != TRIVIAL and s.negative:
                pts.append((ti, s))
    pts.sort(key=lambda p: (p[1].action, p[0], _KIND_ORDER[p[1].kind], p[1].ident, p[1].area))
    return pts


def enumerate_mnus(t: PlaneTree | Sequence[PlaneTree], cap: int = 20) -> list[Mnus]:
    """All maximal negative unlinked sets, by exhaustive subset filtering.

    A sequence of trees is read as a forest of Hamiltonians with disjoint
    supports sharing one trivial fixed-point set.
    """
    trees = [t] if isinstance(t, PlaneTree) else list(t)
    pts = _tagged_negative_points(trees)
    n = len(pts)
    if n > cap:
        raise TooLarge(f"{n} negative fixed points exceed the cap of {cap}")
    linked = [0] * n
    for i, (ti, x) in enumerate(pts):
        for j, (tj, y) in enumerate(pts):
            if ti == tj and (_encloses(trees[ti], x, y) or _encloses(trees[ti], y, x)):
                linked[i] |= 1 << j
    masks = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(masks.shape, dtype=bool)
    for i in range(n):
        inside = ((masks >> i) & 1).astype(bool)
        ok &= ~inside | ((masks & linked[i]) == 0)
    unlinked = ok.copy()
    for j in range(n):
        outside = ((masks >> j) & 1) == 0
        ok &= ~(outside & ((masks & linked[j]) == 0) & unlinked)
    result = []
    for m in masks[ok].tolist():
        members = [Y_ENTRY] + [pts[i][1] for i in range(n) if m >> i & 1]
        sup = max(s.action for s in members)
        result.append(Mnus(tuple(members), sup))
    result.sort(key=lambda m: [_entry_sort_key(s) for s in m.members])
    return result


def nu_oracle(t: PlaneTree | Sequence[PlaneTree], cap: int = 20) -> Fraction:
    """``min`` over mnus's of the largest action in the set."""
    if isinstance(t, PlaneTree):
        _require_valid(t)
    else:
        for s in t:
            _require_valid(s)
    return min(m.sup_action for m in enumerate_mnus(t, cap))


# --------------------------------------------------------------------------
# recursion on the outermost saddle

_INF = None  # marker for an empty minimum


def _min(a, b):
    if a is _INF:
        return b
    if b is _INF:
        return a
    return min(a, b)


def _nu_below(t: PlaneTree, e: TreeEdge, base: Fraction) -> Fraction:
    """Invariant of the part of H enclosed by the outer end of ``e``, shifted by ``-base``."""
    inner = t.node(e.inner)
    positive = direction(e.profile) < 0  # H decreases outward, so it sits above ``base``
    orbit_min = _INF
    for p in fixed_points(e.geom, e.profile, e.id):
        orbit_min = _min(orbit_min, p.action - base)
    if inner.kind == EXTREMUM:
        if not positive:
            return Fraction(0)
        return _min(orbit_min, inner.level - base)
    hs = inner.level - base
    deeper = max(_nu_below(t, c, inner.level) for c in t.child_edges(inner.id))
    if positive:
        return _min(orbit_min, hs + deeper)
    return max(Fraction(0), hs + deeper)


def nu_recursive(t: PlaneTree) -> Fraction:
    _require_valid(t)
    if t.is_empty:
        return Fraction(0)
    return _nu_below(t, t.root_edge, Fraction(0))


def c_recursive(t: PlaneTree) -> Fraction:
    """Spectral invariant of an autonomous model; same recursion as :func:`nu_recursive`."""
    return nu_recursive(t)


def nu_forest(ts: Sequence[PlaneTree]) -> Fraction:
    return max((nu_recursive(t) for t in ts), default=Fraction(0))


# --------------------------------------------------------------------------
# linking

Point = Union[SpectrumEntry, OrbitPoint, Node, str]


def _as_entry(t: PlaneTree, p: Point) -> SpectrumEntry:
    if isinstance(p, SpectrumEntry):
        entry = p
    elif isinstance(p, OrbitPoint):
        entry = SpectrumEntry(ORBIT, p.edge_id, p.area, Fraction(p.k), p.level, p.action)
    elif isinstance(p, Node):
        entry = SpectrumEntry(CRITICAL, p.id, Fraction(0), Fraction(0), p.level, p.level)
    elif p == "Y":
        entry = Y_ENTRY
    elif isinstance(p, str) and p in t._node_by_id:
        n = t.node(p)
        entry = SpectrumEntry(CRITICAL, n.id, Fraction(0), Fraction(0), n.level, n.level)
    else:
        raise InvalidPoint(f"not a fixed point of the model: {p!r}")
    keys = {s.key if s.kind != CRITICAL else (CRITICAL, s.ident) for s in spectrum(t)}
    probe = entry.key if entry.kind != CRITICAL else (CRITICAL, entry.ident)
    if probe not in keys:
        raise InvalidPoint(f"not a fixed point of the model: {p!r}")
    return entry


def linking_number(t: PlaneTree, p: Point, q: Point) -> int:
    """Linking number of two fixed points: rho of the enclosing one, else 0."""
    a, b = _as_entry(t, p), _as_entry(t, q)
    if (a.kind, a.ident, a.area) == (b.kind, b.ident, b.area):
        raise InvalidPoint("linking number needs two distinct points")
    if _encloses(t, a, b):
        return int(a.rho)
    if _encloses(t, b, a):
        return int(b.rho)
    return 0

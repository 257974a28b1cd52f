"""Reeb graphs of Morse-like Hamiltonians on closed surfaces of genus >= 1.

Cells are named by vertex ids (critical level components) and edge ids
(the annuli between them).  The core graph is obtained by repeatedly
removing free ends; its saddles are the essential saddles and everything
stripped away falls into disks, each hanging off one essential saddle.
"""
from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable

from .errors import CoarseWarning, Diagnostic, EmptyCore, InvalidSurface, UnknownCell, ValidationFailed
from .morse_tree import EXTREMUM, SADDLE, Node, PlaneTree, TreeEdge, nu_recursive
from .profile import RhoProfile
from .rational import Q


@dataclass(frozen=True)
class SurfaceVertex:
    id: str
    kind: str
    level: Fraction


@dataclass(frozen=True)
class SurfaceEdge:
    """An annulus between two critical components.

    Edges inside free branches may carry a rotation profile; its area
    coordinate grows away from the disk's innermost critical point and
    ``level_at_lo`` is the absolute level at ``profile.area_lo``.
    """

    id: str
    ends: tuple[str, str]
    profile: RhoProfile | None = None
    level_at_lo: Fraction | None = None


@dataclass(frozen=True)
class SurfaceReebGraph:
    genus: int
    vertices: tuple[SurfaceVertex, ...]
    edges: tuple[SurfaceEdge, ...]

    def vertex(self, vid: str) -> SurfaceVertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    @property
    def cells(self) -> frozenset[str]:
        return frozenset(v.id for v in self.vertices) | frozenset(e.id for e in self.edges)

    def incident(self) -> dict[str, list[SurfaceEdge]]:
        inc: dict[str, list[SurfaceEdge]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            for w in e.ends:
                inc.setdefault(w, []).append(e)
        return inc


def make_surface(genus: int, vertices: Iterable, edges: Iterable) -> SurfaceReebGraph:
    """Loose-tuple constructor.

    ``vertices`` are ``(id, kind, level)``; ``edges`` are ``(id, v, w)`` or
    ``(id, v, w, rho_breakpoints, level_at_lo)``.
    """
    vs = tuple(SurfaceVertex(i, k, Q(l)) for i, k, l in vertices)
    es = []
    for item in edges:
        if len(item) == 3:
            es.append(SurfaceEdge(item[0], (item[1], item[2])))
        else:
            i, v, w, bp, l0 = item
            es.append(SurfaceEdge(i, (v, w), RhoProfile.of(bp), Q(l0)))
    return SurfaceReebGraph(genus, vs, tuple(es))


# --------------------------------------------------------------------------
# validation

def validate_surface(g: SurfaceReebGraph) -> list[Diagnostic]:
    D = Diagnostic
    diags: list[Diagnostic] = []
    if g.genus < 1:
        diags.append(D("GenusTooSmall", "surface models need genus >= 1", (g.genus,)))
    vids = [v.id for v in g.vertices]
    eids = [e.id for e in g.edges]
    if len(set(vids)) != len(vids) or len(set(eids)) != len(eids):
        diags.append(D("DuplicateId", "vertex and edge ids must be unique"))
    clash = sorted(set(vids) & set(eids))
    if clash:
        diags.append(D("CellIdCollision", "a vertex and an edge share an id", tuple(clash)))
    known = set(vids)
    for v in g.vertices:
        if v.kind not in (EXTREMUM, SADDLE):
            diags.append(D("UnknownKind", f"vertex kind {v.kind!r}", (v.id,)))
    for e in g.edges:
        if any(w not in known for w in e.ends):
            diags.append(D("DanglingEdge", "edge endpoint is not a vertex", (e.id,)))
        elif e.ends[0] == e.ends[1]:
            diags.append(D("SelfLoop", "H cannot be monotone along a loop edge", (e.id,)))
    if diags:
        return diags
    inc = g.incident()
    level = {v.id: v.level for v in g.vertices}
    for v in g.vertices:
        want = 1 if v.kind == EXTREMUM else 3
        if len(inc[v.id]) != want:
            diags.append(D("DegreeError", f"{v.kind} has degree {len(inc[v.id])}, expected {want}", (v.id,)))
    n_ext = sum(v.kind == EXTREMUM for v in g.vertices)
    n_sad = len(g.vertices) - n_ext
    if n_ext - n_sad != 2 - 2 * g.genus:
        diags.append(D("PoincareHopf", f"#extrema - #saddles = {n_ext - n_sad}, expected {2 - 2 * g.genus}"))
    seen: dict[Fraction, str] = {}
    for v in g.vertices:
        if v.level in seen:
            diags.append(D("DuplicateLevel", f"level {v.level} repeated", (seen[v.level], v.id)))
        seen.setdefault(v.level, v.id)
    if g.vertices:
        stack, reached = [g.vertices[0].id], {g.vertices[0].id}
        while stack:
            u = stack.pop()
            for e in inc[u]:
                for w in e.ends:
                    if w not in reached:
                        reached.add(w)
                        stack.append(w)
        if len(reached) != len(g.vertices):
            diags.append(D("Disconnected", "the Reeb graph of a closed surface is connected"))
    if diags:
        return diags
    for v in g.vertices:
        if v.kind != SADDLE:
            continue
        sides = {(level[_other(e, v.id)] > v.level) for e in inc[v.id]}
        if len(sides) == 1:
            diags.append(D("NonMorseSaddle", "all neighbours lie on the same side", (v.id,)))
    return diags


def _other(e: SurfaceEdge, v: str) -> str:
    return e.ends[1] if e.ends[0] == v else e.ends[0]


def _require_valid(g: SurfaceReebGraph) -> None:
    diags = validate_surface(g)
    if diags:
        raise InvalidSurface(diags)


# --------------------------------------------------------------------------
# core graph and disks

@dataclass(frozen=True)
class Disk:
    attachment: str
    boundary_level: Fraction
    vertex_ids: frozenset[str]
    edge_ids: frozenset[str]
    tree: PlaneTree | None  # None when some branch edge lacks a profile
    missing_profiles: tuple[str, ...] = ()

    @property
    def cells(self) -> frozenset[str]:
        return self.vertex_ids | self.edge_ids


@dataclass(frozen=True)
class DiskDecomposition:
    core_vertices: frozenset[str]
    core_edges: frozenset[str]
    disks: tuple[Disk, ...]

    @property
    def core_cells(self) -> frozenset[str]:
        return self.core_vertices | self.core_edges

    def summary(self) -> tuple:
        return (self.core_vertices, self.core_edges,
                tuple(sorted((d.attachment, d.vertex_ids, d.edge_ids) for d in self.disks)))


def core_graph(g: SurfaceReebGraph, order: str = "ascending") -> DiskDecomposition:
    """Strip free ends until none remain and group the stripped cells into disks.

    ``order`` ("ascending" or "descending" by vertex id) only fixes the
    order in which leaves are removed; the result does not depend on it.
    """
    _require_valid(g)
    inc = g.incident()
    degree = {v: len(es) for v, es in inc.items()}
    alive_edges = {e.id for e in g.edges}
    removed: set[str] = set()
    leaves = sorted((v for v, d in degree.items() if d == 1), reverse=(order == "descending"))
    queue = deque(leaves)
    while queue:
        v = queue.popleft()
        if v in removed:
            continue
        removed.add(v)
        for e in inc[v]:
            if e.id in alive_edges:
                alive_edges.discard(e.id)
                w = _other(e, v)
                degree[w] -= 1
                if degree[w] == 1:
                    queue.append(w)
    core_v = frozenset(v.id for v in g.vertices if v.id not in removed)
    if not core_v:
        raise EmptyCore("stripping free ends consumed the whole graph")
    core_e = frozenset(alive_edges)
    level = {v.id: v.level for v in g.vertices}
    kind = {v.id: v.kind for v in g.vertices}

    disks = []
    for s in sorted(core_v):
        for root in sorted((e for e in inc[s] if e.id not in core_e), key=lambda e: e.id):
            disks.append(_disk_from_branch(s, root, inc, level, kind))
    return DiskDecomposition(core_v, core_e, tuple(disks))


def _disk_from_branch(s, root: SurfaceEdge, inc, level, kind) -> Disk:
    base = level[s]
    nodes, edges, missing = [], [], []
    vids, eids = set(), set()
    stack = [(root, s)]
    while stack:
        e, outer = stack.pop()
        u = _other(e, outer)
        vids.add(u)
        eids.add(e.id)
        nodes.append(Node(u, kind[u], level[u] - base))
        if e.profile is None:
            missing.append(e.id)
        else:
            edges.append(TreeEdge(e.id, e.profile, e.level_at_lo - base, u, None if outer == s else outer))
        for f in inc[u]:
            if f.id != e.id:
                stack.append((f, u))
    tree = None
    if not missing:
        tree = PlaneTree(tuple(sorted(nodes, key=lambda n: n.id)), tuple(sorted(edges, key=lambda e: e.id)))
    return Disk(s, base, frozenset(vids), frozenset(eids), tree, tuple(sorted(missing)))


# --------------------------------------------------------------------------
# invariants

def nu_surface(g: SurfaceReebGraph) -> Fraction:
    """``max`` over disks of boundary level plus the disk's invariant."""
    dec = core_graph(g)
    best = None
    for d in dec.disks:
        if d.tree is None:
            raise ValidationFailed(
                [Diagnostic("MissingProfile", "disk edges need profile data", d.missing_profiles)], "surface graph")
        v = d.boundary_level + nu_recursive(d.tree)
        best = v if best is None else max(best, v)
    if best is None:
        raise EmptyCore("no disks in the decomposition")
    return best


def zeta(g: SurfaceReebGraph) -> Fraction:
    dec = core_graph(g)
    level = {v.id: v.level for v in g.vertices}
    return max(level[v] for v in dec.core_vertices)


def superlevel_cells(g: SurfaceReebGraph, h0) -> frozenset[str]:
    """Cells meeting ``{H > h0}``: vertices above h0 and edges with an end above h0."""
    h0 = Q(h0)
    level = {v.id: v.level for v in g.vertices}
    cells = {v for v, lv in level.items() if lv > h0}
    cells |= {e.id for e in g.edges if max(level[w] for w in e.ends) > h0}
    return frozenset(cells)


def zeta_scan(g: SurfaceReebGraph, thresholds: Iterable) -> Fraction:
    """Smallest level whose superlevel set avoids every core cell.

    The thresholds are scanned in increasing order; inside the bracket
    (last failing, first clearing] the answer is refined over the critical
    levels.  A :class:`CoarseWarning` is issued when the thresholds do not
    bracket the answer.
    """
    ts = sorted(Q(t) for t in thresholds)
    if not ts:
        raise ValueError("zeta_scan needs at least one threshold")
    core = core_graph(g).core_cells

    def clears(h) -> bool:
        return not (superlevel_cells(g, h) & core)

    results = [clears(t) for t in ts]
    if results[0]:
        warnings.warn(CoarseWarning("the lowest threshold already clears the core"), stacklevel=2)
        return ts[0]
    criticals = sorted(v.level for v in g.vertices)
    if not any(results):
        warnings.warn(CoarseWarning("no threshold clears the core; refining above the largest"), stacklevel=2)
        lo, hi = ts[-1], None
    else:
        i = results.index(True)
        lo, hi = ts[i - 1], ts[i]
    for c in criticals:
        if c > lo and (hi is None or c < hi) and clears(c):
            return c
    return hi


def heavy(g: SurfaceReebGraph, cells: Iterable[str]) -> bool:
    x = _check_cells(g, cells)
    return bool(x & core_graph(g).core_cells)


def superheavy(g: SurfaceReebGraph, cells: Iterable[str]) -> bool:
    x = _check_cells(g, cells)
    return core_graph(g).core_cells <= x


def _check_cells(g: SurfaceReebGraph, cells: Iterable[str]) -> frozenset[str]:
    x = frozenset(cells)
    unknown = sorted(x - g.cells)
    if unknown:
        raise UnknownCell(f"unknown cells: {', '.join(unknown)}")
    return x


def dispersion_check(g: SurfaceReebGraph) -> tuple[Fraction, Fraction]:
    """``(max over core of level^2, max(zeta(H)^2, zeta(-H)^2))``; both sides agree."""
    dec = core_graph(g)
    level = {v.id: v.level for v in g.vertices}
    lhs = max(level[v] ** 2 for v in dec.core_vertices)
    rhs = max(zeta(g) ** 2, zeta(negate_surface(g)) ** 2)
    return lhs, rhs


# --------------------------------------------------------------------------
# transformations

def negate_surface(g: SurfaceReebGraph) -> SurfaceReebGraph:
    vs = tuple(replace(v, level=-v.level) for v in g.vertices)
    es = tuple(
        e if e.profile is None else replace(
            e, profile=RhoProfile(tuple((a, -r) for a, r in e.profile.breakpoints)), level_at_lo=-e.level_at_lo)
        for e in g.edges
    )
    return SurfaceReebGraph(g.genus, vs, es)


def shift_surface(g: SurfaceReebGraph, r) -> SurfaceReebGraph:
    r = Q(r)
    vs = tuple(replace(v, level=v.level + r) for v in g.vertices)
    es = tuple(e if e.profile is None else replace(e, level_at_lo=e.level_at_lo + r) for e in g.edges)
    return SurfaceReebGraph(g.genus, vs, es)


def rescale_disk_areas(g: SurfaceReebGraph, factor) -> SurfaceReebGraph:
    """Multiply areas on profiled edges by ``factor`` (rho by its inverse), keeping levels."""
    lam = Q(factor)
    es = tuple(
        e if e.profile is None else replace(
            e, profile=RhoProfile(tuple((a * lam, r / lam) for a, r in e.profile.breakpoints)))
        for e in g.edges
    )
    return SurfaceReebGraph(g.genus, g.vertices, es)

"""Plane trees from sampled scalar fields.

A compactly supported field sampled on a rectangular grid is turned into a
:class:`~unlinked.morse_tree.PlaneTree` in three steps:

1. the contour tree of the field on the Freudenthal triangulation of the
   grid, with the outer zero region collapsed to a single root vertex;
2. per-edge area-vs-level samples obtained by counting cells;
3. a piecewise-linear rho fitted by differences and rationalized.

Equal samples are ordered by ``(value, row-major index)`` so the result is
deterministic.
"""
from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import ndimage

from .errors import CoarseWarning, Diagnostic, NonMorseGrid, ValidationFailed
from .morse_tree import EXTREMUM, SADDLE, PlaneTree, make_tree, validate_tree, InvalidTree

MAGIC = b"UNLK"
HEADER = struct.Struct("<4sIIf")
# Freudenthal neighbours: 4-neighbours plus one diagonal
OFFSETS = ((0, 1), (1, 0), (1, 1))
COARSE_LEVELS = 8
ROOT = "Y"
# dyadic quanta keep every exact sum on a fixed grid (bounded denominators)
AREA_BITS = 40
RHO_BITS = 20


def _dyadic(x: float, bits: int) -> Fraction:
    return Fraction(round(x * (1 << bits)), 1 << bits)


@dataclass(frozen=True)
class ScalarGrid:
    width: int
    height: int
    spacing: float
    values: np.ndarray = field(repr=False)  # shape (height, width)

    @classmethod
    def of(cls, values, spacing: float) -> "ScalarGrid":
        v = np.asarray(values, dtype=float)
        if v.ndim != 2:
            raise ValidationFailed([Diagnostic("BadShape", f"expected a 2-D array, got {v.ndim}-D")], "grid")
        return cls(v.shape[1], v.shape[0], float(spacing), v)

    @property
    def cell_area(self) -> Fraction:
        return _dyadic(self.spacing ** 2, AREA_BITS)


def validate_grid(g: ScalarGrid) -> list[Diagnostic]:
    D = Diagnostic
    out = []
    v = g.values
    if v.shape != (g.height, g.width):
        out.append(D("BadShape", f"values have shape {v.shape}, header says {(g.height, g.width)}"))
        return out
    if g.width < 3 or g.height < 3:
        out.append(D("TooSmall", "need at least 3 x 3 samples"))
        return out
    if not (g.spacing > 0 and math.isfinite(g.spacing)):
        out.append(D("BadSpacing", f"spacing {g.spacing} must be positive"))
    if not np.all(np.isfinite(v)):
        out.append(D("NonFinite", "values must be finite"))
    ring = np.concatenate([v[0], v[-1], v[:, 0], v[:, -1]])
    if np.any(ring != 0):
        out.append(D("NonZeroBoundary", "the outer ring of samples must be identically 0"))
    return out


def _require_grid(g: ScalarGrid) -> None:
    diags = validate_grid(g)
    if diags:
        raise ValidationFailed(diags, "grid")


# --------------------------------------------------------------------------
# file formats

def read_grid_csv(path) -> ScalarGrid:
    """``width,height,spacing`` on the first line, then one row of samples per line."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValidationFailed([Diagnostic("Empty", "no header line")], "grid")
    try:
        w, h, s = lines[0].split(",")
        w, h, s = int(w), int(h), float(s)
        rows = [[float(x) for x in ln.split(",")] for ln in lines[1:]]
    except ValueError as exc:
        raise ValidationFailed([Diagnostic("Malformed", str(exc))], "grid") from None
    if len(rows) != h or any(len(r) != w for r in rows):
        raise ValidationFailed([Diagnostic("BadShape", f"expected {h} rows of {w} values")], "grid")
    return ScalarGrid(w, h, s, np.array(rows, dtype=float).reshape(h, w))


def write_grid_csv(g: ScalarGrid, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{g.width},{g.height},{format(g.spacing, '.17g')}\n")
        for row in g.values:
            fh.write(",".join(format(float(x), ".17g") for x in row) + "\n")


def read_grid_binary(path) -> ScalarGrid:
    """16-byte header (``UNLK``, u32 width, u32 height, f32 spacing) then f32 samples, little-endian."""
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise ValidationFailed([Diagnostic("Truncated", "file shorter than the header")], "grid")
    magic, w, h, s = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValidationFailed([Diagnostic("BadMagic", f"expected {MAGIC!r}, got {magic!r}")], "grid")
    body = raw[HEADER.size:]
    if len(body) != 4 * w * h:
        raise ValidationFailed([Diagnostic("Truncated", f"expected {w * h} samples")], "grid")
    vals = np.frombuffer(body, dtype="<f4").astype(float).reshape(h, w)
    return ScalarGrid(w, h, float(s), vals)


def write_grid_binary(g: ScalarGrid, path) -> None:
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, g.width, g.height, g.spacing))
        fh.write(np.asarray(g.values, dtype="<f4").tobytes())


def load_grid(path) -> ScalarGrid:
    with open(path, "rb") as fh:
        head = fh.read(4)
    return read_grid_binary(path) if head == MAGIC else read_grid_csv(path)


# --------------------------------------------------------------------------
# contour tree

@dataclass(frozen=True)
class ContourNode:
    id: str
    cell: int          # row-major index, -1 for the collapsed boundary
    value: float
    kind: str          # "root", EXTREMUM or SADDLE


@dataclass
class ContourTreeEdge:
    """Arc from ``inner`` (away from the boundary) to ``outer``.

    ``values`` holds the cells of the arc, sorted, including its inner
    critical cell; ``below`` counts every cell enclosed by the arc's
    innermost contour.
    """

    id: str
    inner: str
    outer: str
    inner_value: float
    outer_value: float
    values: np.ndarray
    below: int

    @property
    def rising_inward(self) -> bool:
        return self.inner_value > self.outer_value

    def count_inside(self, level: float) -> int:
        if self.rising_inward:
            k = len(self.values) - np.searchsorted(self.values, level, side="right")
        else:
            k = np.searchsorted(self.values, level, side="left")
        return self.below + int(k)

    @property
    def total(self) -> int:
        return self.below + len(self.values)

    def samples(self, n_levels: int, cell_area: float = 1.0) -> list[tuple[float, float]]:
        """``(level, enclosed area)`` at ``n_levels + 1`` evenly spaced levels, inner end first."""
        lv = np.linspace(self.inner_value, self.outer_value, n_levels + 1)
        out = [(float(lv[0]), self.below * cell_area)]
        out += [(float(x), self.count_inside(x) * cell_area) for x in lv[1:-1]]
        out.append((float(lv[-1]), self.total * cell_area))
        return out


@dataclass
class ContourTree:
    nodes: dict[str, ContourNode]
    edges: list[ContourTreeEdge]
    cell_area: Fraction

    def children(self, node_id: str) -> list[ContourTreeEdge]:
        return [e for e in self.edges if e.outer == node_id]

    def parent(self, node_id: str) -> ContourTreeEdge:
        return next(e for e in self.edges if e.inner == node_id)

    @property
    def leaves(self) -> list[str]:
        return [n.id for n in self.nodes.values() if n.kind == EXTREMUM]

    @property
    def saddles(self) -> list[str]:
        return [n.id for n in self.nodes.values() if n.kind == SADDLE]


class _DSU:
    def __init__(self, n: int):
        self.p = list(range(n))

    def find(self, x: int) -> int:
        p = self.p
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root


def _graph(g: ScalarGrid):
    """Vertices (support cells plus the collapsed boundary) and Freudenthal adjacency."""
    v = g.values
    h, w = v.shape
    structure = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]])
    labels, _ = ndimage.label(v == 0, structure=structure)
    outer = labels == labels[0, 0]
    cells = np.flatnonzero(~outer.ravel())
    n = len(cells)
    vid = np.full(h * w, n, dtype=np.int64)      # boundary region maps to vertex n
    vid[cells] = np.arange(n)
    ids = vid.reshape(h, w)
    us, ws = [], []
    for dr, dc in OFFSETS:
        a = ids[: h - dr, : w - dc].ravel()
        b = ids[dr:, dc:].ravel()
        keep = a != b
        us.append(a[keep])
        ws.append(b[keep])
    u = np.concatenate(us)
    x = np.concatenate(ws)
    pairs = np.unique(np.stack([np.minimum(u, x), np.maximum(u, x)], axis=1), axis=0)
    values = np.append(v.ravel()[cells], 0.0)
    index = np.append(cells, -1)
    order = np.lexsort((index, values))
    rank = np.empty(n + 1, dtype=np.int64)
    rank[order] = np.arange(n + 1)
    nbrs: list[list[int]] = [[] for _ in range(n + 1)]
    for a, b in pairs.tolist():
        nbrs[a].append(b)
        nbrs[b].append(a)
    return cells, values, rank.tolist(), order.tolist(), nbrs


def _merge_tree(order, rank, nbrs, descending: bool):
    """Join tree (descending) or split tree (ascending) as ``(toward, away)`` maps."""
    n = len(order)
    dsu = _DSU(n)
    extreme = list(range(n))   # per component root: the most recently swept vertex
    toward = [-1] * n          # single neighbour in sweep direction
    away: list[list[int]] = [[] for _ in range(n)]
    seq = reversed(order) if descending else order
    for v in seq:
        rv = v
        for u in nbrs[v]:
            if (rank[u] > rank[v]) != descending:
                continue
            ru = dsu.find(u)
            rv = dsu.find(v)
            if ru == rv:
                continue
            e = extreme[ru]
            toward[e] = v
            away[v].append(e)
            dsu.p[ru] = rv
        extreme[dsu.find(v)] = v
    return toward, away


def _contour_arcs(order, rank, nbrs) -> list[list[int]]:
    n = len(order)
    jt_down, jt_up = _merge_tree(order, rank, nbrs, descending=True)
    st_up, st_down = _merge_tree(order, rank, nbrs, descending=False)
    jt_up = [set(x) for x in jt_up]
    st_down = [set(x) for x in st_down]
    adj: list[list[int]] = [[] for _ in range(n)]
    alive = [True] * n
    queue = [x for x in range(n) if (not jt_up[x] and len(st_down[x]) == 1) or (not st_down[x] and len(jt_up[x]) == 1)]
    left = n
    while queue and left > 1:
        x = queue.pop()
        if not alive[x]:
            continue
        if not jt_up[x] and len(st_down[x]) == 1:
            y = jt_down[x]
            jt_up[y].discard(x)
            (d,) = st_down[x]
            u = st_up[x]
            st_up[d] = u
            if u >= 0:
                st_down[u].discard(x)
                st_down[u].add(d)
            cand = (y, d)
        elif not st_down[x] and len(jt_up[x]) == 1:
            y = st_up[x]
            st_down[y].discard(x)
            (d,) = jt_up[x]
            u = jt_down[x]
            jt_down[d] = u
            if u >= 0:
                jt_up[u].discard(x)
                jt_up[u].add(d)
            cand = (y, d)
        else:
            continue
        adj[x].append(y)
        adj[y].append(x)
        alive[x] = False
        left -= 1
        for c in cand:
            if c >= 0 and alive[c] and ((not jt_up[c] and len(st_down[c]) == 1) or (not st_down[c] and len(jt_up[c]) == 1)):
                queue.append(c)
    if left != 1:
        raise NonMorseGrid("contour tree merge did not terminate; the sampled domain is not simply connected")
    return adj


def contour_tree(g: ScalarGrid) -> ContourTree:
    """Contour tree of the sampled field, rooted at the collapsed zero boundary."""
    _require_grid(g)
    cells, values, rank, order, nbrs = _graph(g)
    n = len(cells)
    root_node = ContourNode(ROOT, -1, 0.0, "root")
    if n == 0:
        return ContourTree({ROOT: root_node}, [], g.cell_area)
    adj = _contour_arcs(order, rank, nbrs)
    if len(adj[n]) != 1:
        raise NonMorseGrid(f"the support boundary meets {len(adj[n])} arcs; expected one")
    for x in range(n):
        d = len(adj[x])
        if d > 3:
            raise NonMorseGrid(f"cell {int(cells[x])} has contour-tree degree {d}")
        if d == 2:
            a, b = adj[x]
            if (rank[a] > rank[x]) == (rank[b] > rank[x]):
                raise NonMorseGrid(f"cell {int(cells[x])} is a degenerate critical cell")

    nodes = {ROOT: root_node}
    names = {n: ROOT}
    counters = {EXTREMUM: 0, SADDLE: 0}

    def name(x: int) -> str:
        if x not in names:
            kind = EXTREMUM if len(adj[x]) == 1 else SADDLE
            prefix = ("max" if rank[x] > rank[adj[x][0]] else "min") if kind == EXTREMUM else "s"
            key = kind if kind == SADDLE else prefix
            counters[key] = counters.get(key, 0) + 1
            names[x] = f"{prefix}{counters[key] - 1}"
            nodes[names[x]] = ContourNode(names[x], int(cells[x]), float(values[x]), kind)
        return names[x]

    # walk outward-in from the root; collect chains of regular cells
    raw = []   # (inner vertex, outer vertex, chain values)
    stack = [(n, adj[n][0])]
    while stack:
        outer, cur = stack.pop()
        prev, chain = outer, []
        while len(adj[cur]) == 2:
            chain.append(values[cur])
            nxt = adj[cur][0] if adj[cur][1] == prev else adj[cur][1]
            prev, cur = cur, nxt
        chain.append(values[cur])   # the inner critical cell belongs to this arc
        raw.append((cur, outer, chain))
        for nb in sorted(adj[cur], key=lambda z: int(cells[z]) if z < n else -1):
            if nb != prev:
                stack.append((cur, nb))
    # children before parents for the enclosed-cell counts; deterministic names outer to inner
    for inner, outer, _ in raw:
        name(inner)
    below: dict[int, int] = {}
    kids: dict[int, list] = {}
    for inner, outer, chain in raw:
        kids.setdefault(outer, []).append((inner, chain))

    def total_below(x: int) -> int:
        if x not in below:
            below[x] = sum(total_below(c) + len(ch) for c, ch in kids.get(x, ()))
        return below[x]

    edges = []
    for i, (inner, outer, chain) in enumerate(raw):
        edges.append(ContourTreeEdge(f"e{i}", names[inner], names[outer], float(values[inner]),
                                     float(values[outer]), np.sort(np.array(chain, dtype=float)),
                                     total_below(inner)))
    return ContourTree(nodes, edges, g.cell_area)


def prune(ct: ContourTree, eps: float) -> ContourTree:
    """Drop leaf arcs whose level span is below ``eps`` and merge the freed saddles."""
    if eps <= 0:
        return ct
    nodes = dict(ct.nodes)
    edges = list(ct.edges)
    while True:
        victims = [e for e in edges if nodes[e.inner].kind == EXTREMUM and nodes[e.outer].kind == SADDLE
                   and abs(e.inner_value - e.outer_value) < eps]
        if not victims:
            break
        e = min(victims, key=lambda x: (abs(x.inner_value - x.outer_value), x.id))
        s = nodes[e.outer]
        edges.remove(e)
        del nodes[e.inner]
        (sib,) = [x for x in edges if x.outer == s.id]
        par = next(x for x in edges if x.inner == s.id)
        # pruned cells and the saddle cell join the merged arc at the saddle level
        extra = np.full(e.total, s.value)
        merged = ContourTreeEdge(par.id, sib.inner, par.outer, sib.inner_value, par.outer_value,
                                 np.sort(np.concatenate([sib.values, extra, par.values])), sib.below)
        edges = [x for x in edges if x is not sib and x is not par] + [merged]
        del nodes[s.id]
    return ContourTree(nodes, edges, ct.cell_area)


# --------------------------------------------------------------------------
# profile estimation

def _edge_profile(e: ContourTreeEdge, n_levels: int, cell_area: Fraction, inner_is_leaf: bool, bits: int):
    ca = float(cell_area)
    pts = e.samples(n_levels, ca)
    # keep one sample per distinct area count
    levels = [pts[0][0]]
    counts = [e.below]
    for lv, _ in pts[1:-1]:
        c = e.count_inside(lv)
        if c > counts[-1] and c < e.total:
            counts.append(c)
            levels.append(lv)
    counts.append(e.total)
    levels.append(pts[-1][0])
    areas = np.array(counts, dtype=float) * ca
    lv = np.array(levels)
    m = len(areas)
    rho = np.empty(m)
    if m == 2:
        rho[:] = (lv[1] - lv[0]) / (areas[1] - areas[0])
    else:
        rho[1:-1] = (lv[2:] - lv[:-2]) / (areas[2:] - areas[:-2])
        rho[0] = (lv[1] - lv[0]) / (areas[1] - areas[0])
        rho[-1] = 0.0
    rho[-1] = 0.0
    if not inner_is_leaf:
        rho[0] = 0.0
    sign = -1.0 if e.rising_inward else 1.0
    floor_ = 2.0 ** -bits
    interior = slice(0 if inner_is_leaf else 1, m - 1)
    rho[interior] = sign * np.maximum(sign * rho[interior], floor_)
    qa = [Fraction(int(c)) * cell_area for c in counts]
    qr = [_dyadic(float(r), bits) for r in rho]
    qr[-1] = Fraction(0)
    if not inner_is_leaf:
        qr[0] = Fraction(0)
    # avoid flat nonzero-integer pieces, which would carry a whole circle of fixed points
    for i in range(len(qr) - 1):
        if qr[i] == qr[i + 1] and qr[i] != 0 and qr[i].denominator == 1:
            qr[i + 1] += Fraction(int(sign), 1 << bits)
    return list(zip(qa, qr))


def estimate_profiles(ct: ContourTree, n_levels: int = 256, rho_bits: int = RHO_BITS) -> PlaneTree:
    """Fit a rational PL rho on every contour-tree edge and assemble a validated tree.

    Rho values are rounded to multiples of ``2**-rho_bits``.  Node levels
    come from integrating the fitted profiles from the boundary inward, so
    the tree is consistent by construction.
    """
    if n_levels < 2:
        raise ValueError("n_levels must be at least 2")
    if n_levels < COARSE_LEVELS:
        warnings.warn(f"n_levels = {n_levels} gives a coarse profile; expect large errors", CoarseWarning, stacklevel=2)
    if not ct.edges:
        return PlaneTree()
    from .profile import RhoProfile, level_span

    profs = {}
    for e in ct.edges:
        leaf = ct.nodes[e.inner].kind == EXTREMUM
        profs[e.id] = _edge_profile(e, n_levels, ct.cell_area, leaf, rho_bits)
    # top-down levels
    node_level = {ROOT: Fraction(0)}
    by_outer: dict[str, list[ContourTreeEdge]] = {}
    for e in ct.edges:
        by_outer.setdefault(e.outer, []).append(e)
    edges_out, nodes_out = [], []
    stack = [ROOT]
    while stack:
        o = stack.pop()
        for e in sorted(by_outer.get(o, ()), key=lambda x: x.id):
            span = level_span(RhoProfile.of(profs[e.id]))
            lo = node_level[o] - span
            node_level[e.inner] = lo
            nodes_out.append((e.inner, ct.nodes[e.inner].kind, lo))
            edges_out.append((e.id, profs[e.id], lo, e.inner, None if o == ROOT else o))
            stack.append(e.inner)
    t = make_tree(nodes_out, edges_out)
    diags = validate_tree(t)
    if diags:
        raise InvalidTree(diags)
    return t


def ingest(g: ScalarGrid, n_levels: int = 256, prune_eps: float = 0.0, rho_bits: int = RHO_BITS) -> PlaneTree:
    return estimate_profiles(prune(contour_tree(g), prune_eps), n_levels, rho_bits)


# --------------------------------------------------------------------------
# synthetic fields

def _level_curve(profile_points, level_at_lo):
    """Vectorized ``a -> level`` for a PL rho profile (floats)."""
    xs = np.array([float(x) for x, _ in profile_points])
    ys = np.array([float(y) for _, y in profile_points])
    slopes = np.diff(ys) / np.diff(xs)
    cum = np.concatenate([[0.0], np.cumsum((ys[:-1] + ys[1:]) / 2 * np.diff(xs))])
    l0 = float(level_at_lo)

    def f(a):
        a = np.clip(a, xs[0], xs[-1])
        i = np.clip(np.searchsorted(xs, a, side="right") - 1, 0, len(xs) - 2)
        d = a - xs[i]
        return l0 + cum[i] + ys[i] * d + slopes[i] * d * d / 2
    return f


def _square(n: int, side: float):
    spacing = side / n
    c = (np.arange(n) + 0.5) * spacing - side / 2
    x, y = np.meshgrid(c, c)
    return x, y, spacing


def rasterize_radial(tree: PlaneTree, n: int, side: float | None = None) -> ScalarGrid:
    """Sample a one-extremum tree as a radial field centred in an ``n`` x ``n`` grid."""
    e = tree.root_edge
    total = float(e.area_hi)
    radius = math.sqrt(total / math.pi)
    side = side if side is not None else 2.5 * radius
    x, y, spacing = _square(n, side)
    a = math.pi * (x * x + y * y)
    f = _level_curve(e.profile.breakpoints, e.level_at_lo)
    v = np.where(a < total, f(a), 0.0)
    v[0], v[-1], v[:, 0], v[:, -1] = 0, 0, 0, 0
    return ScalarGrid.of(v, spacing)


def _union_area(t, r0: float, r1: float):
    """Area of the union of two disks of radii ``r0 + t``, ``r1 + t`` whose centres are ``r0 + r1`` apart."""
    R0, R1, d = r0 + t, r1 + t, r0 + r1
    c0 = np.clip((d * d + R0 * R0 - R1 * R1) / (2 * d * R0), -1, 1)
    c1 = np.clip((d * d + R1 * R1 - R0 * R0) / (2 * d * R1), -1, 1)
    lens = R0 * R0 * np.arccos(c0) + R1 * R1 * np.arccos(c1) - 0.5 * np.sqrt(
        np.clip((-d + R0 + R1) * (d + R0 - R1) * (d - R0 + R1) * (d + R0 + R1), 0, None))
    return math.pi * (R0 * R0 + R1 * R1) - lens


def rasterize_two_peaks(tree: PlaneTree, n: int) -> ScalarGrid:
    """Sample a one-saddle, two-leaf tree.

    The two inner disks touch at a point; outer level sets are the parallel
    sets of their union, whose area has a closed form.
    """
    root = tree.root_edge
    kids = tree.child_edges(root.inner)
    if len(kids) != 2 or any(tree.child_edges(k.inner) for k in kids):
        raise ValueError("expected a tree with one saddle and two leaves")
    k0, k1 = kids
    r0 = math.sqrt(float(k0.area_hi) / math.pi)
    r1 = math.sqrt(float(k1.area_hi) / math.pi)
    total = float(root.area_hi)
    lo, hi = 0.0, 2.0 * math.sqrt(total / math.pi)
    for _ in range(200):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if _union_area(mid, r0, r1) < total else (lo, mid)
    tmax = hi
    width = 2 * (r0 + r1 + tmax)
    side = 1.15 * width
    x, y, spacing = _square(n, side)
    cx0, cx1 = -(r0 + r1) / 2 - (r0 - r1) / 2, (r0 + r1) / 2 - (r0 - r1) / 2
    d0 = np.hypot(x - cx0, y)
    d1 = np.hypot(x - cx1, y)
    f0 = _level_curve(k0.profile.breakpoints, k0.level_at_lo)
    f1 = _level_curve(k1.profile.breakpoints, k1.level_at_lo)
    fb = _level_curve(root.profile.breakpoints, root.level_at_lo)
    t = np.minimum(d0 - r0, d1 - r1)
    v = np.zeros_like(x)
    in0, in1 = d0 < r0, d1 < r1
    v[in0] = f0(math.pi * d0[in0] ** 2)
    v[in1] = f1(math.pi * d1[in1] ** 2)
    out = ~(in0 | in1) & (t < tmax)
    v[out] = fb(float(root.area_lo) + _union_area(t[out], r0, r1) - math.pi * (r0 * r0 + r1 * r1))
    v[0], v[-1], v[:, 0], v[:, -1] = 0, 0, 0, 0
    return ScalarGrid.of(v, spacing)

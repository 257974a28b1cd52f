"""Seeded random model generators for property tests and benchmarks."""
from __future__ import annotations

import random
from fractions import Fraction

from .morse_tree import EXTREMUM, SADDLE, PlaneTree, make_tree, spectrum, validate_tree
from .profile import RhoProfile, level_span

F = Fraction


def _shape(rng: random.Random, depth: int, max_depth: int, p_split: float):
    if depth >= max_depth or rng.random() > p_split:
        return None
    return (_shape(rng, depth + 1, max_depth, p_split * 0.7), _shape(rng, depth + 1, max_depth, p_split * 0.7))


def _rho_points(rng: random.Random, lo: Fraction, hi: Fraction, sign: int, start_zero: bool, max_rho: int):
    n_inner = rng.randint(1, 3)
    cuts = sorted({lo + (hi - lo) * F(rng.randint(1, 15), 16) for _ in range(n_inner)})
    pts = []
    if start_zero:
        pts.append((lo, F(0)))
    else:
        pts.append((lo, sign * F(rng.randint(1, 4 * max_rho), 4)))
    for c in cuts:
        pts.append((c, sign * F(rng.randint(1, 4 * max_rho), 4)))
    pts.append((hi, F(0)))
    return pts


def random_tree(rng: random.Random, max_depth: int = 4, max_negative: int = 12, max_rho: int = 3,
                p_split: float = 0.8, tries: int = 200) -> PlaneTree:
    """A valid random tree with at most ``max_negative`` negative non-trivial fixed points."""
    for _ in range(tries):
        t = _attempt(rng, max_depth, max_rho, p_split)
        if t is None or validate_tree(t):
            continue
        neg = sum(1 for s in spectrum(t) if s.kind != "trivial" and s.negative)
        if neg <= max_negative:
            return t
    raise RuntimeError("could not generate a tree with the requested bounds")


def _attempt(rng: random.Random, max_depth: int, max_rho: int, p_split: float) -> PlaneTree:
    shape = _shape(rng, 1, max_depth, p_split)
    nodes: list = []
    edges: list = []

    def size(sh) -> Fraction:
        if sh is None:
            return F(rng.randint(1, 8), 8)
        return size(sh[0]) + size(sh[1]) + F(rng.randint(1, 8), 8)

    def build(sh, total: Fraction, outer_id, outer_level: Fraction, sign: int, name: str) -> None:
        # ``sign`` is the sign of rho on this edge; -1 means H rises inward
        if sh is None:
            pts = _rho_points(rng, F(0), total, sign, rng.random() < 0.15, max_rho)
            level = outer_level - level_span(RhoProfile.of(pts))
            nid = "m" + name
            nodes.append((nid, EXTREMUM, level))
            edges.append(("e" + name, pts, level, nid, outer_id))
            return
        ring = total * F(rng.randint(1, 6), 8)
        rest = total - ring
        a0 = rest * F(rng.randint(1, 7), 8)
        # a Morse saddle cannot have both inner annuli turning against the outer one
        c0, c1 = rng.choice([(sign, sign), (sign, -sign), (-sign, sign)])
        pts = _rho_points(rng, rest, total, sign, True, max_rho)
        level = outer_level - level_span(RhoProfile.of(pts))
        nid = "s" + name
        nodes.append((nid, SADDLE, level))
        edges.append(("e" + name, pts, level, nid, outer_id))
        build(sh[0], a0, nid, level, c0, name + "0")
        build(sh[1], rest - a0, nid, level, c1, name + "1")

    build(shape, size(shape), None, F(0), rng.choice([-1, 1]), "")
    return make_tree(nodes, edges)


def random_simple_bump(rng: random.Random) -> PlaneTree:
    """A radial mountain whose rho decreases from 0 to a minimum below -2, then rises to 0."""
    area = F(rng.randint(2, 12), 4)
    a0 = area * F(rng.randint(1, 7), 8)
    depth = F(rng.randint(9, 24), 4)
    pts = [(F(0), F(0))]
    # optional extra breakpoints keep each side strictly monotone
    if rng.random() < 0.5:
        x = a0 * F(rng.randint(1, 3), 4)
        pts.append((x, -depth * F(rng.randint(1, 3), 4)))
        if pts[-1][1] <= -depth:
            pts.pop()
    pts.append((a0, -depth))
    if rng.random() < 0.5:
        x = a0 + (area - a0) * F(rng.randint(1, 3), 4)
        pts.append((x, -depth * F(rng.randint(1, 3), 4)))
    pts.append((area, F(0)))
    prof = RhoProfile.of(pts)
    top = -level_span(prof)
    return make_tree([("max", EXTREMUM, top)], [("e0", prof.breakpoints, top, "max", None)])


def random_surface(rng: random.Random, genus: int | None = None, extra_vertices: int = 2,
                   with_disk_trees: bool = True, tries: int = 500):
    """A valid random Reeb graph of genus 1..3.

    The core is a cycle with ``genus - 1`` chords; every core vertex of core
    degree two receives a random disk on the side that makes it a saddle.
    """
    from .models import hang_tree
    from .reeb_surface import make_surface, validate_surface

    genus = genus if genus is not None else rng.randint(1, 3)
    for _ in range(tries):
        ring = rng.randint(2, 3)
        names = [f"v{i}" for i in range(ring)]
        cedges = [(names[i], names[(i + 1) % ring]) for i in range(ring)]
        nid = ring

        def subdivide() -> str:
            nonlocal nid
            i = rng.randrange(len(cedges))
            a, b = cedges.pop(i)
            x = f"v{nid}"
            nid += 1
            names.append(x)
            cedges.extend([(a, x), (x, b)])
            return x

        for _ in range(genus - 1):
            x = subdivide()
            y = subdivide()
            cedges.append((x, y))
        for _ in range(rng.randint(0, extra_vertices)):
            subdivide()
        levels = {v: F(rng.randint(-40, 40), rng.choice([1, 2, 3, 4])) for v in names}
        if len(set(levels.values())) != len(levels):
            continue
        nbrs: dict[str, list[str]] = {v: [] for v in names}
        for a, b in cedges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        verts = [(v, SADDLE, levels[v]) for v in names]
        edges = [(f"c{i}", a, b) for i, (a, b) in enumerate(cedges)]
        ok = True
        for v in names:
            above = {levels[w] > levels[v] for w in nbrs[v]}
            if len(nbrs[v]) == 3:
                if len(above) == 1:
                    ok = False
                    break
                continue
            # core degree two: the disk must go opposite to the neighbours (or anywhere if mixed)
            if above == {True}:
                sign = 1
            elif above == {False}:
                sign = -1
            else:
                sign = rng.choice([-1, 1])
            if with_disk_trees:
                tree = random_tree_with_sign(rng, sign, max_depth=2)
            else:
                tree = random_tree_with_sign(rng, sign, max_depth=1)
            dv, de = hang_tree(tree, v, levels[v], prefix=f"{v}_")
            verts += dv
            edges += de
        if not ok:
            continue
        g = make_surface(genus, verts, edges)
        if not validate_surface(g):
            return g
    raise RuntimeError("could not generate a surface graph")


def random_tree_with_sign(rng: random.Random, sign: int, max_depth: int = 3, tries: int = 200) -> PlaneTree:
    """Random tree whose root annulus has rho of the given sign (-1: H rises inward)."""
    for _ in range(tries):
        t = random_tree(rng, max_depth=max_depth, max_negative=40)
        root = t.root_edge
        from .profile import direction

        if direction(root.profile) == sign:
            return t
    raise RuntimeError("no tree with the requested root sign")

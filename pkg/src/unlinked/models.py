"""Worked example models used by the demos, the CLI and the tests."""
from __future__ import annotations

from fractions import Fraction

from .morse_tree import EXTREMUM, SADDLE, PlaneTree, make_tree

F = Fraction


def single_mountain() -> PlaneTree:
    """``H = f(pi r^2)`` with ``f(s) = (1 - s)^2`` on the unit-area disk."""
    return make_tree(
        [("max", EXTREMUM, 1)],
        [("e0", [(0, -2), (1, 0)], 1, "max", None)],
    )


def double_mountain() -> PlaneTree:
    """Two peaks joined at a saddle of level 1/2 inside a unit-area support.

    Inner disks have areas 3/10 and 1/5; the outer annulus ``b`` dips to
    rotation -2 at area 3/4.
    """
    return make_tree(
        [("s0", SADDLE, F(1, 2)), ("m0", EXTREMUM, F(1, 2) + F(9, 40)), ("m1", EXTREMUM, F(1, 2) + F(3, 25))],
        [
            ("b", [(F(1, 2), 0), (F(3, 4), -2), (1, 0)], F(1, 2), "s0", None),
            ("t0", [(0, F(-3, 2)), (F(3, 10), 0)], F(1, 2) + F(9, 40), "m0", "s0"),
            ("t1", [(0, F(-6, 5)), (F(1, 5), 0)], F(1, 2) + F(3, 25), "m1", "s0"),
        ],
    )


def empty_tree() -> PlaneTree:
    return PlaneTree()


def radial(rho_points, name: str = "max") -> PlaneTree:
    """One-extremum tree from a rotation profile starting at area 0.

    The extremum level is chosen so the boundary sits at level 0.
    """
    from .profile import RhoProfile, level_span

    prof = RhoProfile.of(rho_points)
    top = -level_span(prof)
    kind = EXTREMUM
    return make_tree([(name, kind, top)], [("e0", prof.breakpoints, top, name, None)])


# --------------------------------------------------------------------------
# closed surfaces

def hang_tree(tree: PlaneTree, saddle: str, saddle_level, prefix: str = ""):
    """Vertices and edges placing ``tree`` as a disk on ``saddle``.

    Levels of the tree are read relative to the saddle level.  Returns
    loose tuples accepted by :func:`unlinked.reeb_surface.make_surface`.
    """
    from .rational import Q

    base = Q(saddle_level)
    verts = [(prefix + n.id, n.kind, n.level + base) for n in tree.nodes]
    edges = []
    for e in tree.edges:
        outer = saddle if e.outer is None else prefix + e.outer
        edges.append((prefix + e.id, prefix + e.inner, outer, e.profile.breakpoints, e.level_at_lo + base))
    return verts, edges


def genus2_figure():
    """Genus-two Reeb graph with six essential saddles, seven core annuli and four disks.

    Core saddles sit at levels 1..6; two maxima and two minima hang off the
    four core saddles of core degree two.
    """
    from .reeb_surface import make_surface

    core = [("s3", SADDLE, 1), ("s1", SADDLE, 2), ("s5", SADDLE, 3),
            ("s6", SADDLE, 4), ("s4", SADDLE, 5), ("s2", SADDLE, 6)]
    core_edges = [("c51", "s5", "s1"), ("c16", "s1", "s6"), ("c52", "s5", "s2"), ("c23", "s2", "s3"),
                  ("c36", "s3", "s6"), ("c54", "s5", "s4"), ("c46", "s4", "s6")]
    verts, edges = list(core), list(core_edges)
    for tree, at, lv, pre in [
        (radial([(0, -2), (1, 0)], "M"), "s2", 6, "a_"),       # max at 7
        (radial([(0, -6), (1, 0)], "M2"), "s4", 5, "b_"),      # max at 8
        (radial([(0, 2), (1, 0)], "m"), "s3", 1, "c_"),        # min at 0
        (radial([(0, 3), (1, 0)], "m1"), "s1", 2, "d_"),       # min at 1/2
    ]:
        v, e = hang_tree(tree, at, lv, pre)
        verts += v
        edges += e
    return make_surface(2, verts, edges)


def torus_minimal():
    """Torus with two essential saddles joined by two annuli, a peak and a pit."""
    from .reeb_surface import make_surface

    verts = [("hi", SADDLE, F(1, 2)), ("lo", SADDLE, F(1, 4))]
    edges = [("long", "hi", "lo"), ("mer", "hi", "lo")]
    peak = make_tree([("M", EXTREMUM, F(9, 40))], [("eM", [(0, F(-3, 2)), (F(3, 10), 0)], F(9, 40), "M", None)])
    from .morse_tree import negate

    pit = negate(single_mountain())
    for tree, at, lv, pre in [(peak, "hi", F(1, 2), "p_"), (pit, "lo", F(1, 4), "q_")]:
        v, e = hang_tree(tree, at, lv, pre)
        verts += v
        edges += e
    return make_surface(1, verts, edges)


def torus_four_disks():
    """Torus whose core is a 4-cycle; two peaks with invariants 1/5 and 3/4 sit on
    saddles at 1/2 and 1/4, two pits sit on saddles at -1 and -3."""
    from .morse_tree import negate
    from .reeb_surface import make_surface

    verts = [("sA", SADDLE, F(1, 2)), ("sB", SADDLE, -1), ("sC", SADDLE, F(1, 4)), ("sD", SADDLE, -3)]
    edges = [("cAB", "sA", "sB"), ("cBC", "sB", "sC"), ("cCD", "sC", "sD"), ("cDA", "sD", "sA")]
    t0 = make_tree([("M", EXTREMUM, F(9, 40))], [("eM", [(0, F(-3, 2)), (F(3, 10), 0)], F(9, 40), "M", None)])
    t1 = make_tree([("M", EXTREMUM, F(3, 25))], [("eM", [(0, F(-6, 5)), (F(1, 5), 0)], F(3, 25), "M", None)])
    for tree, at, lv, pre in [(t0, "sA", F(1, 2), "a_"), (single_mountain(), "sC", F(1, 4), "c_"),
                              (negate(single_mountain()), "sB", -1, "b_"), (negate(t1), "sD", -3, "d_")]:
        v, e = hang_tree(tree, at, lv, pre)
        verts += v
        edges += e
    return make_surface(1, verts, edges)

import random
import warnings
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from unlinked.errors import CoarseWarning, InvalidSurface, UnknownCell
from unlinked.generators import random_surface
from unlinked.models import genus2_figure, torus_four_disks, torus_minimal
from unlinked.morse_tree import EXTREMUM, SADDLE
from unlinked.reeb_surface import (core_graph, dispersion_check, heavy, make_surface, negate_surface, nu_surface,
                                   rescale_disk_areas, shift_surface, superheavy, superlevel_cells, validate_surface,
                                   zeta, zeta_scan)


def _radial_nu(top_minus_base, steep):
    """Radial peak with rho = -steep (1 - a) on [0, 1]: min over k of its orbit actions, capped by the top."""
    best = top_minus_base
    for j in range(1, steep):
        a = 1 - F(j, steep)
        best = min(best, F(steep, 2) * (1 - a) ** 2 + j * a)
    return best


def test_genus2_counts():
    dec = core_graph(genus2_figure())
    assert len(dec.core_vertices) == 6
    assert len(dec.core_edges) == 7
    assert len(dec.disks) == 4
    assert dec.summary() == core_graph(genus2_figure(), order="descending").summary()


def test_genus2_invariants():
    g = genus2_figure()
    assert zeta(g) == 6
    # disks: peaks on s2 (level 6) and s4 (level 5), pits on s3 and s1
    expected = max(6 + _radial_nu(F(1), 2), 5 + _radial_nu(F(3), 6), F(1), F(2))
    assert expected == F(27, 4)
    assert nu_surface(g) == expected
    thresholds = [F(2 * k + 1, 2) for k in range(-2, 18)]
    assert zeta_scan(g, thresholds) == 6


def test_torus_models():
    t = torus_minimal()
    assert zeta(t) == F(1, 2)
    assert nu_surface(t) == F(1, 2) + F(1, 5)
    assert zeta(negate_surface(t)) == -F(1, 4)
    four = torus_four_disks()
    assert nu_surface(four) == 1
    assert zeta(four) == F(1, 2)


def test_heaviness_on_torus():
    t = torus_minimal()
    core = core_graph(t).core_cells
    assert heavy(t, ["long"]) and not superheavy(t, ["long"])
    assert superheavy(t, core) and heavy(t, core)
    for d in core_graph(t).disks:
        assert not heavy(t, d.cells) and not superheavy(t, d.cells)
    with pytest.raises(UnknownCell):
        heavy(t, ["nope"])


def test_superlevel_cells():
    t = torus_minimal()
    assert superlevel_cells(t, F(1)) == frozenset()
    assert "hi" in superlevel_cells(t, F(1, 3)) and "lo" not in superlevel_cells(t, F(1, 3))


def test_zeta_scan_warns_when_coarse():
    g = genus2_figure()
    with pytest.warns(CoarseWarning):
        assert zeta_scan(g, [F(100)]) == F(100)
    with pytest.warns(CoarseWarning):
        assert zeta_scan(g, [F(-100)]) == 6


def _codes(g):
    return {d.code for d in validate_surface(g)}


def test_validation_codes():
    assert validate_surface(torus_minimal()) == []
    assert "GenusTooSmall" in _codes(make_surface(0, [("a", SADDLE, 1)], []))
    two = [("a", SADDLE, 1), ("b", SADDLE, 2)]
    assert "SelfLoop" in _codes(make_surface(1, two, [("e", "a", "a"), ("f", "a", "b"), ("g", "b", "b")]))
    assert "DanglingEdge" in _codes(make_surface(1, two, [("e", "a", "zz"), ("f", "a", "b"), ("g", "a", "b")]))
    assert "DuplicateLevel" in _codes(make_surface(1, [("a", SADDLE, 1), ("b", SADDLE, 1)],
                                                   [("e", "a", "b"), ("f", "a", "b")]))
    assert "UnknownKind" in _codes(make_surface(1, [("a", "col", 1), ("b", SADDLE, 2)],
                                                [("e", "a", "b"), ("f", "a", "b")]))
    with pytest.raises(InvalidSurface):
        zeta(make_surface(1, [("a", EXTREMUM, 1)], []))


@given(st.integers(0, 10 ** 6))
def test_random_surface_properties(seed):
    rng = random.Random(seed)
    g = random_surface(rng)
    levels = sorted({v.level for v in g.vertices})
    thresholds = [levels[0] - 1] + [(a + b) / 2 for a, b in zip(levels, levels[1:])] + [levels[-1] + 1]
    z = zeta(g)
    assert zeta_scan(g, thresholds) == z
    assert zeta(shift_surface(g, F(3, 7))) == z + F(3, 7)
    assert zeta(rescale_disk_areas(g, F(5, 2))) == z
    lhs, rhs = dispersion_check(g)
    assert lhs == rhs
    assert core_graph(g).summary() == core_graph(g, "descending").summary()
    # each disk contributes its boundary level plus a nonnegative invariant
    dec = core_graph(g)
    assert nu_surface(g) >= max(d.boundary_level for d in dec.disks)


@given(st.integers(0, 10 ** 6), st.data())
def test_superheavy_implies_heavy(seed, data):
    g = random_surface(random.Random(seed))
    cells = sorted(g.cells)
    pick = data.draw(st.lists(st.sampled_from(cells), max_size=len(cells), unique=True))
    if superheavy(g, pick):
        assert heavy(g, pick)

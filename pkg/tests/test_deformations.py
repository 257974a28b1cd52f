import random
from dataclasses import dataclass
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from unlinked.deformations import (ConstantFamily, LinearFamily, ShiftFamily, SpecialFamily, bifurcation, continue_c,
                                   default_grid, flatten_at_integers, interpolate_trees, radial_spectrum, slope_check,
                                   special_deformation, truncation_data)
from unlinked.errors import Collision, DegenerateProfile, NotInSpectrum, OverlapError, TrackingAmbiguous
from unlinked.models import double_mountain, single_mountain
from unlinked.morse_tree import nu_recursive, validate_tree
from unlinked.profile import RhoProfile
from unlinked.rational import pl_eval, pl_integral

TENT = RhoProfile.of([(3, 0), (F(7, 2), F(5, 2)), (4, 0)])


def _tent_area_above(y, height=F(5, 2), half_width=F(1, 2)):
    """Area of a symmetric tent above level y (closed form)."""
    y = min(max(y, F(0)), height)
    return (height - y) ** 2 / height * half_width


def test_truncation_layers_match_closed_form():
    td = truncation_data(TENT)
    layers = [_tent_area_above(k) - _tent_area_above(k + 1) for k in range(3)]
    assert td.hk == tuple(layers) == (F(4, 5), F(2, 5), F(1, 20))
    assert td.h == F(5, 4) and td.N == 2
    assert td.tau == (1, F(9, 25), F(1, 25), 0)


def test_deformation_hits_truncations_at_schedule():
    td = truncation_data(TENT)
    for k in range(td.N + 1):
        g = special_deformation(td, td.tau[k])
        for x, _ in g.breakpoints:
            assert pl_eval(g.breakpoints, x) == pl_eval(td.gamma[k], x)
    zero = special_deformation(td, 1)
    assert all(y == 0 for _, y in zero.breakpoints)


def test_integer_max_is_degenerate():
    with pytest.raises(DegenerateProfile):
        truncation_data(RhoProfile.of([(0, 0), (1, 2), (2, 0)]))
    with pytest.raises(DegenerateProfile):
        truncation_data(RhoProfile.of([(0, 0), (1, -1), (2, 0)]))


def test_flattening_window():
    w = F(1, 500)  # 1/100 of the contact gap 1/5
    g = flatten_at_integers(TENT)
    for s, ell in [(F(16, 5), 1), (F(17, 5), 2), (F(18, 5), 2), (F(19, 5), 1)]:
        for x in [s - w, s, s + w]:
            assert pl_eval(g.breakpoints, x) == ell
        for x in [s - 2 * w, s + 2 * w, s - 3 * w]:
            assert pl_eval(g.breakpoints, x) == pl_eval(TENT.breakpoints, x)
    with pytest.raises(OverlapError):
        flatten_at_integers(TENT, F(1, 10))


def test_radial_spectrum_closed_form():
    got = {(p.ell, p.s_lo): p.action for p in radial_spectrum(TENT)}
    total = F(5, 4)
    for s, ell in [(F(16, 5), 1), (F(17, 5), 2)]:
        below = F(5) * (s - 3) ** 2 / 2  # rising half of the tent
        assert got[(ell, s)] == ell * s + total - below
    assert len(got) == 4


def test_plateau_contributes_once():
    g = flatten_at_integers(TENT)
    spec = radial_spectrum(g)
    assert len(spec) == 4
    assert all(p.s_hi - p.s_lo == F(2, 500) for p in spec)


@st.composite
def truncation_inputs(draw):
    n = draw(st.integers(1, 4))
    xs = sorted(set(draw(st.lists(st.integers(1, 15), min_size=n, max_size=n))))
    ys = [F(draw(st.integers(1, 14)), 4) for _ in xs]
    peak = F(draw(st.integers(0, 3))) + F(draw(st.integers(1, 7)), 8)
    ys[draw(st.integers(0, len(ys) - 1))] = peak
    return RhoProfile.of([(F(0), F(0))] + [(F(x, 4), y) for x, y in zip(xs, ys)] + [(F(4), F(0))])


@given(truncation_inputs())
def test_integral_drops_at_rate_h(g):
    try:
        td = truncation_data(g)
    except DegenerateProfile:
        return
    for k in range(td.N + 1):
        lo, hi = td.tau[k + 1], td.tau[k]
        for i in range(10):
            s = lo + (hi - lo) * F(i, 10)
            assert pl_integral(special_deformation(td, s).breakpoints) == (1 - s) * td.h


def test_constant_and_shift_families():
    t = single_mountain()
    d = bifurcation(ConstantFamily((t,)), default_grid(17))
    assert all(len(set(b.values)) == 1 for b in d.branches)
    r = F(-1, 3)
    d = bifurcation(ShiftFamily((t,), r), default_grid(33))
    assert len(d.branches) == 3
    rep = slope_check(d, 1 / 3)
    assert rep.passed and abs(rep.min_slope + 1 / 3) < 1e-12


def test_linear_family_endpoints():
    t0 = double_mountain()
    t1 = interpolate_trees(t0, t0, F(1, 2))
    assert validate_tree(t1) == [] and nu_recursive(t1) == nu_recursive(t0)
    d = bifurcation(LinearFamily(t0, t0), default_grid(9))
    assert not d.births[len(d.branches):] and not d.deaths


@dataclass(frozen=True)
class _Split:
    """One value that splits symmetrically into two at sigma = 1/2."""

    def spectrum_at(self, sigma):
        if sigma < F(1, 2):
            return [(F(1), "model", "a")]
        return [(F(1) - F(1, 10 ** 4), "model", "a"), (F(1) + F(1, 10 ** 4), "model", "b")]


def test_tracking_ambiguity_reported():
    with pytest.raises(TrackingAmbiguous) as exc:
        bifurcation(_Split(), default_grid(9))
    assert exc.value.sigma == 0.5


@pytest.fixture(scope="module")
def special():
    fam = SpecialFamily.from_profile(TENT, inside=[double_mountain()])
    return fam, bifurcation(fam, default_grid(512))


def test_special_family_slopes(special):
    fam, d = special
    assert fam.h == F(5, 4)  # symmetric ramps keep the integral of the tent
    rep = slope_check(d, float(fam.h))
    assert rep.passed
    assert rep.min_slope == pytest.approx(-1.25, abs=1e-9)
    assert d.deaths  # outer orbits die as the profile sinks below each integer


def test_continue_c_drops_by_h(special):
    fam, d = special
    c0 = float(F(7, 10) + fam.h)
    path = continue_c(d, c0)
    assert path[0] == (0.0, c0)
    assert abs(path[0][1] - path[-1][1] - float(fam.h)) < 1e-9
    with pytest.raises(NotInSpectrum):
        continue_c(d, 123.0)


def test_continue_c_collision():
    t = single_mountain()
    d = bifurcation(ConstantFamily((t, t)), default_grid(5))
    with pytest.raises(Collision):
        continue_c(d, 0.75)


def test_parallel_matches_serial(monkeypatch, special):
    fam, d = special
    monkeypatch.setenv("UNLK_THREADS", "2")
    d2 = bifurcation(fam, default_grid(512))
    assert [b.values for b in d2.branches] == [b.values for b in d.branches]


@pytest.mark.parametrize("points", [
    # steep branches that outran the slope-1 gate before any branch had history
    [(0, 0), (F(5, 4), F(17, 8)), (4, 0)],
    # two fresh branches 0.002 apart that were swapped on the first step
    [(0, 0), (F(1, 2), F(9, 4)), (1, F(7, 4)), (F(5, 4), F(21, 8)), (F(11, 4), F(3, 2)), (4, 0)],
])
def test_tracking_regressions(points):
    fam = SpecialFamily.from_profile(RhoProfile.of(points))
    d = bifurcation(fam, default_grid())
    assert slope_check(d, float(fam.h)).passed
    assert len(d.branches) < 20


def test_refinement_makes_coarse_grids_usable():
    fam = SpecialFamily.from_profile(TENT, inside=[double_mountain()])
    d = bifurcation(fam, default_grid(33))
    assert slope_check(d, float(fam.h)).passed
    assert len(d.sigmas) > 33  # bisected steps join the diagram
    assert sorted(d.sigmas) == d.sigmas

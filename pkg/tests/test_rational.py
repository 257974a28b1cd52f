from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from unlinked.rational import (Q, ceil, floor, fmt, make_pl, pl_eval, pl_integral, pl_level_crossings,
                               pl_min_const, pl_refine, pl_simplify)

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=40)


def test_q_accepts_exact_inputs():
    assert Q(3) == 3
    assert Q("7/4") == F(7, 4)
    assert Q(F(1, 3)) == F(1, 3)


@pytest.mark.parametrize("bad", [0.5, True, None, [1]])
def test_q_rejects_inexact(bad):
    with pytest.raises(TypeError):
        Q(bad)


def test_fmt():
    assert fmt(F(7, 10)) == "7/10"
    assert fmt(F(-3)) == "-3"
    assert fmt(F(0)) == "0"


@given(fracs)
def test_floor_ceil_match_math(x):
    import math
    assert floor(x) == math.floor(x)
    assert ceil(x) == math.ceil(x)


@given(fracs)
def test_fmt_round_trips(x):
    assert F(fmt(x)) == x


def test_integral_of_tent():
    f = make_pl([(0, 0), (1, 2), (3, 0)])
    assert pl_integral(f) == 3
    assert pl_integral(f, F(0), F(1)) == 1
    assert pl_integral(f, F(1), F(0)) == -1
    assert pl_eval(f, F(2)) == 1


@st.composite
def pl_functions(draw):
    n = draw(st.integers(2, 6))
    xs = sorted(set(draw(st.lists(fracs, min_size=n, max_size=n))))
    if len(xs) < 2:
        xs = [F(0), F(1)]
    ys = draw(st.lists(fracs, min_size=len(xs), max_size=len(xs)))
    return tuple(zip(xs, ys))


@given(pl_functions())
def test_integral_matches_trapezoid_sum(f):
    # independent: trapezoid rule is exact on PL functions
    expect = sum((x1 - x0) * (y0 + y1) / 2 for (x0, y0), (x1, y1) in zip(f, f[1:]))
    assert pl_integral(f) == expect


@given(pl_functions(), fracs)
def test_integral_is_additive(f, t):
    lo, hi = f[0][0], f[-1][0]
    m = min(max(t, lo), hi)
    assert pl_integral(f, lo, m) + pl_integral(f, m, hi) == pl_integral(f)


@given(pl_functions())
def test_simplify_and_refine_preserve_values(f):
    g = pl_simplify(f)
    mid = [(a[0] + b[0]) / 2 for a, b in zip(f, f[1:])]
    h = pl_refine(f, mid)
    for x in [p[0] for p in f] + mid:
        assert pl_eval(g, x) == pl_eval(f, x) == pl_eval(h, x)


@given(pl_functions(), fracs)
def test_min_const_is_pointwise_min(f, c):
    g = pl_min_const(f, c)
    xs = [p[0] for p in g] + [(a[0] + b[0]) / 2 for a, b in zip(g, g[1:])]
    for x in xs:
        assert pl_eval(g, x) == min(pl_eval(f, x), c)


def test_level_crossings_and_flat():
    f = make_pl([(0, 0), (1, 2), (2, 1), (3, 3)])
    assert pl_level_crossings(f, F(1)) == [F(1, 2), F(2)]
    with pytest.raises(ValueError):
        pl_level_crossings(make_pl([(0, 1), (1, 1)]), F(1))

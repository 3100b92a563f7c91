from fractions import Fraction

import pytest

from enmf.field import make_field
from enmf.geometry import GeometryError, VPolytope, contains
from enmf.nested2d import greedy_polygon, min_nested_polygon_2d


def _poly(pts, f):
    return VPolytope.from_points(pts, f)


def _regular_like(f, scale):
    # a convex pentagon with rational vertices, scaled about the origin
    base = [(10, 0), (3, 9), (-8, 6), (-8, -6), (3, -9)]
    return _poly([[f(Fraction(x * scale)), f(Fraction(y * scale))] for x, y in base], f)


def _check_nested(res, inner, outer):
    for p in res.polygon.points():
        assert contains(outer, p)
    for p in inner.points():
        assert contains(res.polygon, p)
    assert res.polygon.count == res.k


def test_identical_squares_need_four(field):
    sq = _poly([[0, 0], [1, 0], [1, 1], [0, 1]], field)
    res = min_nested_polygon_2d(sq, sq)
    assert res.k == 4
    _check_nested(res, sq, sq)


def test_small_inner_needs_three(field):
    outer = _poly([[0, 0], [10, 0], [10, 10], [0, 10]], field)
    inner = _poly([[4, 4], [6, 4], [6, 6], [4, 6]], field)
    res = min_nested_polygon_2d(inner, outer)
    assert res.k == 3
    _check_nested(res, inner, outer)


def test_max_k_reports_absence(exact):
    sq = _poly([[0, 0], [1, 0], [1, 1], [0, 1]], exact)
    assert min_nested_polygon_2d(sq, sq, max_k=3) is None
    assert min_nested_polygon_2d(sq, sq, max_k=4).k == 4


def test_close_pentagons_need_five(exact):
    outer = _regular_like(exact, 1)
    inner = _regular_like(exact, Fraction(19, 20))
    res = min_nested_polygon_2d(inner, outer)
    assert res.k == 5
    _check_nested(res, inner, outer)


def test_far_pentagons_need_three(exact):
    outer = _regular_like(exact, 1)
    inner = _regular_like(exact, Fraction(1, 10))
    res = min_nested_polygon_2d(inner, outer)
    assert res.k == 3


def test_greedy_is_an_upper_bound(exact):
    outer = _regular_like(exact, 1)
    inner = _regular_like(exact, Fraction(1, 2))
    g = greedy_polygon(inner, outer)
    assert min_nested_polygon_2d(inner, outer).k <= g.count
    for p in g.points():
        assert contains(outer, p)


def test_inner_must_be_inside(exact):
    outer = _poly([[0, 0], [1, 0], [0, 1]], exact)
    inner = _poly([[0, 0], [2, 0], [0, 2]], exact)
    with pytest.raises(GeometryError):
        min_nested_polygon_2d(inner, outer)


def test_exact_and_float_agree(rng):
    ex, fl = make_field("exact"), make_field("float", tol=1e-9)
    for s in (Fraction(1, 4), Fraction(3, 5), Fraction(4, 5), Fraction(9, 10)):
        a = min_nested_polygon_2d(_regular_like(ex, s), _regular_like(ex, 1)).k
        b = min_nested_polygon_2d(_regular_like(fl, s), _regular_like(fl, 1)).k
        assert a == b

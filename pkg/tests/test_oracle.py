import math

import pytest

from krasfix import BracketError, Interval, RealFunction, bisect_root, find_fixed_points, nearest_fixed_point

DOTTIE = 0.739085133215160641655  # mpmath findroot, 30 digits
COS01 = RealFunction(math.cos, Interval(0, 1))


def test_bisect_identity():
    assert abs(bisect_root(lambda x: x, -1.0, 2.0, 1e-12)) <= 1e-12


def test_bisect_dottie():
    c = bisect_root(lambda x: math.cos(x) - x, 0.0, 1.0, 1e-12)
    assert abs(math.cos(c) - c) <= 1e-11
    assert c == pytest.approx(DOTTIE, abs=1e-12)


def test_bisect_sqrt2():
    c = bisect_root(lambda x: x * x - 2, 1.0, 2.0, 1e-12)
    assert abs(c * c - 2) <= 1e-11


def test_bracket_error():
    with pytest.raises(BracketError):
        bisect_root(lambda x: x * x + 1, -1.0, 1.0)


@pytest.mark.parametrize("a,b,tol", [(0.0, 1.0, 1e-12), (1.0, 2.0, 1e-6), (-3.0, 5.0, 1e-9)])
def test_bisect_step_count(a, b, tol):
    # root placed off any dyadic point so no midpoint hits it exactly
    r = a + (b - a) / math.pi
    _, steps = bisect_root(lambda x: x - r, a, b, tol, full_output=True)
    assert steps == math.ceil(math.log2((b - a) / tol))


def test_fixed_points_cos():
    fps = find_fixed_points(COS01, COS01.domain)
    assert len(fps) == 1
    assert fps.points[0] == pytest.approx(DOTTIE, abs=1e-12)


def test_fixed_points_identity_degenerate():
    fps = find_fixed_points(lambda x: x, Interval(0, 1), n_grid=16)
    assert len(fps) == 17


def test_fixed_points_none():
    assert find_fixed_points(lambda x: x + 1, Interval(0, 1)).points == ()


def test_fixed_points_cubic():
    assert find_fixed_points(lambda x: x ** 3, Interval(-2, 2)).points == (-1.0, 0.0, 1.0)


def test_nearest():
    iv = COS01.domain
    assert nearest_fixed_point(COS01, iv, 0.0, "up") == pytest.approx(DOTTIE, abs=1e-12)
    assert nearest_fixed_point(COS01, iv, 0.9, "up") is None
    assert nearest_fixed_point(COS01, iv, 0.9, "down") == pytest.approx(DOTTIE, abs=1e-12)

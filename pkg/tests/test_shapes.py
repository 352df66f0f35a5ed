import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oscbound.errors import NotEnumerableError, ShapeError
from oscbound.grid import GridFunction
from oscbound.oscillation import bmo_seminorm
from oscbound.shapes import (
    CUBES,
    FALSECUBES,
    RECTANGLES,
    Ball,
    BasisDescriptor,
    Box,
    Family,
    Sector,
    ball_for_sector,
    basis_sides,
    bisect_falsecube,
    cap_fraction,
    circumscribe_cube_ball,
    count_shapes,
    enumerate_basis,
    falsecube_type,
    omega,
    sample_uniform,
    sector_for_ball,
    sector_measure,
    shape_from_json,
    subcube_partition,
    witness_violations,
)


def test_unit_ball_volumes():
    assert omega(1) == 2
    assert omega(2) == pytest.approx(math.pi, rel=1e-15)
    assert omega(3) == pytest.approx(4 * math.pi / 3, rel=1e-15)
    assert omega(4) == pytest.approx(math.pi ** 2 / 2, rel=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cap_fraction_full_half_space(n):
    assert cap_fraction(n, math.pi / 2) == pytest.approx(0.5, rel=1e-12)


def test_cap_fraction_quadrature_n4():
    # n = 4: int_0^a sin^2 / int_0^pi sin^2 = (a - sin a cos a) / pi
    a = 0.7
    expect = (a - math.sin(a) * math.cos(a)) / math.pi
    assert cap_fraction(4, a) == pytest.approx(expect, rel=1e-10)


def test_interval_enumeration_count():
    assert count_shapes(CUBES, (4,)) == 10
    assert len(list(enumerate_basis(CUBES, (4,)))) == 10


def test_falsecube_enumeration_2x2():
    shapes = list(enumerate_basis(FALSECUBES, (2, 2)))
    assert len(shapes) == 7 == count_shapes(FALSECUBES, (2, 2))
    assert sum(1 for s in shapes if not s.is_cube()) == 2


def test_rectangle_enumeration_2x2():
    assert count_shapes(RECTANGLES, (2, 2)) == 9


def test_enumeration_has_no_duplicates():
    shapes = list(enumerate_basis(BasisDescriptor(Family.FALSECUBES, permuted=True), (4, 4, 4)))
    keys = {(s.lo, s.hi) for s in shapes}
    assert len(keys) == len(shapes)


def test_balls_and_sectors_not_enumerable():
    f = GridFunction(np.zeros((4, 4)))
    for fam in (Family.BALLS, Family.SECTORS):
        with pytest.raises(NotEnumerableError, match="not cell-enumerable"):
            bmo_seminorm(f, BasisDescriptor(fam))


def test_false_cube_sides_have_leading_long_axes():
    sides = basis_sides(FALSECUBES, (8, 8, 8))
    for s in sides:
        t = falsecube_type(s)
        assert t is not None
        assert t.long_axes == tuple(range(t.m))


def test_bisect_falsecube_stays_in_family():
    r = Box((0, 0, 0), (4, 4, 2))
    a, b = bisect_falsecube(r)
    assert a.measure() == b.measure() == r.measure() / 2
    for child in (a, b):
        assert falsecube_type(child.sides) is not None
    # a cube splits into a false cube
    c, _ = bisect_falsecube(Box((0, 0), (2, 2)))
    assert not c.is_cube() and falsecube_type(c.sides).m == 1


def test_subcube_partition():
    m, axes, cubes = subcube_partition(Box((0, 0), (4, 2)))
    assert m == 1 and axes == (0,)
    assert [c.lo for c in cubes] == [(0, 0), (2, 0)]
    m, _, cubes = subcube_partition(Box((0, 0, 0), (2, 2, 2)))
    assert m == 3 and len(cubes) == 8
    with pytest.raises(ShapeError):
        subcube_partition(Box((0, 0), (3, 3)))


def test_cube_ball_witnesses():
    w = circumscribe_cube_ball(Box((0, 0), (1, 1)))
    assert w.outer.r == pytest.approx(math.sqrt(2) / 2)
    assert w.ratios["outer/inner"] == pytest.approx(math.pi / 2, rel=1e-14)
    w = circumscribe_cube_ball(Box((0.3,), (1.0,)))
    assert w.outer.r == pytest.approx(0.35) and w.ratios["outer/inner"] == pytest.approx(1.0, rel=1e-14)
    w = circumscribe_cube_ball(Ball((0, 0, 0), 1.0))
    assert w.outer.sides == (2.0, 2.0, 2.0)
    assert w.ratios["outer/inner"] == pytest.approx(6 / math.pi, rel=1e-14)
    with pytest.raises(ShapeError, match="not a cube"):
        circumscribe_cube_ball(Box((0, 0), (1, 2)))


def test_sector_for_ball_outside_origin():
    w = sector_for_ball(Ball((1.0, 0.0), 0.5))
    assert isinstance(w.middle, Sector)
    assert w.middle.alpha == pytest.approx(math.pi / 6, rel=1e-14)
    assert w.outer.x == pytest.approx((math.sqrt(3) / 2, 0.0), rel=1e-14)
    assert w.outer.r == 1.0
    assert w.outer.measure() == pytest.approx(math.pi, rel=1e-14)
    assert w.ratios["outer/inner"] == pytest.approx(4.0, rel=1e-14)


def test_sector_for_ball_containing_origin():
    w = sector_for_ball(Ball((0.3, 0.0), 0.5))
    assert isinstance(w.middle, Ball) and w.middle.is_centered()
    assert w.middle.r == pytest.approx(0.8) and w.outer.r == 1.0


def test_sector_for_ball_3d(rng):
    w = sector_for_ball(Ball((2.0, 0.0, 0.0), 1.0))
    assert w.middle.alpha == pytest.approx(math.pi / 6, rel=1e-14)
    assert w.outer.r == 2.0
    assert w.outer.x == pytest.approx((math.sqrt(3), 0.0, 0.0), rel=1e-14)
    assert witness_violations(w, 10 ** 5, rng) == 0


def test_ball_for_sector():
    w = ball_for_sector(Ball((0.0, 0.0), 1.0))
    assert w.outer.r == 2.0 and w.ratios["outer/inner"] == pytest.approx(4.0)
    a = Sector((1.0, 0.0), 0.5, math.pi / 6)
    w = ball_for_sector(a)
    assert w.inner.x == (1.0, 0.0) and w.inner.r == 0.5
    assert w.outer.x == pytest.approx((math.sqrt(3) / 2, 0.0))
    s3 = Sector((2.0, 0.0, 0.0), 1.0, math.pi / 6)
    w = ball_for_sector(s3)
    assert w.inner.measure() == pytest.approx(4 * math.pi / 3, rel=1e-14)
    assert w.outer.measure() == pytest.approx(8 * 4 * math.pi / 3, rel=1e-14)


def test_ball_for_sector_rejects_non_members():
    with pytest.raises(ShapeError, match="not in basis A"):
        ball_for_sector(Ball((0.5, 0.0), 1.0))
    with pytest.raises(ShapeError, match="not in basis A"):
        ball_for_sector(Sector((1.0, 0.0), 0.3, math.pi / 6))


def test_sector_measure_closed_form():
    a = Sector((1.0, 0.0), 0.5, math.pi / 6)
    assert sector_measure(a) == pytest.approx(math.pi / 3, rel=1e-14)
    r = 0.7
    for n in (2, 3):
        x = (r,) + (0.0,) * (n - 1)
        half = Sector(x, r, math.pi / 2)
        assert half.measure() == pytest.approx(0.5 * omega(n) * (2 * r) ** n, rel=1e-12)
    assert Ball((0.0, 0.0, 0.0), 1.5).measure() == pytest.approx(omega(3) * 1.5 ** 3)


def test_sector_validation():
    with pytest.raises(ShapeError):
        Sector((0.0, 0.0), 0.1, 0.3)
    with pytest.raises(ShapeError):
        Sector((1.0, 0.0), 1.5, 0.3)
    with pytest.raises(ShapeError):
        Sector((1.0, 0.0), 0.5, 2.0)
    with pytest.raises(ShapeError):
        Ball((0.0,), -1.0)


@pytest.mark.parametrize("shape", [
    Box((0.0, 1.0), (0.5, 3.0)),
    Ball((1.0, -1.0, 0.5), 0.3),
    Sector((0.0, 2.0, 1.0), 1.0, 0.4),
])
def test_shape_json_round_trip(shape):
    back = shape_from_json(shape.to_json())
    assert back.to_json() == shape.to_json()


def test_sampled_points_lie_inside(rng):
    for s in (Box((0, 0), (1, 2)), Ball((1.0, 1.0), 0.5), Sector((1.0, 1.0, 0.0), 0.8, 0.6)):
        pts = sample_uniform(s, 5000, rng)
        assert s.contains(pts).all()


def test_sector_sampling_is_uniform(rng):
    # fraction of sampled points in the inner half-radius shell vs exact volume ratio
    s = Sector((1.0, 0.0), 0.5, math.pi / 6)
    pts = sample_uniform(s, 200_000, rng)
    r = np.linalg.norm(pts, axis=1)
    frac = np.mean(r < 1.0)
    expect = (1.0 - 0.25) / (2.25 - 0.25)
    assert frac == pytest.approx(expect, abs=0.01)


@given(
    st.lists(st.floats(-2, 2), min_size=2, max_size=3),
    st.floats(0.05, 1.0),
)
def test_sector_witness_contains_ball(x, r):
    x = np.asarray(x)
    if np.linalg.norm(x) < 1e-3:
        return
    w = sector_for_ball(Ball(tuple(x), r))
    rng = np.random.default_rng(0)
    assert witness_violations(w, 2000, rng) == 0
    assert w.ratios["outer/inner"] == pytest.approx(2.0 ** len(x), rel=1e-12)
    assert w.middle.measure() < w.outer.measure()

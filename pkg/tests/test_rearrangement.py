import math
import warnings

import numpy as np
import pytest
from hypothesis import given

from oscbound.errors import EmptyShapeError, OscboundError, ShapeError
from oscbound.grid import GridFunction
from oscbound.rearrangement import (
    RadialFunction,
    RadialSupportWarning,
    StepFunction1D,
    decreasing_rearrangement,
    distribution,
    distribution_of_step,
    hardy_littlewood_check,
    interval_to_shape,
    local_interval_for_cube,
    polar_oscillation,
    radial_oscillation,
    radial_reduction,
    rasterize_radial,
    sorted_cells,
    symmetrize,
)
from oscbound.shapes import Ball, Box, Sector

from strategies import grids


def test_distribution_of_indicator():
    f = GridFunction([1, 0, 0, 0], 0.25)
    mu = distribution(f)
    assert mu(0.0) == 0.25 and mu(0.999) == 0.25 and mu(1.0) == 0.0 and mu(5.0) == 0.0


def test_distribution_of_zero():
    mu = distribution(GridFunction(np.zeros((3, 3))))
    assert mu(0.0) == 0.0 and mu(1.0) == 0.0


def test_distribution_counts_cells():
    mu = distribution(GridFunction([3, 1, 1, 0], 0.25))
    assert mu(0.0) == 0.75 and mu(0.5) == 0.75
    assert mu(1.0) == 0.25 and mu(2.9) == 0.25
    assert mu(3.0) == 0.0 and mu(7.0) == 0.0


def test_decreasing_rearrangement_example():
    fs = decreasing_rearrangement(GridFunction([3, 1, 1, 0], 0.25))
    assert fs(0.1) == 3 and fs(0.3) == 1 and fs(0.7) == 1 and fs(0.8) == 0
    assert fs.is_nonincreasing()
    assert fs.length == 1.0


def test_rearrangement_of_constant_uses_absolute_value():
    fs = decreasing_rearrangement(GridFunction(np.full((2, 3), -1.5), 0.5))
    assert np.all(fs.values == 1.5) and fs.length == pytest.approx(1.5)


def test_rearrangement_permutation_invariant(rng):
    v = rng.random((8, 8))
    a = decreasing_rearrangement(GridFunction(v, 0.125))
    b = decreasing_rearrangement(GridFunction(rng.permutation(v.ravel()).reshape(8, 8), 0.125))
    assert a.same_as(b)


@given(grids())
def test_equimeasurable_bit_exact(f):
    fs = decreasing_rearrangement(f)
    assert distribution(f).same_as(distribution_of_step(fs))


@given(grids())
def test_rearrangement_is_nonincreasing_and_preserves_integral(f):
    fs = decreasing_rearrangement(f)
    assert fs.is_nonincreasing()
    assert fs.integral(0, f.measure) == pytest.approx(math.fsum(np.abs(f.values).ravel()) * f.cell_measure, rel=1e-12, abs=1e-12)


def test_hardy_littlewood_extremal_set():
    f = GridFunction([0.5, 3.0, -2.0, 1.0], 0.25)
    lhs, rhs = hardy_littlewood_check(f, np.argsort(-np.abs(f.values))[:2])
    assert lhs == rhs == pytest.approx(5.0 * 0.25)


def test_hardy_littlewood_smallest_cell():
    f = GridFunction([0.5, 3.0, -2.0, 1.0], 0.25)
    lhs, rhs = hardy_littlewood_check(f, [0])
    assert lhs == 0.5 * 0.25 and rhs == 3.0 * 0.25


def test_hardy_littlewood_empty_set():
    with pytest.raises(EmptyShapeError):
        hardy_littlewood_check(GridFunction([1.0, 2.0]), np.zeros(2, dtype=bool))


def test_hardy_littlewood_random_pairs(rng):
    for _ in range(1000):
        f = GridFunction(rng.standard_normal((6, 6)), 1 / 6)
        mask = rng.random((6, 6)) < rng.uniform(0.05, 1)
        if not mask.any():
            continue
        lhs, rhs = hardy_littlewood_check(f, mask)
        assert lhs <= rhs


def test_step_function_csv_and_json():
    fs = StepFunction1D([0.0, 0.25, 0.75, 1.0], [3.0, 1.0, 0.0])
    csv = fs.to_csv().splitlines()
    assert csv[0] == "breakpoint,value"
    assert csv[-1] == "1.0,0.0"
    assert StepFunction1D.from_json(fs.to_json()).same_as(fs)


def test_step_function_oscillation():
    fs = StepFunction1D([0.0, 0.5, 1.0], [1.0, 0.0])
    assert fs.oscillation(0.0, 1.0) == 0.5
    assert fs.oscillation(0.0, 0.5) == 0.0
    # the tail counts beyond the domain
    assert fs.oscillation(0.5, 2.0) == 0.0
    with pytest.raises(OscboundError):
        StepFunction1D([0.0, 1.0, 0.5], [1.0, 2.0])


def test_symmetrization_of_indicator():
    f = GridFunction([[1, 1], [0, 1]], 0.5)
    rf = symmetrize(f)
    r = math.sqrt(0.75 / math.pi)
    assert rf([[0.0, 0.0]])[0] == 1.0
    assert rf([[0.99 * r, 0.0]])[0] == 1.0
    assert rf([[1.01 * r, 0.0]])[0] == 0.0


def test_symmetrization_1d_doubles_argument():
    f = GridFunction([3, 1, 1, 0], 0.25)
    rf = symmetrize(f)
    fs = decreasing_rearrangement(f)
    for x in (0.05, -0.2, 0.3, 0.45):
        assert rf([[x]])[0] == fs(2 * abs(x))


def test_profile_of_radial_decreasing_function():
    c = (np.arange(16) + 0.5) / 16 - 0.5
    x, y = np.meshgrid(c, c, indexing="ij")
    f = GridFunction(np.exp(-(x * x + y * y)), 1 / 16)
    assert np.array_equal(decreasing_rearrangement(f).cell_values(f.cell_measure), np.sort(f.values.ravel())[::-1])


def test_rasterize_constant():
    rf = RadialFunction(StepFunction1D([0.0, 1.0], [2.5], 2.5), 2)
    for k in (1, 3):
        g = rasterize_radial(rf, (8, 8), 0.5, k)
        assert np.all(g.values == 2.5)


def test_rasterize_aligned_indicator_1d():
    rf = RadialFunction(StepFunction1D([0.0, 1.0], [1.0]), 1)  # ball of radius 1/2
    g = rasterize_radial(rf, (8,), 0.25, 4)
    assert np.array_equal(g.values, [0, 0, 1, 1, 1, 1, 0, 0])


def test_rasterized_unit_ball_mass():
    rf = RadialFunction(StepFunction1D([0.0, math.pi], [1.0]), 2)
    g = rasterize_radial(rf, (64, 64), 2.5 / 64, 4)
    assert g.values.sum() * g.cell_measure == pytest.approx(math.pi, rel=0.02)


def test_rasterize_warns_when_support_leaves_grid():
    rf = RadialFunction(StepFunction1D([0.0, math.pi], [1.0]), 2)
    with pytest.warns(RadialSupportWarning):
        rasterize_radial(rf, (4, 4), 0.25, 2)


def test_radial_reduction_examples():
    assert radial_reduction(Ball((0.0, 0.0), 2.0)) == (0.0, pytest.approx(4 * math.pi))
    lo, hi = radial_reduction(Sector((1.0, 0.0), 0.5, math.pi / 6))
    assert lo == pytest.approx(math.pi / 4, rel=1e-14) and hi == pytest.approx(9 * math.pi / 4, rel=1e-14)
    with pytest.raises(ShapeError, match="not in basis A"):
        radial_reduction(Ball((0.1, 0.0), 1.0))


def test_interval_to_shape_inverse():
    a = interval_to_shape((1.0, 3.0), 2)
    j0, j1 = math.sqrt(1 / math.pi), math.sqrt(3 / math.pi)
    assert isinstance(a, Sector)
    assert a.radius == pytest.approx((j0 + j1) / 2, rel=1e-14)
    assert a.rho == pytest.approx((j1 - j0) / 2, rel=1e-14)
    lo, hi = radial_reduction(a)
    assert lo == pytest.approx(1.0, rel=1e-13) and hi == pytest.approx(3.0, rel=1e-13)
    b = interval_to_shape((0.0, 2.0), 3)
    assert isinstance(b, Ball) and b.measure() == pytest.approx(2.0)


def test_radial_oscillation_two_routes(rng):
    f = GridFunction(rng.random((8, 8)), 1 / 8)
    rf = symmetrize(f)
    for a in (Ball((0.0, 0.0), 0.3), Sector((0.5, 0.0), 0.5 * math.sin(0.3), 0.3), interval_to_shape((0.2, 0.9), 2)):
        assert polar_oscillation(rf.profile, a)[1] == pytest.approx(radial_oscillation(rf, a), rel=1e-12, abs=1e-15)


def test_local_interval_1d():
    li = local_interval_for_cube(Box((0.4,), (0.6,)), 1.0)
    assert li.bound == pytest.approx(0.4)
    assert li.length <= li.bound * (1 + 1e-12)
    assert li.interval == pytest.approx((0.8, 1.2))


def test_local_interval_centred_cube_uses_ball():
    li = local_interval_for_cube(Box((-0.1, -0.1), (0.1, 0.1)), 1.0)
    assert li.interval[0] == 0.0


def test_local_interval_bound_2d():
    ell = 0.2 / math.sqrt(2)
    q = Box((0.5 - ell / 2, -ell / 2), (0.5 + ell / 2, ell / 2))
    li = local_interval_for_cube(q, 1.0)
    assert li.bound == pytest.approx(2 * math.pi * 0.2)
    assert li.length <= li.bound


def test_local_interval_rejects_far_cube():
    with pytest.raises(ShapeError):
        local_interval_for_cube(Box((0.9, 0.9), (1.0, 1.0)), 1.0)


def test_sorted_cells_matches_profile():
    f = GridFunction([[2.0, -3.0], [0.5, 1.0]], 0.5)
    assert list(sorted_cells(f)) == [3.0, 2.0, 1.0, 0.5]


def test_no_warning_for_support_inside():
    rf = RadialFunction(StepFunction1D([0.0, 0.1], [1.0]), 2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rasterize_radial(rf, (16, 16), 0.1, 2)

import os
import tempfile

import numpy as np
import pytest
from hypothesis import given

from oscbound.errors import BadMagicError, DimensionMismatchError, OscboundError, TruncatedPayloadError
from oscbound.grid import GridFunction, PrefixSumTable, box_mean, build_prefix, grid_from_bytes, load_grid, save_grid

from strategies import grids


def test_box_sum_whole_grid():
    t = build_prefix(GridFunction([[1, 2], [3, 4]], 1.0))
    assert t.box_sum((0, 0), (2, 2)) == 10


def test_empty_box_sums_to_zero():
    t = build_prefix(GridFunction(np.arange(12.0).reshape(3, 4), 0.5))
    assert t.box_sum((1, 2), (1, 4)) == 0
    assert t.box_sum((0, 0), (0, 0)) == 0


def test_box_sum_includes_cell_measure():
    t = build_prefix(GridFunction([5, -1, 2], 0.5))
    assert t.box_sum((1,), (3,)) == 0.5


def test_box_means():
    assert box_mean(build_prefix(GridFunction([0, 1, 0, 1])), (0,), (4,)) == 0.5
    assert box_mean(build_prefix(GridFunction([[1, 2], [3, 4]])), (0, 0), (2, 1)) == 2
    t = build_prefix(GridFunction(np.full((3, 3, 2), 1.7)))
    assert t.box_mean((0, 1, 0), (3, 3, 1)) == pytest.approx(1.7, rel=1e-15)


def test_box_mean_of_empty_box_raises():
    t = build_prefix(GridFunction([1.0, 2.0]))
    with pytest.raises(OscboundError, match="empty"):
        t.box_mean((1,), (1,))


def test_box_outside_grid_raises():
    t = build_prefix(GridFunction([1.0, 2.0]))
    with pytest.raises(OscboundError):
        t.box_sum((0,), (3,))
    with pytest.raises(DimensionMismatchError):
        t.box_sum((0, 0), (1, 1))


def test_grid_validation():
    with pytest.raises(OscboundError):
        GridFunction([1.0, np.nan])
    with pytest.raises(OscboundError):
        GridFunction([1.0], 0.0)
    with pytest.raises(OscboundError):
        GridFunction(np.zeros((0, 3)))
    f = GridFunction([1.0, 2.0])
    with pytest.raises(ValueError):
        f.values[0] = 3.0


def test_measure_and_centres():
    f = GridFunction(np.zeros((4, 2)), 0.25, origin=(1.0, -1.0))
    assert f.measure == pytest.approx(0.5)
    assert f.cell_measure == 0.0625
    cx, cy = f.cell_centers()
    assert cx[0] == 1.125 and cy[-1] == -0.625


@given(grids())
def test_prefix_sums_match_direct_sums(f):
    t = PrefixSumTable(f)
    rng = np.random.default_rng(f.n_cells)
    for _ in range(5):
        lo = [int(rng.integers(0, d + 1)) for d in f.extents]
        hi = [int(rng.integers(l, d + 1)) for l, d in zip(lo, f.extents)]
        direct = f.values[tuple(slice(a, b) for a, b in zip(lo, hi))].sum() * f.cell_measure
        assert t.box_sum(lo, hi) == pytest.approx(direct, rel=1e-12, abs=1e-12)


@given(grids())
def test_save_load_round_trip(tmp_path_factory, f):
    path = tmp_path_factory.mktemp("grid") / "f.oscg"
    save_grid(f, path)
    g = load_grid(path, f.dim)
    assert g.extents == f.extents and g.cell_size == f.cell_size and g.origin == f.origin
    assert np.array_equal(g.values, f.values)


def _bytes(f):
    with tempfile.TemporaryDirectory() as d:
        p = os.path.join(d, "f.oscg")
        save_grid(f, p)
        return open(p, "rb").read()


def test_bad_magic():
    data = bytearray(_bytes(GridFunction([1.0, 2.0])))
    data[:4] = b"NOPE"
    with pytest.raises(BadMagicError, match="bad magic"):
        grid_from_bytes(bytes(data))


def test_truncated_payload():
    data = _bytes(GridFunction([1.0, 2.0, 3.0, 4.0]))
    with pytest.raises(TruncatedPayloadError, match="truncated payload"):
        grid_from_bytes(data[:-8])


def test_dimension_mismatch():
    data = _bytes(GridFunction(np.zeros((2, 2))))
    with pytest.raises(DimensionMismatchError):
        grid_from_bytes(data, expected_dim=3)
    with pytest.raises(DimensionMismatchError):
        grid_from_bytes(data + b"\0" * 8)


def test_header_is_little_endian():
    data = _bytes(GridFunction([1.5], 0.5))
    assert data[4:8] == (1).to_bytes(4, "little")
    assert np.frombuffer(data[-8:], "<f8")[0] == 1.5

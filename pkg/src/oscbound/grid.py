"""Piecewise-constant functions on uniform n-dimensional cell grids.

A :class:`GridFunction` is constant on each cell of a uniform grid with
cell size ``h`` (the same on every axis).  Every integral over a
cell-aligned box is therefore a finite sum, and :class:`PrefixSumTable`
answers such sums in ``O(2**n)`` after one pass per axis.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    BadMagicError,
    DimensionMismatchError,
    EmptyShapeError,
    GridFormatError,
    OscboundError,
    TruncatedPayloadError,
)

MAGIC = b"OSCG"
FORMAT_VERSION = 1

# long double is 80-bit extended on x86-64 linux; falls back to float64 elsewhere
ACCUM_DTYPE = np.longdouble


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real function, constant on the cells of a uniform grid.

    ``values`` has shape ``extents`` (row-major, axis 0 slowest); the cell
    with multi-index ``i`` is ``origin + h * [i, i + 1)``.
    """

    values: np.ndarray
    cell_size: float = 1.0
    origin: tuple = None

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.ndim < 1:
            raise OscboundError("grid function needs at least one axis")
        if v.size == 0 or min(v.shape) < 1:
            raise OscboundError("every extent must be a positive integer")
        if not np.all(np.isfinite(v)):
            raise OscboundError("grid values must be finite")
        h = float(self.cell_size)
        if not (h > 0 and np.isfinite(h)):
            raise OscboundError("cell size must be positive and finite")
        origin = (0.0,) * v.ndim if self.origin is None else tuple(float(o) for o in self.origin)
        if len(origin) != v.ndim:
            raise DimensionMismatchError(f"origin has {len(origin)} entries for a {v.ndim}-d grid")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "cell_size", h)
        object.__setattr__(self, "origin", origin)

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def extents(self) -> tuple:
        return self.values.shape

    @property
    def n_cells(self) -> int:
        return self.values.size

    @property
    def cell_measure(self) -> float:
        return self.cell_size ** self.dim

    @property
    def measure(self) -> float:
        return self.cell_measure * self.n_cells

    def cell_centers(self) -> list[np.ndarray]:
        """Per-axis coordinates of cell centres."""
        return [self.origin[a] + self.cell_size * (np.arange(d) + 0.5) for a, d in enumerate(self.extents)]

    def with_values(self, values) -> "GridFunction":
        return GridFunction(values, self.cell_size, self.origin)

    def __repr__(self):
        return f"GridFunction(extents={self.extents}, h={self.cell_size!r}, origin={self.origin})"


class PrefixSumTable:
    """Cumulative sums over all lower-corner boxes, in extended precision.

    ``table[i_1, ..., i_n]`` is the sum of values over cells ``[0, i)``; the
    table has shape ``extents + 1`` with a zero border.
    """

    def __init__(self, f: GridFunction):
        self.dim = f.dim
        self.extents = f.extents
        self.cell_measure = f.cell_measure
        table = np.zeros(tuple(d + 1 for d in f.extents), dtype=ACCUM_DTYPE)
        inner = tuple(slice(1, None) for _ in range(f.dim))
        acc = f.values.astype(ACCUM_DTYPE)
        for axis in range(f.dim):
            acc = np.cumsum(acc, axis=axis)
        table[inner] = acc
        table.flags.writeable = False
        self.table = table
        self._corners = list(itertools.product((0, 1), repeat=f.dim))

    def _check(self, lo, hi):
        lo = tuple(int(i) for i in lo)
        hi = tuple(int(i) for i in hi)
        if len(lo) != self.dim or len(hi) != self.dim:
            raise DimensionMismatchError(f"box corners must have {self.dim} entries")
        for a, (l, u, d) in enumerate(zip(lo, hi, self.extents)):
            if l < 0 or u > d or l > u:
                raise OscboundError(f"box [{l}, {u}) outside axis {a} of extent {d}")
        return lo, hi

    def raw_sum(self, lo, hi):
        """Sum of cell values over ``[lo, hi)`` (no cell measure), extended precision."""
        lo, hi = self._check(lo, hi)
        if any(l == u for l, u in zip(lo, hi)):
            return ACCUM_DTYPE(0)
        total = ACCUM_DTYPE(0)
        for corner in self._corners:
            idx = tuple(u if c else l for c, l, u in zip(corner, lo, hi))
            sign = -1 if (self.dim - sum(corner)) % 2 else 1
            total += sign * self.table[idx]
        return total

    def box_sum(self, lo, hi) -> float:
        """Integral of f over the cell box ``[lo, hi)``."""
        return float(self.raw_sum(lo, hi) * ACCUM_DTYPE(self.cell_measure))

    def box_mean(self, lo, hi) -> float:
        lo, hi = self._check(lo, hi)
        count = 1
        for l, u in zip(lo, hi):
            count *= u - l
        if count == 0:
            raise EmptyShapeError()
        return float(self.raw_sum(lo, hi) / ACCUM_DTYPE(count))


def build_prefix(f: GridFunction) -> PrefixSumTable:
    return PrefixSumTable(f)


def box_mean(t: PrefixSumTable, lo: Sequence[int], hi: Sequence[int]) -> float:
    return t.box_mean(lo, hi)


def save_grid(f: GridFunction, path) -> None:
    n = f.dim
    header = MAGIC + struct.pack(f"<II{n}Id{n}d", FORMAT_VERSION, n, *f.extents, f.cell_size, *f.origin)
    payload = np.ascontiguousarray(f.values, dtype="<f8").tobytes()
    Path(path).write_bytes(header + payload)


def load_grid(path, expected_dim: int | None = None) -> GridFunction:
    return grid_from_bytes(Path(path).read_bytes(), expected_dim)


def grid_from_bytes(data: bytes, expected_dim: int | None = None) -> GridFunction:
    if data[:4] != MAGIC:
        raise BadMagicError(data[:4])
    pos = 4
    if len(data) < pos + 8:
        raise GridFormatError("truncated header")
    version, n = struct.unpack_from("<II", data, pos)
    pos += 8
    if version != FORMAT_VERSION:
        raise GridFormatError(f"unsupported OSCG version {version}")
    if n < 1:
        raise DimensionMismatchError("dimension must be at least 1")
    if expected_dim is not None and n != expected_dim:
        raise DimensionMismatchError(f"file holds a {n}-d grid, expected {expected_dim}-d")
    head = struct.calcsize(f"<{n}Id{n}d")
    if len(data) < pos + head:
        raise GridFormatError("truncated header")
    fields = struct.unpack_from(f"<{n}Id{n}d", data, pos)
    pos += head
    extents = fields[:n]
    h = fields[n]
    origin = fields[n + 1:]
    count = int(np.prod(extents, dtype=np.int64))
    body = len(data) - pos
    if body < 8 * count:
        raise TruncatedPayloadError(f"truncated payload: header declares {count} cells, found {body // 8}")
    if body > 8 * count:
        raise DimensionMismatchError(f"payload holds {body / 8:g} values, header declares {count}")
    values = np.frombuffer(data, dtype="<f8", count=count, offset=pos).reshape(extents)
    return GridFunction(values.astype(np.float64), h, origin)

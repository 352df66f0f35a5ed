"""Mean oscillation over shapes and BMO-type seminorms over shape bases."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import EmptyShapeError, NotEnumerableError, OscboundError, ShapeError
from .grid import GridFunction, PrefixSumTable
from .rearrangement import RadialFunction, StepFunction1D, radial_oscillation
from .shapes import (
    Ball,
    BasisDescriptor,
    Box,
    Family,
    Sector,
    basis_sides,
    count_shapes,
    falsecube_type,
    subcube_partition,
)

# smallest side (in cells) the refinement may shrink a shape to
MIN_REFINED_SIDE = 0.25
REFINE_START_STEP = 0.5
REFINE_MIN_STEP = 1.0 / 256


def _check_box(f: GridFunction, s: Box):
    if s.dim != f.dim:
        raise OscboundError(f"{s.dim}-d shape on a {f.dim}-d grid")
    for a, (l, u, d) in enumerate(zip(s.lo, s.hi, f.extents)):
        if l < 0 or u > d:
            raise OscboundError(f"shape leaves the grid along axis {a}")
        if not u > l:
            raise EmptyShapeError()


def _axis_weights(lo: float, hi: float):
    i0 = int(math.floor(lo))
    i1 = int(math.ceil(hi))
    idx = np.arange(i0, i1)
    w = np.minimum(hi, idx + 1) - np.maximum(lo, idx)
    return slice(i0, i1), np.clip(w, 0.0, 1.0)


def box_stats(f: GridFunction, s: Box) -> tuple[float, float]:
    """``(mean, O)`` of ``f`` over a (possibly fractional) box in cell units."""
    _check_box(f, s)
    if s.is_aligned():
        lo, hi = s.int_corners()
        sub = f.values[tuple(slice(l, u) for l, u in zip(lo, hi))]
        m = float(np.mean(sub.astype(np.longdouble)))
        return m, float(np.mean(np.abs(sub - m)))
    slices, weights = [], None
    for a, (l, u) in enumerate(zip(s.lo, s.hi)):
        sl, w = _axis_weights(float(l), float(u))
        slices.append(sl)
        w = w.reshape((1,) * a + (-1,))
        weights = w if weights is None else weights[..., None] * w
    sub = f.values[tuple(slices)]
    total = weights.sum()
    m = float((weights * sub).sum() / total)
    return m, float((weights * np.abs(sub - m)).sum() / total)


def mean_oscillation(f, s) -> float:
    """``O(f, S)``, the mean of ``|f - f_S|`` over ``S``.

    ``f`` is a :class:`GridFunction` with ``S`` a box in cell units, or a
    :class:`RadialFunction` with ``S`` a centred ball or a sector of the
    sector basis (computed through the radial reduction).
    """
    if isinstance(f, RadialFunction):
        if not isinstance(s, (Ball, Sector)):
            raise ShapeError("radial functions are measured on balls or sectors")
        return radial_oscillation(f, s)
    if not isinstance(s, Box):
        raise ShapeError("balls and sectors need a radial function")
    return box_stats(f, s)[1]


def mean_oscillation_plus(f: GridFunction, s: Box) -> float:
    """``2 * mean((f - f_S)_+)``, which equals ``O(f, S)``."""
    _check_box(f, s)
    if not s.is_aligned():
        raise ShapeError("positive-part route needs a cell-aligned box")
    lo, hi = s.int_corners()
    sub = f.values[tuple(slice(l, u) for l, u in zip(lo, hi))]
    m = float(np.mean(sub.astype(np.longdouble)))
    return 2.0 * float(np.mean(np.maximum(sub - m, 0.0)))


@dataclass
class OscillationReport:
    value: float
    argmax: Box | None
    n_shapes: int
    n_exact: int = 0
    per_scale: dict = field(default_factory=dict)
    per_scale_exact: bool = False
    refined: bool = False
    unrefined_value: float = 0.0

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "argmax": None if self.argmax is None else self.argmax.to_json(),
            "n_shapes": self.n_shapes,
            "n_exact": self.n_exact,
            "refined": self.refined,
            "unrefined_value": self.unrefined_value,
            "per_scale_exact": self.per_scale_exact,
            "per_scale": [{"sides": list(k), "max": v} for k, v in self.per_scale.items()],
        }


def bmo_seminorm(
    f: GridFunction,
    b: BasisDescriptor,
    refine: bool = False,
    per_scale: bool = False,
    refine_top: int = 4,
) -> OscillationReport:
    """Max of ``O(f, S)`` over every cell-aligned shape of ``b``.

    With ``refine`` the best ``refine_top`` scales are re-optimised over real
    coordinates (see :func:`refine_shape`); the result never drops below the
    cell-aligned maximum.  ``per_scale`` makes every per-scale maximum exact
    at the price of weaker pruning.
    """
    if not b.cell_enumerable:
        raise NotEnumerableError(b.family.value)
    if f.dim > 3:
        raise OscboundError("seminorm scans support n <= 3")
    sides = basis_sides(b, f.extents)
    n_shapes = count_shapes(b, f.extents)
    if not sides:
        return OscillationReport(0.0, None, 0)
    if b.stride == 1:
        best, pos, n_exact = kernels.scan_boxes(f.values, sides, per_scale=per_scale)
        pos = pos[:, : f.dim]
    else:
        best = np.empty(len(sides))
        pos = np.zeros((len(sides), f.dim), dtype=np.int64)
        for k, s in enumerate(sides):
            osc = kernels.box_oscillations(f.values, s)[tuple(slice(None, None, b.stride) for _ in s)]
            j = np.unravel_index(int(np.argmax(osc)), osc.shape)
            best[k] = osc[j]
            pos[k] = np.asarray(j) * b.stride
        n_exact = n_shapes
        per_scale = True
    # ties go to the last scale in enumeration order (the largest cube)
    k = len(best) - 1 - int(np.argmax(best[::-1]))
    lo = tuple(int(p) for p in pos[k])
    arg = Box(lo, tuple(l + s for l, s in zip(lo, sides[k])))
    # recompute the winner on the grid module's extended-precision mean
    value = max(float(best[k]), mean_oscillation(f, arg))
    report = OscillationReport(
        value,
        arg,
        n_shapes,
        int(n_exact),
        {tuple(s): float(v) for s, v in zip(sides, best)},
        bool(per_scale),
        False,
        value,
    )
    if refine:
        order = np.argsort(-best, kind="stable")[:refine_top]
        for k in order:
            lo = tuple(int(p) for p in pos[k])
            start = Box(lo, tuple(l + s for l, s in zip(lo, sides[k])))
            shape, val = refine_shape(f, start, b.family)
            if val > report.value:
                report.value = val
                report.argmax = shape
        report.refined = True
    return report


def _family_params(box: Box, family: Family):
    """Free parameters of ``box`` within ``family``, the inverse map and the search directions.

    Cubes and false cubes are ``(lo, s)`` with sides ``s * scale``.  Besides
    the coordinate axes their directions include every corner-anchored
    rescaling: grow ``s`` while the high faces on a subset of axes stay put.
    """
    n = box.dim
    lo = np.asarray(box.lo, float)
    hi = np.asarray(box.hi, float)
    if family is Family.RECTANGLES:
        return np.concatenate([lo, hi]), lambda p: Box(tuple(p[:n]), tuple(p[n:])), np.eye(2 * n)
    t = falsecube_type(box.sides)
    if family is Family.CUBES or t.is_cube:
        scale = np.ones(n)
    else:
        scale = np.where(np.isin(np.arange(n), t.long_axes), 2.0, 1.0)
    s = box.sides[0] / scale[0]

    def build(p):
        return Box(tuple(p[:n]), tuple(p[:n] + p[n] * scale))

    dirs = list(np.eye(n + 1))
    for mask in range(1, 2 ** n):
        d = np.zeros(n + 1)
        d[n] = 1.0
        for a in range(n):
            if (mask >> a) & 1:
                d[a] = -scale[a]
        dirs.append(d)
    return np.concatenate([lo, [s]]), build, np.array(dirs)


def refine_shape(f: GridFunction, start: Box, family: Family = Family.RECTANGLES) -> tuple[Box, float]:
    """Pattern search on the real coordinates of ``start`` within its family.

    Moves along one search direction at a time by the current step, keeps any strict
    improvement of ``O``, halves the step when stuck.  Shapes stay inside the
    grid with sides of at least :data:`MIN_REFINED_SIDE` cells.  Custom
    families keep their side tuple fixed and only translate.
    """
    family = Family(family)
    ext = np.asarray(f.extents, float)
    if family is Family.CUSTOM:
        sides = np.asarray(start.sides, float)
        params = np.asarray(start.lo, float)
        build = lambda p: Box(tuple(p), tuple(p + sides))  # noqa: E731
        dirs = np.eye(params.size)
    else:
        params, build, dirs = _family_params(start, family)

    def value(p):
        box = build(p)
        lo, hi = np.asarray(box.lo), np.asarray(box.hi)
        if np.any(lo < 0) or np.any(hi > ext) or np.any(hi - lo < MIN_REFINED_SIDE):
            return -1.0
        return box_stats(f, box)[1]

    best = value(params)
    step = REFINE_START_STEP
    while step >= REFINE_MIN_STEP:
        improved = False
        for d in dirs:
            for sgn in (1.0, -1.0):
                trial = params + sgn * step * d
                v = value(trial)
                if v > best + 1e-13 * max(1.0, abs(best)):
                    params, best, improved = trial, v, True
                    break
        if not improved:
            step /= 2
    return build(params), best


def blo_functional(f: GridFunction, b: BasisDescriptor) -> tuple[float, Box | None]:
    """Max over the basis of ``mean_S f - min_S f``, with its argmax."""
    if not b.cell_enumerable:
        raise NotEnumerableError(b.family.value)
    t = PrefixSumTable(f)
    v = f.values
    best, arg = 0.0, None
    for s in basis_sides(b, f.extents):
        mins = v
        for a, k in enumerate(s):
            mins = np.lib.stride_tricks.sliding_window_view(mins, k, axis=a).min(axis=-1)
        valid = tuple(slice(None, None, b.stride) for _ in s)
        mins = mins[valid]
        means = _all_box_means(t, s)[valid]
        gap = means - mins
        j = np.unravel_index(int(np.argmax(gap)), gap.shape)
        if gap[j] > best:
            lo = tuple(int(i) * b.stride for i in j)
            best, arg = float(gap[j]), Box(lo, tuple(l + k for l, k in zip(lo, s)))
    return best, arg


def _all_box_means(t: PrefixSumTable, s: Sequence[int]) -> np.ndarray:
    """Means of every placement of side tuple ``s`` from an extended-precision table."""
    P = t.table
    n = len(s)
    out = np.zeros(tuple(d - k + 1 for d, k in zip(t.extents, s)), dtype=P.dtype)
    shape = out.shape
    for corner in np.ndindex(*(2,) * n):
        sl = tuple(slice(c * k, c * k + m) for c, k, m in zip(corner, s, shape))
        sign = -1 if (n - sum(corner)) % 2 else 1
        out += sign * P[sl]
    return (out / P.dtype.type(int(np.prod(s)))).astype(np.float64)


def all_box_means(f: GridFunction, s: Sequence[int], table: PrefixSumTable | None = None) -> np.ndarray:
    return _all_box_means(table or PrefixSumTable(f), tuple(int(k) for k in s))


# --------------------------------------------------------------------------
# false-cube gadgets


def partition_bounds(f: GridFunction, r: Box, bmo: float) -> tuple[float, float, float]:
    """``(2^-m sum |f_Q(nu) - f_R|, O(f, R), bmo + same sum)``."""
    _, _, cubes = subcube_partition(r)
    mean_r, osc = box_stats(f, r)
    means = np.array([box_stats(f, q)[0] for q in cubes])
    lower = math.fsum(np.abs(means - mean_r)) / len(cubes)
    return lower, osc, bmo + lower


@dataclass
class PartitionSweep:
    n_shapes: int
    worst_lower: float  # max of lower - osc (<= 0 expected)
    worst_upper: float  # max of osc - upper (<= 0 expected)
    worst_lower_shape: Box | None
    worst_upper_shape: Box | None


def partition_sweep(f: GridFunction, bmo: float, b: BasisDescriptor | None = None) -> PartitionSweep:
    """Check the subcube sandwich on every enumerated false cube that splits into subcubes."""
    b = b or BasisDescriptor(Family.FALSECUBES)
    t = PrefixSumTable(f)
    n = f.dim
    count = 0
    wl, wu = -math.inf, -math.inf
    wl_shape = wu_shape = None
    for s in basis_sides(b, f.extents):
        ft = falsecube_type(s)
        if ft.is_cube:
            if s[0] % 2:
                continue
            long_axes, k = tuple(range(n)), s[0] // 2
        else:
            long_axes, k = ft.long_axes, int(ft.k)
        osc = kernels.box_oscillations(f.values, s)
        mean_r = _all_box_means(t, s)
        sub = _all_box_means(t, (k,) * n)
        m = len(long_axes)
        acc = np.zeros(osc.shape)
        for j in range(2 ** m):
            off = [0] * n
            for i, a in enumerate(long_axes):
                if (j >> i) & 1:
                    off[a] = k
            sl = tuple(slice(o, o + d) for o, d in zip(off, osc.shape))
            acc += np.abs(sub[sl] - mean_r)
        lower = acc / 2 ** m
        count += osc.size
        dl = lower - osc
        du = osc - (bmo + lower)
        j = np.unravel_index(int(np.argmax(dl)), dl.shape)
        if dl[j] > wl:
            wl, wl_shape = float(dl[j]), Box(j, tuple(i + q for i, q in zip(j, s)))
        j = np.unravel_index(int(np.argmax(du)), du.shape)
        if du[j] > wu:
            wu, wu_shape = float(du[j]), Box(j, tuple(i + q for i, q in zip(j, s)))
    return PartitionSweep(count, wl, wu, wl_shape, wu_shape)


@dataclass
class NeighborGap:
    value: float
    pair: tuple | None


def neighbor_mean_gap(f: GridFunction) -> NeighborGap:
    """Max ``|f_Q1 - f_Q2|`` over equal cell-aligned cubes sharing a full face."""
    t = PrefixSumTable(f)
    best, pair = 0.0, None
    for k in range(1, min(f.extents) + 1):
        means = _all_box_means(t, (k,) * f.dim)
        for a in range(f.dim):
            if means.shape[a] <= k:
                continue
            lo = np.take(means, np.arange(means.shape[a] - k), axis=a)
            hi = np.take(means, np.arange(k, means.shape[a]), axis=a)
            gap = np.abs(hi - lo)
            j = np.unravel_index(int(np.argmax(gap)), gap.shape)
            if gap[j] > best:
                q1 = Box(j, tuple(i + k for i in j))
                j2 = tuple(i + (k if b == a else 0) for b, i in enumerate(j))
                best, pair = float(gap[j]), (q1, Box(j2, tuple(i + k for i in j2)))
    return NeighborGap(best, pair)


# --------------------------------------------------------------------------
# one-dimensional step functions


@dataclass
class IntervalReport:
    value: float
    interval: tuple  # in measure units
    cells: tuple  # [a, b) in cell indices


def step_seminorm(values: np.ndarray, cell: float = 1.0, refine: bool = False) -> IntervalReport:
    """Max of ``O`` over cell-aligned intervals of a 1-d sequence of cell values.

    Non-increasing input (a decreasing rearrangement) takes the binary-search
    fast path; anything else goes through the pruned box scan.
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size < 2:
        return IntervalReport(0.0, (0.0, v.size * cell), (0, v.size))
    if np.all(np.diff(v) <= 0):
        val, a, b = kernels.monotone_interval_scan(v)
    else:
        sides = np.arange(1, v.size + 1)[:, None]
        best, pos, _ = kernels.scan_boxes(v, sides)
        k = int(np.argmax(best))
        a = int(pos[k, 0])
        b = a + k + 1
        val = float(best[k])
    g = GridFunction(v, 1.0)
    exact = mean_oscillation(g, Box((a,), (b,)))
    val = max(float(val), exact)
    rep = IntervalReport(val, (a * cell, b * cell), (a, b))
    if refine:
        box, rv = refine_shape(g, Box((a,), (b,)), Family.RECTANGLES)
        if rv > rep.value:
            rep = IntervalReport(rv, (box.lo[0] * cell, box.hi[0] * cell), (box.lo[0], box.hi[0]))
    return rep


def step_function_seminorm(sf: StepFunction1D, cell: float, refine: bool = False) -> IntervalReport:
    """Seminorm of a step function whose pieces are whole cells of width ``cell``."""
    return step_seminorm(sf.cell_values(cell), cell, refine)

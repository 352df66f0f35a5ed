"""Distribution functions, decreasing rearrangements and radial symmetrisation.

Everything is exact at cell granularity: ``f*`` of a grid function is the
descending sort of ``|values|`` with pieces of width ``h**n``, and every
breakpoint is stored as ``count * h**n`` so that the distribution of ``f*``
reproduces the distribution of ``f`` bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyShapeError, OscboundError, ShapeError
from .grid import GridFunction
from .shapes import Ball, Box, Sector, omega, sector_for_ball


@dataclass(frozen=True, eq=False)
class StepFunction1D:
    """Right-continuous step function on ``[0, L)``, equal to ``tail`` beyond ``L``.

    Piece ``i`` is ``[breakpoints[i], breakpoints[i+1])`` with value
    ``values[i]``.  No pieces (``breakpoints == [0]``) is allowed and means
    the function is identically ``tail``.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        t = np.array(self.breakpoints, dtype=np.float64)
        v = np.array(self.values, dtype=np.float64)
        if t.ndim != 1 or v.ndim != 1 or t.size != v.size + 1:
            raise OscboundError("need len(breakpoints) == len(values) + 1")
        if t[0] != 0.0:
            raise OscboundError("first breakpoint must be 0")
        if np.any(np.diff(t) <= 0):
            raise OscboundError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(t))):
            raise OscboundError("step function must be finite")
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "breakpoints", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "tail", float(self.tail))

    @property
    def length(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def is_nonincreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0)) and (self.values.size == 0 or self.values[-1] >= self.tail)

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        idx = np.searchsorted(self.breakpoints, s, side="right") - 1
        table = np.append(self.values, self.tail)
        # s < 0 is outside the domain; report the first piece like s = 0
        vals = table[np.clip(idx, 0, self.values.size)]
        return vals if vals.ndim else float(vals)

    def _pieces(self, a: float, b: float):
        """Widths and values of the pieces meeting ``(a, b)``, tail included."""
        t = self.breakpoints
        lo = np.maximum(t[:-1], a)
        hi = np.minimum(t[1:], b)
        w = hi - lo
        keep = w > 0
        widths = list(w[keep])
        vals = list(self.values[keep])
        if b > self.length:
            widths.append(b - max(a, self.length))
            vals.append(self.tail)
        return np.asarray(widths), np.asarray(vals)

    def integral(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        w, v = self._pieces(a, b)
        return math.fsum(w * v)

    def mean(self, a: float, b: float) -> float:
        if not b > a:
            raise EmptyShapeError()
        return self.integral(a, b) / (b - a)

    def oscillation(self, a: float, b: float) -> float:
        """Mean oscillation over the interval ``(a, b)``, exact up to rounding."""
        if not b > a:
            raise EmptyShapeError()
        w, v = self._pieces(a, b)
        m = math.fsum(w * v) / (b - a)
        return math.fsum(w * np.abs(v - m)) / (b - a)

    def cell_values(self, cell: float) -> np.ndarray:
        """Values on consecutive cells of width ``cell`` (pieces must be whole cells)."""
        counts = np.rint(self.widths / cell).astype(np.int64)
        if not np.allclose(counts * cell, self.widths, rtol=1e-12, atol=0):
            raise OscboundError("pieces are not whole multiples of the cell width")
        return np.repeat(self.values, counts)

    def __sub__(self, other: "StepFunction1D") -> "StepFunction1D":
        t = np.union1d(self.breakpoints, other.breakpoints)
        mid = (t[:-1] + t[1:]) / 2
        return StepFunction1D(t, np.asarray(self(mid)) - np.asarray(other(mid)), self.tail - other.tail)

    def to_rows(self) -> list[tuple[float, float]]:
        """``(breakpoint, value)`` rows; the last row is ``(L, tail)``."""
        rows = [(float(t), float(v)) for t, v in zip(self.breakpoints[:-1], self.values)]
        rows.append((self.length, self.tail))
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["breakpoint", "value"])
        for t, v in self.to_rows():
            w.writerow([repr(t), repr(v)])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist(), "tail": self.tail}

    @classmethod
    def from_json(cls, d: dict) -> "StepFunction1D":
        return cls(d["breakpoints"], d["values"], d.get("tail", 0.0))

    def same_as(self, other: "StepFunction1D") -> bool:
        """Bit-exact equality as step functions (no merging of equal neighbours)."""
        return (
            np.array_equal(self.breakpoints, other.breakpoints)
            and np.array_equal(self.values, other.values)
            and self.tail == other.tail
        )


def distribution(f: GridFunction) -> StepFunction1D:
    """``mu_f(alpha) = |{|f| > alpha}|`` as a step function of ``alpha >= 0``."""
    a = np.abs(f.values).ravel()
    u, counts = np.unique(a, return_counts=True)
    return _distribution_from_counts(u, counts, f.cell_measure)


def _distribution_from_counts(levels, counts, cell) -> StepFunction1D:
    pos = levels > 0
    levels, counts = levels[pos], counts[pos]
    if levels.size == 0:
        return StepFunction1D([0.0], [])
    # above alpha in [levels[j-1], levels[j]) lie all cells with level index >= j
    above = np.cumsum(counts[::-1])[::-1]
    return StepFunction1D(np.concatenate([[0.0], levels]), above.astype(np.float64) * cell)


def distribution_of_step(g: StepFunction1D) -> StepFunction1D:
    """Distribution of a step function on ``[0, L)`` (``|g|``; tail assumed 0)."""
    if g.is_nonincreasing() and np.all(g.values >= 0):
        # mu(alpha) is the right end of the last piece above alpha; reuse the breakpoints
        vals, first = np.unique(g.values[::-1], return_index=True)
        ends = g.breakpoints[g.values.size - first]
        pos = vals > 0
        if not np.any(pos):
            return StepFunction1D([0.0], [])
        return StepFunction1D(np.concatenate([[0.0], vals[pos]]), ends[pos])
    a = np.abs(g.values)
    levels = np.unique(a[a > 0])
    mus = [math.fsum(g.widths[a > lev]) for lev in np.concatenate([[0.0], levels[:-1]])]
    if levels.size == 0:
        return StepFunction1D([0.0], [])
    return StepFunction1D(np.concatenate([[0.0], levels]), mus)


def decreasing_rearrangement(f: GridFunction) -> StepFunction1D:
    """``f*`` on ``(0, |Omega|)``: descending ``|values|``, equal neighbours merged."""
    a = np.abs(f.values).ravel()
    u, counts = np.unique(a, return_counts=True)
    u, counts = u[::-1], counts[::-1]
    ends = np.cumsum(counts).astype(np.float64) * f.cell_measure
    return StepFunction1D(np.concatenate([[0.0], ends]), u)


def sorted_cells(f: GridFunction) -> np.ndarray:
    """``f*`` sampled cell by cell (length ``n_cells``)."""
    return np.sort(np.abs(f.values).ravel())[::-1]


def hardy_littlewood_check(f: GridFunction, cells) -> tuple[float, float]:
    """Both sides of ``int_A |f| <= int_0^{|A|} f*`` for a set ``A`` of cells.

    ``cells`` is a boolean mask shaped like the grid or an array of flat
    indices.  Both sums are correctly rounded (``math.fsum``) before the
    common factor ``h**n``, so rounding preserves the inequality.
    """
    a = np.abs(f.values).ravel()
    sel = np.asarray(cells)
    if sel.dtype == bool:
        picked = a[sel.ravel()]
    else:
        picked = a[np.unique(sel.ravel())]
    k = picked.size
    if k == 0:
        raise EmptyShapeError("empty cell set")
    top = np.sort(a)[::-1][:k]
    return math.fsum(picked) * f.cell_measure, math.fsum(top) * f.cell_measure


# --------------------------------------------------------------------------
# radial functions


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """``x -> profile(omega_n |x|^n)`` on R^n."""

    profile: StepFunction1D
    dim: int

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        r = np.sqrt(np.sum(pts * pts, axis=1))
        return np.asarray(self.profile(omega(self.dim) * r ** self.dim))

    @property
    def support_radius(self) -> float:
        return (self.profile.length / omega(self.dim)) ** (1.0 / self.dim)


def symmetrize(f: GridFunction) -> RadialFunction:
    return RadialFunction(decreasing_rearrangement(f), f.dim)


class RadialSupportWarning(UserWarning):
    """The rasterisation box does not contain the support of the radial function."""


def rasterize_radial(
    rf: RadialFunction, extents: Sequence[int], h: float, k: int = 4, origin=None
) -> GridFunction:
    """Cell averages of ``rf`` from ``k**n`` stratified samples per cell."""
    if k < 1:
        raise OscboundError("supersample factor must be >= 1")
    n = rf.dim
    extents = tuple(int(d) for d in extents)
    if len(extents) != n:
        raise OscboundError("extents do not match the radial function's dimension")
    if origin is None:
        origin = tuple(-d * h / 2 for d in extents)
    R = rf.support_radius
    if any(o > -R or o + d * h < R for o, d in zip(origin, extents)):
        if rf.profile.values.size and np.any(rf.profile.values != rf.profile.tail):
            warnings.warn("support of the radial function leaves the grid", RadialSupportWarning, stacklevel=2)
    sub = (np.arange(k) + 0.5) / k
    r2 = np.zeros(())
    for a, d in enumerate(extents):
        x = origin[a] + h * (np.arange(d)[:, None] + sub[None, :]).ravel()
        r2 = r2[..., None] + (x * x).reshape((1,) * a + (-1,))
    vals = np.asarray(rf.profile(omega(n) * r2 ** (n / 2)))
    shape = []
    for d in extents:
        shape += [d, k]
    vals = vals.reshape(shape).mean(axis=tuple(range(1, 2 * n, 2)))
    return GridFunction(vals, h, origin)


# --------------------------------------------------------------------------
# radial reduction


def radial_reduction(a) -> tuple[float, float]:
    """Interval ``I`` in the measure variable ``s = omega_n r^n`` covered by ``a``."""
    if isinstance(a, Ball):
        if not a.is_centered():
            raise ShapeError("not in basis A: ball is not centred at the origin")
        return 0.0, a.measure()
    if isinstance(a, Sector):
        if not a.in_basis_A():
            raise ShapeError("not in basis A: rho != |x| sin(alpha)")
        lo, hi = a.radial_extent
        w = omega(a.dim)
        return w * lo ** a.dim, w * hi ** a.dim
    raise ShapeError("not in basis A")


def interval_to_shape(interval: tuple[float, float], n: int):
    """Shape of the sector basis whose radial image is ``interval``."""
    s0, s1 = (float(t) for t in interval)
    if not 0 <= s0 < s1:
        raise OscboundError("need 0 <= left endpoint < right endpoint")
    w = omega(n)
    if s0 == 0:
        return Ball((0.0,) * n, (s1 / w) ** (1.0 / n))
    a, b = (s0 / w) ** (1.0 / n), (s1 / w) ** (1.0 / n)
    R = (a + b) / 2
    rho = (b - a) / 2
    if rho >= R:
        raise ShapeError("no admissible sector")
    x = (R,) + (0.0,) * (n - 1)
    alpha = math.asin(rho / R)
    # keep rho == |x| sin(alpha) exact for the basis check
    return Sector(x, R * math.sin(alpha), alpha)


def radial_oscillation(rf: RadialFunction, a) -> float:
    """``O(rf, a)`` for ``a`` in the sector basis, via the radial reduction."""
    s0, s1 = radial_reduction(a)
    return rf.profile.oscillation(s0, s1)


@dataclass(frozen=True)
class LocalInterval:
    interval: tuple
    sector: object
    diameter: float
    bound: float

    @property
    def length(self) -> float:
        return self.interval[1] - self.interval[0]


def local_interval_for_cube(q: Box, R: float) -> LocalInterval:
    """Radial interval of the sector built around the ball ``B(x, d/2)`` containing cube ``q``."""
    if not q.is_cube():
        raise ShapeError("not a cube")
    n = q.dim
    d = math.sqrt(n) * q.sides[0]
    x = q.center
    if float(np.linalg.norm(x)) > R - d / 2 + 1e-12 * R:
        raise ShapeError("cube not inside B(0, R) with |x| <= R - d/2")
    w = sector_for_ball(Ball(x, d / 2))
    I = radial_reduction(w.middle)
    bound = n * omega(n) * R ** (n - 1) * d
    if I[1] - I[0] > bound * (1 + 1e-12):
        raise AssertionError(f"interval length {I[1] - I[0]} exceeds {bound}")
    return LocalInterval(I, w.middle, d, bound)


def step_to_json(sf: StepFunction1D) -> str:
    return json.dumps(sf.to_json())


def polar_oscillation(profile: StepFunction1D, a) -> tuple[float, float]:
    """``(mean, O)`` of ``x -> profile(omega_n |x|^n)`` over a ball or sector by polar integration.

    Works in the radius variable: each profile piece becomes a spherical
    shell ``(r_i, r_{i+1})`` whose intersection with the shape has volume
    ``cap * omega_n * (hi^n - lo^n)``.  The total is the shape's own measure,
    so this route shares no arithmetic with :func:`radial_reduction`.
    """
    from .shapes import cap_fraction

    if isinstance(a, Ball):
        if not a.is_centered():
            raise ShapeError("not in basis A: ball is not centred at the origin")
        n, lo, hi, cap = a.dim, 0.0, a.r, 1.0
    elif isinstance(a, Sector):
        n = a.dim
        lo, hi = a.radial_extent
        cap = cap_fraction(n, a.alpha)
    else:
        raise ShapeError("not in basis A")
    w = omega(n)
    radii = (profile.breakpoints / w) ** (1.0 / n)
    r0 = np.maximum(radii[:-1], lo)
    r1 = np.minimum(radii[1:], hi)
    keep = r1 > r0
    vols = list(cap * w * (r1[keep] ** n - r0[keep] ** n))
    vals = list(profile.values[keep])
    if hi > radii[-1]:
        vols.append(cap * w * (hi ** n - max(lo, radii[-1]) ** n))
        vals.append(profile.tail)
    vols, vals = np.asarray(vols), np.asarray(vals)
    total = a.measure()
    m = math.fsum(vols * vals) / total
    return m, math.fsum(vols * np.abs(vals - m)) / total

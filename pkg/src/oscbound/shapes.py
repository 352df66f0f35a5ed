"""Shapes, shape bases and the explicit containment constructions between them.

Three shape kinds exist:

* :class:`Box` -- an axis-parallel box.  On grids its corners are given in
  cell-index units (integers for cell-aligned boxes, reals after refinement
  or for rising-sun intervals).  In the analytic constructions it is just a
  box in R^n.
* :class:`Ball` -- open Euclidean ball ``B(x, r)``.
* :class:`Sector` -- annular sector ``A(x, rho, alpha)``: points whose radius
  lies within ``rho`` of ``|x|`` and whose angle to ``x`` is below ``alpha``.

Balls and sectors are never rasterised onto grids; they enter through the
witnesses below and through the radial reduction in
:mod:`oscbound.rearrangement`.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy import integrate

from .errors import NotEnumerableError, OscboundError, ShapeError

# relative tolerance for "rho == |x| sin(alpha)" and for cube side equality
GEOM_RTOL = 1e-12


def omega(n: int) -> float:
    """Volume of the unit ball in R^n, pi^(n/2) / Gamma(n/2 + 1)."""
    if n < 1:
        raise OscboundError("dimension must be >= 1")
    if n % 2 == 0:
        k = n // 2
        return math.pi ** k / math.factorial(k)
    # Gamma(k + 3/2) = (2k+2)! sqrt(pi) / (4^(k+1) (k+1)!) with n = 2k + 1
    k = (n - 1) // 2
    gamma = math.factorial(2 * k + 2) * math.sqrt(math.pi) / (4 ** (k + 1) * math.factorial(k + 1))
    return math.pi ** (n / 2) / gamma


def cap_fraction(n: int, alpha: float) -> float:
    """Fraction of the unit sphere S^(n-1) within angle ``alpha`` of a pole."""
    if not 0 < alpha <= math.pi:
        raise OscboundError("aperture must lie in (0, pi]")
    if n == 1:
        # S^0 = {-1, +1}; a cap of aperture below pi holds one of the two points
        return 0.5 if alpha < math.pi else 1.0
    if n == 2:
        return alpha / math.pi
    if n == 3:
        return (1.0 - math.cos(alpha)) / 2.0
    num, _ = integrate.quad(lambda t: math.sin(t) ** (n - 2), 0.0, alpha, epsabs=0.0, epsrel=1e-13, limit=200)
    den = math.sqrt(math.pi) * math.gamma((n - 1) / 2) / math.gamma(n / 2)
    return num / den


def _vec(x) -> tuple:
    return tuple(float(c) for c in np.atleast_1d(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(np.atleast_1d(self.lo).tolist())
        hi = tuple(np.atleast_1d(self.hi).tolist())
        if len(lo) != len(hi):
            raise OscboundError("box corners differ in dimension")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def sides(self) -> tuple:
        return tuple(u - l for l, u in zip(self.lo, self.hi))

    @property
    def center(self) -> np.ndarray:
        return (np.asarray(self.lo, float) + np.asarray(self.hi, float)) / 2

    def measure(self, cell_size: float = 1.0) -> float:
        return float(np.prod(self.sides)) * cell_size ** self.dim

    def is_aligned(self) -> bool:
        return all(float(c).is_integer() for c in self.lo + self.hi)

    def int_corners(self) -> tuple[tuple, tuple]:
        return tuple(int(c) for c in self.lo), tuple(int(c) for c in self.hi)

    def is_cube(self) -> bool:
        s = self.sides
        return all(abs(t - s[0]) <= GEOM_RTOL * abs(s[0]) for t in s)

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.all((pts > np.asarray(self.lo)) & (pts < np.asarray(self.hi)), axis=1)

    def contains_box(self, other: "Box", tol: float = 0.0) -> bool:
        return all(a <= b + tol for a, b in zip(self.lo, other.lo)) and all(
            b <= a + tol for a, b in zip(self.hi, other.hi)
        )

    def to_json(self) -> dict:
        def num(c):
            return int(c) if float(c).is_integer() else float(c)

        return {"type": "box", "lo": [num(c) for c in self.lo], "hi": [num(c) for c in self.hi]}


@dataclass(frozen=True)
class Ball:
    x: tuple
    r: float

    def __post_init__(self):
        object.__setattr__(self, "x", _vec(self.x))
        object.__setattr__(self, "r", float(self.r))
        if not self.r > 0:
            raise ShapeError("invalid shape: ball radius must be positive")

    @property
    def dim(self) -> int:
        return len(self.x)

    def is_centered(self) -> bool:
        return all(c == 0.0 for c in self.x)

    def measure(self) -> float:
        return omega(self.dim) * self.r ** self.dim

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.sum((pts - np.asarray(self.x)) ** 2, axis=1) < self.r ** 2

    def to_json(self) -> dict:
        return {"type": "ball", "x": list(self.x), "r": self.r}


@dataclass(frozen=True)
class Sector:
    x: tuple
    rho: float
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "x", _vec(self.x))
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "alpha", float(self.alpha))
        norm = self.radius
        if norm == 0:
            raise ShapeError("invalid shape: sector centre must be nonzero")
        if not 0 < self.rho <= norm * (1 + GEOM_RTOL):
            raise ShapeError("invalid shape: sector half-width must lie in (0, |x|]")
        if not 0 < self.alpha <= math.pi / 2 * (1 + GEOM_RTOL):
            raise ShapeError("invalid shape: sector aperture must lie in (0, pi/2]")

    @property
    def dim(self) -> int:
        return len(self.x)

    @property
    def radius(self) -> float:
        return math.sqrt(sum(c * c for c in self.x))

    @property
    def radial_extent(self) -> tuple[float, float]:
        R = self.radius
        return max(R - self.rho, 0.0), R + self.rho

    def in_basis_A(self) -> bool:
        target = self.radius * math.sin(self.alpha)
        return abs(self.rho - target) <= GEOM_RTOL * max(self.rho, target)

    def measure(self) -> float:
        a, b = self.radial_extent
        n = self.dim
        return cap_fraction(n, self.alpha) * omega(n) * (b ** n - a ** n)

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        x = np.asarray(self.x)
        R = self.radius
        r = np.sqrt(np.sum(pts ** 2, axis=1))
        return (R - self.rho < r) & (r < R + self.rho) & (pts @ x > R * r * math.cos(self.alpha))

    def to_json(self) -> dict:
        return {"type": "sector", "x": list(self.x), "rho": self.rho, "alpha": self.alpha}


Shape = Box | Ball | Sector


def shape_from_json(d: dict) -> Shape:
    kind = d.get("type")
    if kind == "box":
        return Box(tuple(d["lo"]), tuple(d["hi"]))
    if kind == "ball":
        return Ball(d["x"], d["r"])
    if kind == "sector":
        return Sector(d["x"], d["rho"], d["alpha"])
    raise OscboundError(f"unknown shape type {kind!r}")


def shape_measure(s: Shape) -> float:
    return s.measure()


def sector_measure(a: Shape) -> float:
    """Lebesgue measure of a sector or ball."""
    if isinstance(a, (Sector, Ball)):
        return a.measure()
    raise ShapeError(f"expected a sector or ball, got {type(a).__name__}")


# --------------------------------------------------------------------------
# bases


class Family(str, enum.Enum):
    CUBES = "cubes"
    RECTANGLES = "rectangles"
    FALSECUBES = "falsecubes"
    BALLS = "balls"
    SECTORS = "sectors"
    CUSTOM = "custom"


@dataclass(frozen=True)
class BasisDescriptor:
    """Enumerable family of cell-aligned shapes.

    ``permuted`` only affects false cubes: long sides may sit on any ``m``
    axes instead of the leading ones.  ``sides`` lists the side tuples of a
    custom family.
    """

    family: Family
    max_side: int | None = None
    stride: int = 1
    permuted: bool = False
    sides: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.stride < 1:
            raise OscboundError("stride must be >= 1")
        if self.family is Family.CUSTOM and not self.sides:
            raise OscboundError("custom basis needs explicit side tuples")

    @property
    def cell_enumerable(self) -> bool:
        return self.family not in (Family.BALLS, Family.SECTORS)


CUBES = BasisDescriptor(Family.CUBES)
RECTANGLES = BasisDescriptor(Family.RECTANGLES)
FALSECUBES = BasisDescriptor(Family.FALSECUBES)


def falsecube_sides(n: int, m: int, k: int, long_axes: Sequence[int] | None = None) -> tuple:
    long_axes = range(m) if long_axes is None else long_axes
    return tuple(2 * k if a in long_axes else k for a in range(n))


def basis_sides(b: BasisDescriptor, extents: Sequence[int]) -> list[tuple]:
    """Side tuples (in cells) of every shape scale in ``b`` that fits the grid."""
    if not b.cell_enumerable:
        raise NotEnumerableError(b.family.value)
    n = len(extents)
    cap = b.max_side or max(extents)
    fits = lambda s: all(t <= min(d, cap) for t, d in zip(s, extents))  # noqa: E731
    out: list[tuple] = []
    if b.family is Family.CUBES:
        out = [(k,) * n for k in range(1, min(min(extents), cap) + 1)]
    elif b.family is Family.RECTANGLES:
        out = list(itertools.product(*(range(1, min(d, cap) + 1) for d in extents)))
    elif b.family is Family.FALSECUBES:
        out = [(k,) * n for k in range(1, min(min(extents), cap) + 1)]
        for m in range(1, n):
            for k in range(1, max(extents) + 1):
                if b.permuted:
                    arrangements = sorted(set(itertools.permutations((2 * k,) * m + (k,) * (n - m))))
                else:
                    arrangements = [falsecube_sides(n, m, k)]
                out.extend(s for s in arrangements if fits(s))
    else:
        for s in b.sides:
            s = tuple(int(t) for t in s)
            if len(s) != n:
                raise OscboundError(f"custom side tuple {s} does not match a {n}-d grid")
            if fits(s) and s not in out:
                out.append(s)
    return out


def placements(sides: Sequence[int], extents: Sequence[int], stride: int = 1) -> Iterator[tuple]:
    return itertools.product(*(range(0, d - s + 1, stride) for s, d in zip(sides, extents)))


def count_shapes(b: BasisDescriptor, extents: Sequence[int]) -> int:
    total = 0
    for s in basis_sides(b, extents):
        c = 1
        for t, d in zip(s, extents):
            c *= len(range(0, d - t + 1, b.stride))
        total += c
    return total


def enumerate_basis(b: BasisDescriptor, g) -> Iterator[Box]:
    """Every cell-aligned shape of ``b`` inside the grid of ``g``, each once."""
    extents = g.extents if hasattr(g, "extents") else tuple(g)
    for s in basis_sides(b, extents):
        for lo in placements(s, extents, b.stride):
            yield Box(lo, tuple(l + t for l, t in zip(lo, s)))


@dataclass(frozen=True)
class FalseCubeType:
    m: int
    k: float
    long_axes: tuple

    @property
    def is_cube(self) -> bool:
        return self.m == 0


def falsecube_type(sides: Sequence[float]) -> FalseCubeType | None:
    """Classify a side tuple: cube (m = 0, side k) or false cube (m long sides 2k)."""
    sides = tuple(float(s) for s in sides)
    lo, hi = min(sides), max(sides)
    if abs(hi - lo) <= GEOM_RTOL * hi:
        return FalseCubeType(0, lo, ())
    if abs(hi - 2 * lo) > GEOM_RTOL * hi:
        return None
    long_axes = tuple(a for a, s in enumerate(sides) if abs(s - hi) <= GEOM_RTOL * hi)
    if len(long_axes) + sum(abs(s - lo) <= GEOM_RTOL * hi for s in sides) != len(sides):
        return None
    return FalseCubeType(len(long_axes), lo, long_axes)


def bisect_falsecube(box: Box) -> tuple[Box, Box]:
    """Split a false cube along its last long axis (a cube: along its last axis)."""
    t = falsecube_type(box.sides)
    if t is None:
        raise ShapeError("not a false cube")
    axis = box.dim - 1 if t.is_cube else t.long_axes[-1]
    mid = (box.lo[axis] + box.hi[axis]) / 2
    if float(box.lo[axis]).is_integer() and float(box.hi[axis]).is_integer() and float(mid).is_integer():
        mid = int(mid)
    hi1 = tuple(mid if a == axis else c for a, c in enumerate(box.hi))
    lo2 = tuple(mid if a == axis else c for a, c in enumerate(box.lo))
    return Box(box.lo, hi1), Box(lo2, box.hi)


def subcube_partition(box: Box) -> tuple[int, tuple, list[Box]]:
    """Decompose a false cube into ``2**m`` equal cubes ``Q(nu)``.

    Returns ``(m, long_axes, cubes)`` where ``cubes[j]`` is indexed by the
    bit string ``nu`` with ``nu_i = (j >> i) & 1`` selecting the upper half
    along ``long_axes[i]``.  A cube of even side counts as ``m = n``.
    """
    t = falsecube_type(box.sides)
    if t is None:
        raise ShapeError("not a false cube")
    if t.is_cube:
        long_axes = tuple(range(box.dim))
        k = t.k / 2
    else:
        long_axes = t.long_axes
        k = t.k
    if box.is_aligned() and not float(k).is_integer():
        raise ShapeError("not a false cube: cube side is odd, no cell-aligned subcubes")
    if float(k).is_integer():
        k = int(k)
    m = len(long_axes)
    cubes = []
    for j in range(2 ** m):
        lo = list(box.lo)
        for i, a in enumerate(long_axes):
            if (j >> i) & 1:
                lo[a] = box.lo[a] + k
        cubes.append(Box(tuple(lo), tuple(l + k for l in lo)))
    return m, long_axes, cubes


# --------------------------------------------------------------------------
# equivalence witnesses


@dataclass(frozen=True)
class EquivalenceWitness:
    """Nested shapes ``inner < middle < outer`` with their measure ratios.

    ``middle`` is ``None`` for two-shape witnesses (cube inside ball, ball
    inside cube).
    """

    inner: Shape
    middle: Shape | None
    outer: Shape
    ratios: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "inner": self.inner.to_json(),
            "middle": None if self.middle is None else self.middle.to_json(),
            "outer": self.outer.to_json(),
            "ratios": dict(self.ratios),
        }


def circumscribe_cube_ball(s: Shape) -> EquivalenceWitness:
    """Cube of side l inside the ball of radius sqrt(n) l / 2, or ball inside a cube of side 2r."""
    if isinstance(s, Box):
        if not s.is_cube():
            raise ShapeError("not a cube")
        n = s.dim
        ell = s.sides[0]
        ball = Ball(s.center, math.sqrt(n) * ell / 2)
        return EquivalenceWitness(s, None, ball, {"outer/inner": ball.measure() / s.measure()})
    if isinstance(s, Ball):
        c = np.asarray(s.x)
        cube = Box(tuple(c - s.r), tuple(c + s.r))
        return EquivalenceWitness(s, None, cube, {"outer/inner": cube.measure() / s.measure()})
    raise ShapeError("not a cube")


def sector_for_ball(b: Ball) -> EquivalenceWitness:
    """``B < A < B~`` with ``A`` in the sector basis and ``|B~| = 2^n |B|``."""
    if not isinstance(b, Ball):
        raise ShapeError("expected a ball")
    n = b.dim
    x = np.asarray(b.x)
    norm = float(np.linalg.norm(x))
    if norm < b.r:
        middle = Ball((0.0,) * n, norm + b.r)
        outer = Ball((0.0,) * n, 2 * b.r)
    else:
        alpha = math.asin(min(1.0, b.r / norm))
        middle = Sector(b.x, b.r, alpha)
        outer = Ball(math.cos(alpha) * x, 2 * b.r)
    return _nested(b, middle, outer)


def ball_for_sector(a: Shape) -> EquivalenceWitness:
    """``B < A < B~`` for ``A`` a centred ball or a sector with ``rho = |x| sin(alpha)``."""
    if isinstance(a, Ball):
        if not a.is_centered():
            raise ShapeError("not in basis A: ball is not centred at the origin")
        return _nested(a, a, Ball(a.x, 2 * a.r))
    if isinstance(a, Sector):
        if not a.in_basis_A():
            raise ShapeError("not in basis A: rho != |x| sin(alpha)")
        x = np.asarray(a.x)
        inner = Ball(a.x, a.rho)
        outer = Ball(math.cos(a.alpha) * x, 2 * a.rho)
        return _nested(inner, a, outer)
    raise ShapeError("not in basis A")


def _nested(inner, middle, outer) -> EquivalenceWitness:
    mi, mm, mo = inner.measure(), middle.measure(), outer.measure()
    return EquivalenceWitness(inner, middle, outer, {"outer/inner": mo / mi, "middle/inner": mm / mi, "outer/middle": mo / mm})


# --------------------------------------------------------------------------
# sampling


def _orthonormal_frame(direction: np.ndarray) -> np.ndarray:
    """Rows form an orthonormal basis whose first row is ``direction``/|direction|."""
    n = direction.size
    d = direction / np.linalg.norm(direction)
    m = np.eye(n)
    m[:, 0] = d
    q, _ = np.linalg.qr(m)
    if q[:, 0] @ d < 0:
        q[:, 0] = -q[:, 0]
    return q.T


def sample_uniform(s: Shape, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` points uniformly distributed in the open shape ``s``."""
    if isinstance(s, Box):
        lo, hi = np.asarray(s.lo, float), np.asarray(s.hi, float)
        return lo + (hi - lo) * rng.random((count, s.dim))
    if isinstance(s, Ball):
        n = s.dim
        d = rng.standard_normal((count, n))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        rad = s.r * rng.random(count) ** (1.0 / n)
        return np.asarray(s.x) + d * rad[:, None]
    if isinstance(s, Sector):
        # rejection from a box in the frame aligned with x
        n = s.dim
        frame = _orthonormal_frame(np.asarray(s.x))
        R = s.radius
        outer = R + s.rho
        lo_axial = (R - s.rho) * math.cos(s.alpha)
        half_perp = outer * math.sin(s.alpha)
        out = np.empty((0, n))
        while out.shape[0] < count:
            batch = max(2 * (count - out.shape[0]), 1024)
            local = np.empty((batch, n))
            local[:, 0] = lo_axial + (outer - lo_axial) * rng.random(batch)
            local[:, 1:] = (2 * rng.random((batch, n - 1)) - 1) * half_perp
            pts = local @ frame
            out = np.vstack([out, pts[s.contains(pts)]])
        return out[:count]
    raise ShapeError(f"cannot sample {type(s).__name__}")


def witness_violations(w: EquivalenceWitness, count: int, rng: np.random.Generator) -> int:
    """Number of sampled points breaking ``inner < middle < outer``."""
    bad = 0
    pts = sample_uniform(w.inner, count, rng)
    nxt = w.middle if w.middle is not None else w.outer
    bad += int(np.count_nonzero(~nxt.contains(pts)))
    if w.middle is not None:
        pts = sample_uniform(w.middle, count, rng)
        bad += int(np.count_nonzero(~w.outer.contains(pts)))
    return bad

"""Calderon-Zygmund decompositions on grids and their validator.

A decomposition at level ``gamma`` with constant ``c*`` is a list of pairs
``(S_i, P_i)`` with

* (i)   ``S_i`` inside ``P_i`` and ``|P_i| <= c* |S_i|``,
* (ii)  ``mean_{P_i} g <= gamma <= mean_{S_i} g``,
* (iii) ``g <= gamma`` on every cell outside the union of the ``P_i``,

and the ``S_i`` pairwise disjoint.  Three constructors are provided:
dyadic stopping time (``c* = 2^n``), bisection of false cubes (``c* = 2``)
and the one-dimensional rising sun (``c* = 1``, ``S_i = P_i``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CZError, OscboundError
from .grid import GridFunction, PrefixSumTable
from .oscillation import box_stats
from .rearrangement import decreasing_rearrangement
from .shapes import Box, bisect_falsecube, falsecube_sides

# relative slack of the validator; scaled by max(1, max |g|)
VALIDATION_RTOL = 1e-12


@dataclass
class CZDecomposition:
    level: float
    cstar: float
    pairs: list  # [(S, parent)]
    method: str
    t: float | None = None
    exact_endpoints: list | None = None  # rising sun: Fraction endpoints in cell units

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "cstar": self.cstar,
            "method": self.method,
            "t": self.t,
            "pairs": [{"S": s.to_json(), "parent": p.to_json()} for s, p in self.pairs],
        }


def level_from_t(g: GridFunction, t: float) -> float:
    """Mean of ``g*`` over ``(0, t)``."""
    if not 0 < t <= g.measure * (1 + 1e-15):
        raise OscboundError(f"t out of range: need 0 < t <= {g.measure}")
    gs = decreasing_rearrangement(g)
    return gs.integral(0.0, min(t, g.measure)) / t


def mean_ceiling(g: GridFunction) -> float:
    """Smallest float not below the exact mean of ``g`` (the lowest level the rising sun accepts)."""
    exact = sum((Fraction(float(v)) for v in g.values.ravel()), Fraction(0)) / g.values.size
    m = float(exact)
    return m if Fraction(m) >= exact else float(np.nextafter(m, np.inf))


def _check_nonnegative(g: GridFunction):
    if np.any(g.values < 0):
        raise CZError("g must be nonnegative")


def _pow2_divisor(d: int) -> int:
    return d & -d


def _base_tiles(extents, side_tuple):
    for lo in np.ndindex(*(d // s for d, s in zip(extents, side_tuple))):
        lo = tuple(int(i) * s for i, s in zip(lo, side_tuple))
        yield Box(lo, tuple(l + s for l, s in zip(lo, side_tuple)))


def dyadic_cz(g: GridFunction, gamma: float | None = None, t: float | None = None) -> CZDecomposition:
    """Stopping-time halving of power-of-two cubes into their ``2^n`` children.

    Children with mean strictly above ``gamma`` are selected together with
    their parent.  The base side is the smallest power-of-two side with cube
    measure ``>= t`` when ``t`` is given, otherwise the largest power-of-two
    side tiling the grid.
    """
    _check_nonnegative(g)
    if gamma is None:
        if t is None:
            raise OscboundError("give a level or a target measure t")
        gamma = level_from_t(g, t)
    n = g.dim
    cap = min(_pow2_divisor(d) for d in g.extents)
    side = cap
    if t is not None:
        side = 1
        while side ** n * g.cell_measure < t * (1 - 1e-15) and side < cap:
            side *= 2
        if side ** n * g.cell_measure < t * (1 - 1e-15):
            raise CZError("no power-of-two cube of measure >= t tiles the grid")
    table = PrefixSumTable(g)
    tol = VALIDATION_RTOL * max(1.0, float(np.max(np.abs(g.values))))
    pairs = []
    stack = []
    for q in _base_tiles(g.extents, (side,) * n):
        if table.box_mean(*q.int_corners()) > gamma + tol:
            raise CZError(f"level below base mean on {q.to_json()}")
        stack.append(q)
    while stack:
        q = stack.pop()
        half = q.sides[0] // 2
        if half < 1:
            continue
        for corner in np.ndindex(*(2,) * n):
            lo = tuple(l + c * half for l, c in zip(q.lo, corner))
            child = Box(lo, tuple(l + half for l in lo))
            if table.box_mean(*child.int_corners()) > gamma:
                pairs.append((child, q))
            else:
                stack.append(child)
    pairs.sort(key=lambda p: (p[0].lo, p[0].hi))
    return CZDecomposition(float(gamma), float(2 ** n), pairs, "dyadic", t)


def bisection_tile(extents, cell_measure: float, t: float) -> tuple:
    """Side tuple of the smallest false-cube tile of measure ``>= t`` tiling the grid."""
    n = len(extents)
    for e in range(0, 64):
        j, m = divmod(e, n)
        sides = falsecube_sides(n, m, 2 ** j) if m else (2 ** j,) * n
        if any(s > d for s, d in zip(sides, extents)):
            break
        if 2 ** e * cell_measure >= t * (1 - 1e-15) and all(d % s == 0 for s, d in zip(sides, extents)):
            return sides
    raise CZError("no power-of-two false cube of measure >= t tiles the grid")


def bisection_cz(g: GridFunction, t: float, gamma: float | None = None) -> CZDecomposition:
    """Repeated bisection of false cubes; children with mean ``>= gamma`` are selected.

    ``gamma`` defaults to the mean of ``g*`` over ``(0, t)``; every tile of
    measure at least ``t`` then has mean at most ``gamma``.
    """
    _check_nonnegative(g)
    if not 0 < t <= g.measure * (1 + 1e-15):
        raise OscboundError(f"t out of range: need 0 < t <= {g.measure}")
    if gamma is None:
        gamma = level_from_t(g, t)
    sides = bisection_tile(g.extents, g.cell_measure, t)
    table = PrefixSumTable(g)
    tol = VALIDATION_RTOL * max(1.0, float(np.max(np.abs(g.values))))
    pairs = []
    stack = []
    for q in _base_tiles(g.extents, sides):
        if table.box_mean(*q.int_corners()) > gamma + tol:
            raise CZError(f"level below base mean on {q.to_json()}")
        stack.append(q)
    while stack:
        r = stack.pop()
        if all(s == 1 for s in r.sides):
            continue
        for child in bisect_falsecube(r):
            if table.box_mean(*child.int_corners()) >= gamma:
                pairs.append((child, r))
            else:
                stack.append(child)
    pairs.sort(key=lambda p: (p[0].lo, p[0].hi))
    return CZDecomposition(float(gamma), 2.0, pairs, "bisection", t)


def rising_sun_1d(g: GridFunction, gamma: float) -> CZDecomposition:
    """Intervals on which the mean of ``g`` equals ``gamma`` exactly, ``g <= gamma`` elsewhere.

    Works on ``G(x) = int_0^x (g - gamma)`` in exact rational arithmetic
    (cell units).  If ``G`` rises above ``G(0) = 0``, the first piece is
    ``(0, c)`` with ``c`` the last zero of ``G``.  On ``[c, L]`` the pieces
    are the components of ``{x : G(x) < max_{y >= x} G(y)}``, the shadow
    cast by a sun on the right; both ends of each have equal ``G``.
    """
    if g.dim != 1:
        raise OscboundError("rising sun needs a 1-d grid")
    _check_nonnegative(g)
    gam = Fraction(gamma)
    N = g.extents[0]
    G = [Fraction(0)]
    for v in g.values:
        G.append(G[-1] + Fraction(float(v)) - gam)
    if G[N] > 0:
        raise CZError("sun below horizon: gamma is below the mean of g")
    pieces: list[tuple[Fraction, Fraction]] = []
    # domain of the right-sun pass as piecewise-linear (x, G(x)) points
    if max(G) > 0:
        j = max(i for i in range(N + 1) if G[i] >= 0)
        c = Fraction(j) if G[j] == 0 else j + G[j] / (G[j] - G[j + 1])
        pieces.append((Fraction(0), c))
        pts = [(c, Fraction(0))] + [(Fraction(i), G[i]) for i in range(N + 1) if i > c]
    else:
        pts = [(Fraction(i), G[i]) for i in range(N + 1)]
    right: list[tuple[Fraction, Fraction]] = []
    xb, level = pts[-1]
    open_at = None
    for k in range(len(pts) - 1, 0, -1):
        (x0, g0), (x1, g1) = pts[k - 1], pts[k]
        if open_at is None:
            if g0 < g1:
                # G drops going left: shadow starts at x1
                open_at, level = x1, g1
            else:
                level = g0
                continue
        if g0 >= level:
            a = x0 + (level - g0) / (g1 - g0) * (x1 - x0)
            right.append((a, open_at))
            open_at, level = None, g0
    if open_at is not None:
        # cannot happen: the left end of the domain has G >= every later value
        raise CZError("rising sun did not close a component")
    pieces.extend(sorted(right))
    pairs = []
    for a, b in pieces:
        box = Box((float(a),), (float(b),))
        pairs.append((box, box))
    return CZDecomposition(float(gamma), 1.0, pairs, "risingsun", None, pieces)


def exact_piece_mean(g: GridFunction, a: Fraction, b: Fraction) -> Fraction:
    """Mean of ``g`` over ``(a, b)`` (cell units) in exact rational arithmetic."""
    total = Fraction(0)
    for i in range(int(math.floor(a)), int(math.ceil(b))):
        w = min(b, i + 1) - max(a, Fraction(i))
        if w > 0:
            total += w * Fraction(float(g.values[i]))
    return total / (b - a)


# --------------------------------------------------------------------------
# validation


@dataclass
class ValidationResult:
    ok: bool
    clause: str | None = None
    index: int | None = None
    message: str = ""
    checked: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ok": self.ok, "clause": self.clause, "index": self.index, "message": self.message}


def _fail(clause, index, message):
    return ValidationResult(False, clause, index, message)


def validate_cz(g: GridFunction, d: CZDecomposition) -> ValidationResult:
    """Check clauses (i), (ii), (iii) and disjointness; report the first failure."""
    scale = max(1.0, float(np.max(np.abs(g.values))))
    tol = VALIDATION_RTOL * scale
    gamma = d.level
    # (i)
    for i, (s, p) in enumerate(d.pairs):
        if not p.contains_box(s, tol=1e-12 * max(g.extents)):
            return _fail("i", i, "selected shape not inside its parent")
        if p.measure() > d.cstar * s.measure() * (1 + VALIDATION_RTOL):
            return _fail("i", i, f"parent measure exceeds {d.cstar} times the selected measure")
    # (ii)
    for i, (s, p) in enumerate(d.pairs):
        ms = box_stats(g, s)[0]
        mp = box_stats(g, p)[0]
        if mp > gamma + tol:
            return _fail("ii", i, f"parent mean {mp!r} above level {gamma!r}")
        if ms < gamma - tol:
            return _fail("ii", i, f"selected mean {ms!r} below level {gamma!r}")
    # (iii)
    covered = _covered_cells(g, [p for _, p in d.pairs])
    bad = (g.values > gamma + tol) & ~covered
    if np.any(bad):
        cell = tuple(int(c) for c in np.argwhere(bad)[0])
        return _fail("iii", None, f"cell {cell} has value above the level outside every parent")
    # disjointness
    j = _first_overlap([s for s, _ in d.pairs], g.extents)
    if j is not None:
        return _fail("disjoint", j, "selected shapes overlap")
    return ValidationResult(True, checked={"pairs": len(d.pairs)})


def _covered_cells(g: GridFunction, boxes) -> np.ndarray:
    """Cells lying entirely inside the union of ``boxes``."""
    mask = np.zeros(g.extents, dtype=bool)
    frac = []
    for b in boxes:
        if b.is_aligned():
            lo, hi = b.int_corners()
            mask[tuple(slice(l, u) for l, u in zip(lo, hi))] = True
        else:
            frac.append(b)
    if not frac:
        return mask
    if g.dim == 1:
        ivs = sorted((float(b.lo[0]), float(b.hi[0])) for b in frac)
        merged = []
        for a, b in ivs:
            if merged and a <= merged[-1][1] + 1e-12:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        for a, b in merged:
            lo = int(math.ceil(a - 1e-12))
            hi = int(math.floor(b + 1e-12))
            mask[max(lo, 0) : max(min(hi, g.extents[0]), 0)] = True
        return mask
    # conservative: a cell counts only when one box holds it entirely
    for b in frac:
        lo = [int(math.ceil(c - 1e-12)) for c in b.lo]
        hi = [int(math.floor(c + 1e-12)) for c in b.hi]
        if all(h > l for l, h in zip(lo, hi)):
            mask[tuple(slice(l, h) for l, h in zip(lo, hi))] = True
    return mask


def _first_overlap(boxes, extents) -> int | None:
    if all(b.is_aligned() for b in boxes):
        paint = np.zeros(extents, dtype=np.int32)
        for i, b in enumerate(boxes):
            lo, hi = b.int_corners()
            sl = tuple(slice(l, u) for l, u in zip(lo, hi))
            if np.any(paint[sl]):
                return i
            paint[sl] = 1
        return None
    order = sorted(range(len(boxes)), key=lambda i: tuple(boxes[i].lo))
    for x, i in enumerate(order):
        for j in order[x + 1 :]:
            if boxes[j].lo[0] >= boxes[i].hi[0] - 1e-12:
                break
            if all(min(u1, u2) - max(l1, l2) > 1e-12 for l1, u1, l2, u2 in zip(boxes[i].lo, boxes[i].hi, boxes[j].lo, boxes[j].hi)):
                return j
    return None

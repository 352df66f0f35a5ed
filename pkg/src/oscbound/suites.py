"""Randomized verification suites.

Every suite draws ``trials`` independent cases from a seeded corpus,
computes a pair ``(lhs, rhs)`` per case and reports the worst ratio
``lhs / rhs`` against the suite's constant.  A suite passes iff

    max_ratio <= constant * (1 + slack).

Conventions shared by all suites:

* ``0 / 0`` counts as ratio 0 (both sides vanish).
* Minorants (quantities that can only grow as shapes get finer) sit on the
  left, majorants on the right; refinement is applied to the right-hand
  seminorm only, which makes every check conservative.
* Equality suites use ``1 + |lhs - rhs| / max(|lhs|, |rhs|, floor)`` as the
  ratio with a floor of ``1e-3`` times the function scale, and constant 1.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import cz as czmod
from .concentration import check_concentration, random_instance, subcube_gadget
from .constants import constants
from .corpus import DEFAULT_WEIGHTS, FAMILIES, CorpusItem, sample_function, trial_rngs
from .errors import OscboundError
from .grid import GridFunction, save_grid
from .oscillation import bmo_seminorm, neighbor_mean_gap, partition_sweep, step_seminorm
from .rearrangement import (
    RadialFunction,
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
from .shapes import (
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
    circumscribe_cube_ball,
    falsecube_sides,
    sector_for_ball,
    witness_violations,
)

DEFAULT_GRID = {1: 4096, 2: 64, 3: 16}
# source grids for the symmetric-rearrangement suites; rasters use the suite grid
SDR_SOURCE_GRID = {1: 1024, 2: 32, 3: 8}
RASTER_GRID = {1: 4096, 2: 64, 3: 24}
EQUALITY_FLOOR = 1e-3


@dataclass
class SuiteConfig:
    suite: str
    dim: int | None = None
    grid: int | None = None
    trials: int = 100
    seed: int = 0
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    slack: float | None = None
    refine: bool = True
    supersample: int = 4
    reproducer_dir: str | None = None
    workers: int = 1


@dataclass
class TrialResult:
    index: int
    lhs: float
    rhs: float
    ratio: float
    family: str | None = None
    witness: dict = field(default_factory=dict)
    grids: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "family": self.family,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "witness": self.witness,
        }


@dataclass
class SuiteReport:
    suite: str
    config: dict
    constant: float
    slack: float
    max_ratio: float
    passed: bool
    trials: list
    wall_time: float
    notes: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def worst(self) -> TrialResult | None:
        if not self.trials:
            return None
        return max(self.trials, key=lambda t: t.ratio)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config,
            "constant": self.constant,
            "slack": self.slack,
            "max_ratio": self.max_ratio,
            "verdict": self.verdict,
            "wall_time": self.wall_time,
            "notes": self.notes,
            "trials": [t.to_json() for t in self.trials],
        }

    def to_csv(self) -> str:
        rows = ["index,family,lhs,rhs,ratio"]
        for t in self.trials:
            rows.append(f"{t.index},{t.family or ''},{t.lhs!r},{t.rhs!r},{t.ratio!r}")
        return "\n".join(rows) + "\n"


@dataclass
class _Ctx:
    cfg: SuiteConfig
    n: int
    grid: int
    index: int
    rng: np.random.Generator

    def draw(self, grid: int | None = None) -> CorpusItem:
        names = [k for k in FAMILIES if self.cfg.weights.get(k, 0) > 0]
        if not names:
            raise OscboundError("all corpus weights are zero")
        w = np.array([self.cfg.weights[k] for k in names], dtype=float)
        fam = names[int(self.rng.choice(len(names), p=w / w.sum()))]
        return sample_function(fam, self.n, grid or self.grid, self.rng)


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs <= 0 else math.inf


def _eq_ratio(a: float, b: float, scale: float) -> float:
    den = max(abs(a), abs(b), EQUALITY_FLOOR * max(scale, 1e-300))
    return 1.0 + abs(a - b) / den


def _scale(*fs: GridFunction) -> float:
    return max(1.0, *(float(np.max(np.abs(f.values))) for f in fs))


# --------------------------------------------------------------------------
# seminorm helpers


def fstar_norm(f: GridFunction) -> float:
    """Max oscillation of ``f*`` over cell-aligned intervals of ``(0, |Omega|)``."""
    return step_seminorm(sorted_cells(f), f.cell_measure).value


def falsecube_norm(f: GridFunction, cube_value: float | None = None) -> float:
    """Cell-aligned false-cube seminorm as ``max(cubes, false cubes that are not cubes)``.

    Both parts are exact scan maxima, so the result is never below the
    cube seminorm passed in (or computed here).
    """
    if cube_value is None:
        cube_value = bmo_seminorm(f, CUBES).value
    noncube = [s for s in basis_sides(FALSECUBES, f.extents) if len(set(s)) > 1]
    if not noncube:
        return cube_value
    rest = bmo_seminorm(f, BasisDescriptor(Family.CUSTOM, sides=tuple(noncube))).value
    return max(cube_value, rest)


def _fstar_difference_cells(f1: GridFunction, f2: GridFunction) -> np.ndarray:
    """Cell values of ``f1* - f2*`` on ``(0, 2|Omega|)``, zero beyond ``|Omega|``."""
    d = sorted_cells(f1) - sorted_cells(f2)
    return np.concatenate([d, np.zeros(d.size)])


# --------------------------------------------------------------------------
# trial functions


def _t_klemes(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    lhs = fstar_norm(it.f)
    rhs = bmo_seminorm(it.f, CUBES, refine=ctx.cfg.refine).value
    return TrialResult(ctx.index, lhs, rhs, _ratio(lhs, rhs), it.family, {"params": it.params}, [it.f])


def _t_korenovskii(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    lhs = fstar_norm(it.f)
    rep = bmo_seminorm(it.f, RECTANGLES, refine=ctx.cfg.refine)
    return TrialResult(
        ctx.index, lhs, rep.value, _ratio(lhs, rep.value), it.family,
        {"params": it.params, "argmax": rep.argmax.to_json() if rep.argmax else None}, [it.f],
    )


def _t_bisection(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    lhs = fstar_norm(it.f)
    rep = bmo_seminorm(it.f, FALSECUBES, refine=ctx.cfg.refine)
    rhs = max(rep.value, falsecube_norm(it.f))
    return TrialResult(ctx.index, lhs, rhs, _ratio(lhs, rhs), it.family, {"params": it.params}, [it.f])


def _t_wik(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    q = bmo_seminorm(it.f, CUBES, refine=ctx.cfg.refine)
    lhs = falsecube_norm(it.f, q.unrefined_value)
    return TrialResult(
        ctx.index, lhs, q.value, _ratio(lhs, q.value), it.family,
        {"params": it.params, "cubes_unrefined": q.unrefined_value}, [it.f],
    )


def _t_falsecompare(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    q = bmo_seminorm(it.f, CUBES).value
    w = falsecube_norm(it.f, q)
    return TrialResult(ctx.index, q, w, _ratio(q, w), it.family, {"params": it.params}, [it.f])


def _t_bds(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    lhs = fstar_norm(it.f)
    rhs = bmo_seminorm(it.f, CUBES, refine=ctx.cfg.refine).value
    return TrialResult(ctx.index, lhs, rhs, _ratio(lhs, rhs), it.family, {"params": it.params}, [it.f])


def _t_neighbors(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    gap = neighbor_mean_gap(it.f)
    rhs = bmo_seminorm(it.f, CUBES, refine=ctx.cfg.refine).value
    pair = [b.to_json() for b in gap.pair] if gap.pair else None
    return TrialResult(ctx.index, gap.value, rhs, _ratio(gap.value, rhs), it.family, {"params": it.params, "pair": pair}, [it.f])


def _t_partition(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    bmo = bmo_seminorm(it.f, CUBES).value
    sw = partition_sweep(it.f, bmo)
    worst = max(sw.worst_lower, sw.worst_upper)
    scale = _scale(it.f)
    ratio = 1.0 + worst / scale
    wit = {
        "params": it.params,
        "bmo": bmo,
        "n_shapes": sw.n_shapes,
        "worst_lower": sw.worst_lower,
        "worst_upper": sw.worst_upper,
        "worst_lower_shape": sw.worst_lower_shape.to_json() if sw.worst_lower_shape else None,
        "worst_upper_shape": sw.worst_upper_shape.to_json() if sw.worst_upper_shape else None,
    }
    return TrialResult(ctx.index, worst, scale, ratio, it.family, wit, [it.f])


def _t_concentration(ctx: _Ctx) -> TrialResult:
    rng = ctx.rng
    if ctx.index % 4 == 3:
        # subcube gadget of a corpus function on a random false cube
        n = max(ctx.n, 2)
        grid = 16
        it = _Ctx(ctx.cfg, n, grid, ctx.index, rng).draw()
        m = int(rng.integers(1, n + 1))
        k = int(rng.integers(1, grid // 2 + 1))
        sides = falsecube_sides(n, m, k) if m < n else (2 * k,) * n
        lo = tuple(int(rng.integers(0, grid - s + 1)) for s in sides)
        r = Box(lo, tuple(a + s for a, s in zip(lo, sides)))
        inst = subcube_gadget(it.f, r)
        source = {"gadget": r.to_json(), "params": it.params}
        family = "gadget"
    else:
        m = int(rng.integers(1, 13))
        inst = random_instance(m, rng)
        source = {"m": m}
        family = "random"
    lhs, rhs = check_concentration(inst)
    source["instance"] = inst.to_json() if inst.m <= 6 else {"m": inst.m}
    return TrialResult(ctx.index, lhs, rhs, _ratio(lhs, rhs), family, source)


def _t_czd(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    g = it.f
    t = float(ctx.rng.uniform(0.0, 1.0)) * g.measure or g.measure
    gamma = czmod.level_from_t(g, t)
    # float rounding can put the level a hair under the exact mean when t ~ |Omega|
    sun_level = max(gamma, czmod.mean_ceiling(g)) if g.dim == 1 else gamma
    failures = []
    counts = {}
    for method in ("dyadic", "bisection", "risingsun"):
        if method == "risingsun" and g.dim != 1:
            continue
        try:
            if method == "dyadic":
                d = czmod.dyadic_cz(g, gamma, t)
            elif method == "bisection":
                d = czmod.bisection_cz(g, t, gamma)
            else:
                d = czmod.rising_sun_1d(g, sun_level)
        except OscboundError as e:
            failures.append({"method": method, "error": str(e)})
            continue
        res = czmod.validate_cz(g, d)
        counts[method] = len(d.pairs)
        if not res.ok:
            failures.append({"method": method, **res.to_json()})
        if method == "risingsun":
            tol = czmod.VALIDATION_RTOL * _scale(g)
            for j, (a, b) in enumerate(d.exact_endpoints):
                mean = czmod.exact_piece_mean(g, a, b)
                if abs(float(mean - Fraction(sun_level))) > tol:
                    failures.append({"method": method, "index": j, "message": f"piece mean {float(mean)!r} != {sun_level!r}"})
    ratio = 1.0 if not failures else math.inf
    wit = {"params": it.params, "t": t, "level": gamma, "pairs": counts, "failures": failures}
    return TrialResult(ctx.index, float(len(failures)), 1.0, ratio, it.family, wit, [g])


def _random_subsets(f: GridFunction, rng: np.random.Generator, count: int):
    size = f.n_cells
    for j in range(count):
        kind = j % 4
        if kind == 0:
            yield "random", rng.random(f.extents) < rng.uniform(0.01, 0.9)
        elif kind == 1:
            lo = [int(rng.integers(0, d)) for d in f.extents]
            hi = [int(rng.integers(a + 1, d + 1)) for a, d in zip(lo, f.extents)]
            mask = np.zeros(f.extents, dtype=bool)
            mask[tuple(slice(a, b) for a, b in zip(lo, hi))] = True
            yield "box", mask
        elif kind == 2:
            k = int(rng.integers(1, size + 1))
            yield "top", np.argsort(-f.values.ravel(), kind="stable")[:k]
        else:
            mask = f.values > rng.uniform(float(f.values.min()), float(f.values.max()) + 1e-12)
            if not mask.any():
                mask.flat[int(rng.integers(size))] = True
            yield "level", mask


def _t_hardy_littlewood(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    worst, wit = -math.inf, {}
    for kind, cells in _random_subsets(it.f, ctx.rng, 10):
        lhs, rhs = hardy_littlewood_check(it.f, cells)
        r = _ratio(lhs, rhs)
        if r > worst:
            worst, wit = r, {"kind": kind, "lhs": lhs, "rhs": rhs}
    return TrialResult(ctx.index, wit["lhs"], wit["rhs"], worst, it.family, {"params": it.params, "subset": wit}, [it.f])


def _t_equimeasurable(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    f = it.f
    fs = decreasing_rearrangement(f)
    checks = {
        "distribution": distribution(f).same_as(distribution_of_step(fs)),
        "abs": decreasing_rearrangement(f.with_values(np.abs(f.values))).same_as(fs),
        "permutation": decreasing_rearrangement(
            f.with_values(ctx.rng.permutation(f.values.ravel()).reshape(f.extents))
        ).same_as(fs),
    }
    bad = [k for k, v in checks.items() if not v]
    return TrialResult(ctx.index, float(len(bad)), 1.0, 1.0 if not bad else math.inf, it.family, {"params": it.params, "failed": bad}, [f])


def _random_A_shape(n: int, rng: np.random.Generator, rmax: float):
    if rng.random() < 0.3:
        return Ball((0.0,) * n, float(rng.uniform(0.01, 1.0)) * rmax)
    d = rng.standard_normal(n)
    x = d / np.linalg.norm(d) * float(rng.uniform(0.02, 1.0)) * rmax
    alpha = float(rng.uniform(0.01, math.pi / 2))
    return Sector(tuple(x), float(np.linalg.norm(x)) * math.sin(alpha), alpha)


def _t_radial_isometry(ctx: _Ctx) -> TrialResult:
    it = ctx.draw()
    rf = symmetrize(it.f)
    n = it.f.dim
    scale = _scale(it.f)
    rmax = 1.3 * rf.support_radius
    worst, wit = 0.0, {}
    shapes = [_random_A_shape(n, ctx.rng, rmax) for _ in range(10)]
    # reverse direction: random intervals of the measure variable
    for _ in range(5):
        s0, s1 = np.sort(ctx.rng.uniform(0, 2 * it.f.measure, 2))
        if ctx.rng.random() < 0.2:
            s0 = 0.0
        a = interval_to_shape((float(s0), float(s1)), n)
        back = radial_reduction(a)
        worst = max(worst, _eq_ratio(back[0], s0, s1), _eq_ratio(back[1], s1, s1))
        shapes.append(a)
    for a in shapes:
        one_d = radial_oscillation(rf, a)
        polar = polar_oscillation(rf.profile, a)[1]
        r = _eq_ratio(one_d, polar, scale)
        if r > worst:
            worst, wit = r, {"shape": a.to_json(), "reduced": one_d, "polar": polar}
    return TrialResult(ctx.index, wit.get("reduced", 0.0), wit.get("polar", 0.0), worst, it.family, {"params": it.params, **wit}, [it.f])


def _profile(cells: np.ndarray, cell: float) -> StepFunction1D:
    bp = np.arange(cells.size + 1) * cell
    return StepFunction1D(bp, cells, 0.0)


def _t_sdr_ai(ctx: _Ctx) -> TrialResult:
    a, b = ctx.draw(), ctx.draw()
    n = a.f.dim
    cell = a.f.cell_measure
    d = _fstar_difference_cells(a.f, b.f)
    rep = step_seminorm(d, cell)
    prof = _profile(d, cell)
    scale = _scale(a.f, b.f)
    # the maximiser of the 1-d seminorm, mapped back to the sector basis
    star = interval_to_shape(rep.interval, n)
    lhs = polar_oscillation(prof, star)[1]
    worst_other = 0.0
    # random members whose radial image is cell-aligned never exceed it
    for _ in range(50):
        i, j = np.sort(ctx.rng.choice(d.size + 1, 2, replace=False))
        shape = interval_to_shape((i * cell, j * cell), n)
        worst_other = max(worst_other, polar_oscillation(prof, shape)[1])
    ratio = _eq_ratio(lhs, rep.value, scale)
    if worst_other > rep.value * (1 + 1e-12) + 1e-12 * scale:
        ratio = max(ratio, worst_other / rep.value if rep.value > 0 else math.inf)
    wit = {"families": [a.family, b.family], "interval": list(rep.interval), "shape": star.to_json(), "sampled_max": worst_other}
    return TrialResult(ctx.index, lhs, rep.value, ratio, f"{a.family}-{b.family}", wit, [a.f, b.f])


def _raster(rf: RadialFunction, grid: int, k: int) -> GridFunction:
    half = 1.25 * rf.support_radius
    return rasterize_radial(rf, (grid,) * rf.dim, 2 * half / grid, k)


def _t_sdr_bilipschitz(ctx: _Ctx) -> TrialResult:
    a, b = ctx.draw(SDR_SOURCE_GRID[ctx.n]), ctx.draw(SDR_SOURCE_GRID[ctx.n])
    n = a.f.dim
    row = constants(n)
    cell = a.f.cell_measure
    diff = decreasing_rearrangement(a.f) - decreasing_rearrangement(b.f)
    img = _raster(RadialFunction(diff, n), ctx.grid, ctx.cfg.supersample)
    S = bmo_seminorm(img, CUBES, refine=ctx.cfg.refine).value
    T = step_seminorm(_fstar_difference_cells(a.f, b.f), cell, refine=ctx.cfg.refine).value
    upper = _ratio(S, row.sdr_upper * T)
    lower = _ratio(row.sdr_lower * T, S)
    wit = {"families": [a.family, b.family], "S": S, "T": T, "upper_ratio": upper, "lower_ratio": lower}
    return TrialResult(ctx.index, S, T, max(upper, lower), f"{a.family}-{b.family}", wit, [a.f, b.f])


def _t_sdr_corollary(ctx: _Ctx) -> TrialResult:
    it = ctx.draw(SDR_SOURCE_GRID[ctx.n])
    n = it.f.dim
    g = it.f.extents[0]
    # zero extension to R^n, approximated by a margin of one grid width
    padded = GridFunction(np.pad(it.f.values, g), it.f.cell_size)
    F = bmo_seminorm(padded, CUBES, refine=ctx.cfg.refine).value
    img = _raster(symmetrize(it.f), ctx.grid, ctx.cfg.supersample)
    S = bmo_seminorm(img, CUBES).value
    D = constants(n).sdr_bound
    return TrialResult(ctx.index, S, F, _ratio(S, D * F), it.family, {"params": it.params, "S": S, "F": F}, [it.f])


def _t_sdr_local(ctx: _Ctx) -> TrialResult:
    a, b = ctx.draw(), ctx.draw()
    n = a.f.dim
    rng = ctx.rng
    diff = decreasing_rearrangement(a.f) - decreasing_rearrangement(b.f)
    rf = RadialFunction(diff, n)
    R = float(rng.uniform(0.2, 1.2)) * rf.support_radius
    d = float(rng.uniform(0.02, 1.0)) * R
    ell = d / math.sqrt(n)
    u = rng.standard_normal(n)
    x = u / np.linalg.norm(u) * float(rng.uniform(0.0, 1.0)) * (R - d / 2)
    q = Box(tuple(x - ell / 2), tuple(x + ell / 2))
    li = local_interval_for_cube(q, R)
    # stratified sample of the cube: one point per sub-cell
    per_axis = {1: 4096, 2: 64, 3: 16}.get(n, 8)
    offs = (np.arange(per_axis) + rng.random(per_axis)) / per_axis
    grids = np.meshgrid(*([offs] * n), indexing="ij")
    pts = np.stack([np.asarray(q.lo)[k] + ell * grids[k].ravel() for k in range(n)], axis=1)
    v = rf(pts)
    o_q = float(np.mean(np.abs(v - v.mean())))
    o_i = diff.oscillation(*li.interval)
    C = constants(n).sdr_upper
    wit = {"cube": q.to_json(), "R": R, "interval": list(li.interval), "length": li.length, "bound": li.bound, "O_cube": o_q, "O_interval": o_i}
    ratio = _ratio(o_q, C * o_i) if o_q > 1e-14 * _scale(a.f, b.f) else 0.0
    if li.length > li.bound * (1 + 1e-12):
        ratio = math.inf
    return TrialResult(ctx.index, o_q, o_i, ratio, f"{a.family}-{b.family}", wit, [a.f, b.f])


def _t_shape_equivalence(ctx: _Ctx) -> TrialResult:
    n, rng = ctx.n, ctx.rng
    row = constants(n)
    kind = ("ball->sector", "sector->ball", "cube->ball", "ball->cube")[ctx.index % 4]
    if kind == "ball->sector":
        b = Ball(tuple(rng.uniform(-1, 1, n)), float(rng.uniform(0.05, 1.0)))
        w = sector_for_ball(b)
    elif kind == "sector->ball":
        w = ball_for_sector(_random_A_shape(n, rng, 2.0))
    elif kind == "cube->ball":
        lo = rng.uniform(-1, 1, n)
        w = circumscribe_cube_ball(Box(tuple(lo), tuple(lo + rng.uniform(0.05, 1.0))))
    else:
        w = circumscribe_cube_ball(Ball(tuple(rng.uniform(-1, 1, n)), float(rng.uniform(0.05, 1.0))))
    problems = []
    viol = witness_violations(w, 10 ** 5, rng)
    if viol:
        problems.append(f"{viol} sampled points escape")
    ratio = w.ratios["outer/inner"]
    if kind == "cube->ball":
        want = row.ball_over_cube
    elif kind == "ball->cube":
        want = row.cube_over_ball
    else:
        want = 2.0 ** n
        if not w.middle.measure() < w.outer.measure():
            problems.append("middle shape not smaller than the outer ball")
        m = w.middle
        if isinstance(m, Sector) and not m.in_basis_A() or isinstance(m, Ball) and not m.is_centered():
            problems.append("middle shape not in the sector basis")
    if abs(ratio - want) > 1e-12 * want:
        problems.append(f"measure ratio {ratio!r} != {want!r}")
    return TrialResult(
        ctx.index, float(viol), ratio, 1.0 + len(problems), kind,
        {"witness": w.to_json(), "problems": problems},
    )


# --------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class SuiteSpec:
    name: str
    trial: Callable[[_Ctx], TrialResult]
    constant: Callable[[int], float]
    default_dim: int
    dims: tuple
    slack: float
    description: str
    grid: Callable[[int], int] = lambda n: DEFAULT_GRID[n]


def _wik(n):
    return constants(n).wik


SUITES = {
    s.name: s
    for s in [
        SuiteSpec("klemes1d", _t_klemes, lambda n: 1.0, 1, (1,), 1e-3, "f* against intervals in one dimension"),
        SuiteSpec("korenovskii", _t_korenovskii, lambda n: 1.0, 2, (2,), 1e-3, "f* against rectangles in the plane"),
        SuiteSpec("bisection", _t_bisection, lambda n: 2.0, 2, (1, 2, 3), 1e-3, "f* against false cubes, constant 2"),
        SuiteSpec("wik", _t_wik, _wik, 2, (1, 2, 3), 1e-3, "false cubes against cubes"),
        SuiteSpec("falsecompare", _t_falsecompare, lambda n: 1.0, 2, (1, 2, 3), 0.0, "cubes never exceed false cubes"),
        SuiteSpec("bds", _t_bds, lambda n: constants(n).bds, 2, (1, 2, 3), 1e-3, "f* against cubes, best route"),
        SuiteSpec("neighbors", _t_neighbors, lambda n: 4.0, 2, (1, 2, 3), 1e-3, "means of face-adjacent cubes"),
        SuiteSpec("partition", _t_partition, lambda n: 1.0, 2, (1, 2, 3), 1e-12, "subcube partition sandwich",
                  lambda n: {1: 1024, 2: 64, 3: 16}[n]),
        SuiteSpec("concentration", _t_concentration, lambda n: 1.0, 2, (1, 2, 3), 1e-12, "bounded differences on the discrete cube"),
        SuiteSpec("czd-validity", _t_czd, lambda n: 1.0, 2, (1, 2, 3), 0.0, "CZ decompositions validate"),
        SuiteSpec("hardy-littlewood", _t_hardy_littlewood, lambda n: 1.0, 2, (1, 2, 3), 1e-12, "integral over a set against f*"),
        SuiteSpec("equimeasurable", _t_equimeasurable, lambda n: 1.0, 2, (1, 2, 3), 0.0, "f* shares the distribution of f"),
        SuiteSpec("radial-isometry", _t_radial_isometry, lambda n: 1.0, 2, (1, 2, 3), 1e-12, "polar route equals the 1-d route"),
        SuiteSpec("sdr-ai", _t_sdr_ai, lambda n: 1.0, 2, (1, 2, 3), 1e-12, "sector-basis seminorm equals the 1-d seminorm",
                  SDR_SOURCE_GRID.get),
        SuiteSpec("sdr-bilipschitz", _t_sdr_bilipschitz, lambda n: 1.0, 2, (1, 2, 3), 5e-2,
                  "cube seminorm of Sf1 - Sf2 between the two constants", RASTER_GRID.get),
        SuiteSpec("sdr-corollary", _t_sdr_corollary, lambda n: 1.0, 2, (1, 2, 3), 5e-2,
                  "symmetric decreasing rearrangement is bounded on BMO", RASTER_GRID.get),
        SuiteSpec("sdr-local", _t_sdr_local, lambda n: 1.0, 2, (1, 2, 3), 5e-2, "local estimate for cubes near the origin",
                  SDR_SOURCE_GRID.get),
        SuiteSpec("shape-equivalence", _t_shape_equivalence, lambda n: 1.0, 2, (1, 2, 3), 0.0, "nested shape witnesses"),
    ]
}


def _dump_reproducer(cfg: SuiteConfig, n: int, t: TrialResult) -> list[str]:
    os.makedirs(cfg.reproducer_dir, exist_ok=True)
    stem = os.path.join(cfg.reproducer_dir, f"{cfg.suite}-n{n}-trial{t.index}")
    paths = []
    for j, g in enumerate(t.grids):
        p = f"{stem}-f{j}.oscg"
        save_grid(g, p)
        paths.append(p)
    with open(stem + ".json", "w") as fh:
        json.dump({"suite": cfg.suite, "dim": n, "seed": cfg.seed, "trial": t.to_json(), "grids": paths}, fh, indent=1)
    return paths + [stem + ".json"]


def _run_trial(ctx: _Ctx) -> TrialResult:
    return SUITES[ctx.cfg.suite].trial(ctx)


def run_suite(cfg: SuiteConfig, progress: Callable[[TrialResult], None] | None = None) -> SuiteReport:
    if cfg.suite not in SUITES:
        raise OscboundError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    spec = SUITES[cfg.suite]
    n = spec.default_dim if cfg.dim is None else int(cfg.dim)
    if n not in spec.dims:
        raise OscboundError(f"suite {cfg.suite} supports dimensions {spec.dims}")
    if cfg.trials < 1:
        raise OscboundError("trials must be >= 1")
    grid = spec.grid(n) if cfg.grid is None else int(cfg.grid)
    slack = spec.slack if cfg.slack is None else float(cfg.slack)
    constant = float(spec.constant(n))
    start = time.perf_counter()
    ctxs = [_Ctx(cfg, n, grid, i, rng) for i, rng in enumerate(trial_rngs(cfg.seed, cfg.trials))]
    results = []
    if cfg.workers > 1:
        # map() yields in submission order, so the report is independent of scheduling
        with ProcessPoolExecutor(cfg.workers) as pool:
            for r in pool.map(_run_trial, ctxs):
                results.append(r)
                if progress:
                    progress(r)
    else:
        for ctx in ctxs:
            r = _run_trial(ctx)
            results.append(r)
            if progress:
                progress(r)
    max_ratio = max(r.ratio for r in results)
    passed = bool(max_ratio <= constant * (1 + slack))
    conf = asdict(cfg)
    conf.update(dim=n, grid=grid, slack=slack)
    notes = {}
    if cfg.suite == "bds":
        row = constants(n)
        notes = {"dyadic_bound": row.dyadic, "false_cube_bound": row.false_cube_bound, "tighter_route": row.better_route}
    if not passed and cfg.reproducer_dir:
        worst = max(results, key=lambda r: r.ratio)
        notes["reproducer"] = _dump_reproducer(cfg, n, worst)
    return SuiteReport(cfg.suite, conf, constant, slack, float(max_ratio), passed, results, time.perf_counter() - start, notes)

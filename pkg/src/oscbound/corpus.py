"""Seeded test-function corpus on the unit cube ``[0, 1)^n``.

All functions are nonnegative, so ``|f|* = f*`` and the CZ constructors
accept them directly.  Families:

* ``dyadic``   indicators of random unions of dyadic cubes
* ``iid``      iid values on random blocks (uniform or Pareto tails)
* ``logspike`` truncated logarithmic spikes ``(-log|x - x0|)_+``
* ``radial``   sums of radial bumps and ball indicators
* ``checker``  checkerboards of random period
* ``twolevel`` adversarial two-level steps: half-spaces, stripes, blocks
* ``constant`` constant functions (weight 0 unless requested)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import OscboundError
from .grid import GridFunction

FAMILIES = ("dyadic", "iid", "logspike", "radial", "checker", "twolevel", "constant")
DEFAULT_WEIGHTS = {"dyadic": 1, "iid": 1, "logspike": 1, "radial": 1, "checker": 1, "twolevel": 1, "constant": 0}


@dataclass
class CorpusItem:
    family: str
    params: dict
    f: GridFunction


def _centers(extents: Sequence[int]):
    d = extents[0]
    axes = [(np.arange(e) + 0.5) / d for e in extents]
    return np.meshgrid(*axes, indexing="ij")


def dyadic_union(extents, rng, density: float | None = None) -> tuple[np.ndarray, dict]:
    n = len(extents)
    d = extents[0]
    density = float(rng.uniform(0.02, 0.5)) if density is None else float(density)
    out = np.zeros(extents)
    if density <= 0:
        return out, {"density": density}
    levels = int(np.log2(d))
    level = int(rng.integers(1, levels + 1))
    side = d >> level
    cubes = np.argwhere(rng.random((2 ** level,) * n) < density)
    for c in cubes:
        out[tuple(slice(int(i) * side, (int(i) + 1) * side) for i in c)] = 1.0
    return out, {"density": density, "level": level, "cubes": int(len(cubes))}


def iid_blocks(extents, rng, dist: str | None = None) -> tuple[np.ndarray, dict]:
    n = len(extents)
    dist = dist or ("uniform" if rng.random() < 0.5 else "pareto")
    block = 2 ** int(rng.integers(0, max(1, int(np.log2(extents[0])) - 1)))
    shape = tuple(-(-e // block) for e in extents)
    vals = rng.random(shape) if dist == "uniform" else rng.pareto(1.5, shape)
    for a in range(n):
        vals = np.repeat(vals, block, axis=a)
    return vals[tuple(slice(0, e) for e in extents)], {"dist": dist, "block": block}


def log_spike(extents, rng, x0=None) -> tuple[np.ndarray, dict]:
    n = len(extents)
    x0 = rng.random(n) if x0 is None else np.asarray(x0, dtype=float)
    r = np.sqrt(sum((c - x) ** 2 for c, x in zip(_centers(extents), x0)))
    h = 1.0 / extents[0]
    # a centre closer than h/2 is clamped to the distance of a cell centre
    vals = np.maximum(-np.log(np.maximum(r, h / 2)), 0.0)
    return vals, {"x0": [float(x) for x in x0]}


def radial_bumps(extents, rng) -> tuple[np.ndarray, dict]:
    n = len(extents)
    pts = _centers(extents)
    out = np.zeros(extents)
    k = int(rng.integers(1, 4))
    bumps = []
    for _ in range(k):
        c = rng.random(n)
        rad = float(rng.uniform(0.05, 0.5))
        amp = float(rng.uniform(0.2, 2.0))
        r = np.sqrt(sum((p - x) ** 2 for p, x in zip(pts, c)))
        if rng.random() < 0.5:
            out += amp * (r < rad)
            kind = "ball"
        else:
            out += amp * np.maximum(1 - (r / rad) ** 2, 0.0)
            kind = "bump"
        bumps.append({"kind": kind, "c": c.tolist(), "r": rad, "amp": amp})
    return out, {"bumps": bumps}


def checkerboard(extents, rng, period: int | None = None) -> tuple[np.ndarray, dict]:
    period = period or 2 ** int(rng.integers(0, max(1, int(np.log2(extents[0])) - 1)))
    parity = (np.indices(extents) // period).sum(axis=0) % 2
    amp = float(rng.uniform(0.5, 2.0))
    return amp * parity.astype(float), {"period": period, "amp": amp}


def two_level(extents, rng, kind: str | None = None) -> tuple[np.ndarray, dict]:
    n = len(extents)
    kind = kind or ("halfspace", "stripes", "block")[int(rng.integers(3))]
    lo, hi = 0.0, float(rng.uniform(0.5, 2.0))
    ix = np.indices(extents)
    axis = int(rng.integers(n))
    d = extents[axis]
    if kind == "halfspace":
        cut = int(rng.integers(1, d))
        mask = ix[axis] < cut
        params = {"axis": axis, "cut": cut}
    elif kind == "stripes":
        width = int(rng.integers(1, max(2, d // 4)))
        mask = (ix[axis] // width) % 2 == 0
        params = {"axis": axis, "width": width}
    else:
        a = [int(rng.integers(0, e)) for e in extents]
        b = [int(rng.integers(x + 1, e + 1)) for x, e in zip(a, extents)]
        mask = np.ones(extents, dtype=bool)
        for k in range(n):
            mask &= (ix[k] >= a[k]) & (ix[k] < b[k])
        params = {"lo": a, "hi": b}
    params.update(kind=kind, levels=[lo, hi])
    return np.where(mask, hi, lo), params


def constant(extents, rng) -> tuple[np.ndarray, dict]:
    c = float(rng.uniform(0, 2))
    return np.full(extents, c), {"c": c}


_BUILDERS = {
    "dyadic": dyadic_union,
    "iid": iid_blocks,
    "logspike": log_spike,
    "radial": radial_bumps,
    "checker": checkerboard,
    "twolevel": two_level,
    "constant": constant,
}


@dataclass
class CorpusConfig:
    dim: int
    grid: int
    count: int
    seed: int = 0
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))


def sample_function(family: str, dim: int, grid: int, rng: np.random.Generator) -> CorpusItem:
    if family not in _BUILDERS:
        raise OscboundError(f"unknown corpus family {family!r}")
    extents = (grid,) * dim
    vals, params = _BUILDERS[family](extents, rng)
    return CorpusItem(family, params, GridFunction(vals, 1.0 / grid))


def generate_corpus(cfg: CorpusConfig) -> list[CorpusItem]:
    """``cfg.count`` functions; item ``i`` depends only on ``(seed, i)``."""
    names = [k for k in FAMILIES if cfg.weights.get(k, 0) > 0]
    if not names:
        raise OscboundError("all corpus weights are zero")
    w = np.array([cfg.weights[k] for k in names], dtype=float)
    w /= w.sum()
    out = []
    for child in np.random.SeedSequence(cfg.seed).spawn(cfg.count):
        rng = np.random.default_rng(child)
        fam = names[int(rng.choice(len(names), p=w))]
        out.append(sample_function(fam, cfg.dim, cfg.grid, rng))
    return out


def trial_rngs(seed: int, count: int) -> list[np.random.Generator]:
    return [np.random.default_rng(c) for c in np.random.SeedSequence(seed).spawn(count)]

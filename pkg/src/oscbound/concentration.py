"""Bounded-difference concentration on the discrete cube, by exact enumeration.

An instance is a function ``g`` on ``{0, 1}^m`` stored as a table of
length ``2^m``; bit ``i`` of the table index is coordinate ``x_i``.
Coordinates are independent Bernoulli(p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OscboundError
from .grid import GridFunction
from .oscillation import box_stats
from .shapes import Box, subcube_partition

MAX_M = 20


@dataclass(frozen=True, eq=False)
class ConcentrationInstance:
    m: int
    table: np.ndarray
    p: float = 0.5

    def __post_init__(self):
        t = np.array(self.table, dtype=np.float64).ravel()
        if not 0 <= self.m <= MAX_M:
            raise OscboundError(f"m must lie in [0, {MAX_M}]")
        if t.size != 2 ** self.m:
            raise OscboundError(f"table needs 2^{self.m} = {2 ** self.m} entries, got {t.size}")
        if not np.all(np.isfinite(t)):
            raise OscboundError("table values must be finite")
        if not 0 < self.p < 1:
            raise OscboundError("bias must lie in (0, 1)")
        t.flags.writeable = False
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "p", float(self.p))

    def probabilities(self) -> np.ndarray:
        idx = np.arange(2 ** self.m)
        ones = np.zeros(idx.size, dtype=np.int64)
        for i in range(self.m):
            ones += (idx >> i) & 1
        return self.p ** ones * (1 - self.p) ** (self.m - ones)

    def expectation(self) -> float:
        return math.fsum(self.probabilities() * self.table)

    def to_json(self) -> dict:
        return {"m": self.m, "p": self.p, "table": self.table.tolist()}

    @classmethod
    def from_json(cls, d: dict) -> "ConcentrationInstance":
        return cls(int(d["m"]), d["table"], d.get("p", 0.5))


def bounded_differences(inst: ConcentrationInstance) -> np.ndarray:
    """Tightest ``a_i``: the largest change of ``g`` when only ``x_i`` flips."""
    idx = np.arange(2 ** inst.m)
    t = inst.table
    return np.array([float(np.max(np.abs(t - t[idx ^ (1 << i)]))) for i in range(inst.m)])


def check_concentration(inst: ConcentrationInstance) -> tuple[float, float]:
    """``(E|g - Eg|, ||a||_2 / 2)``."""
    w = inst.probabilities()
    mean = math.fsum(w * inst.table)
    lhs = math.fsum(w * np.abs(inst.table - mean))
    a = bounded_differences(inst)
    rhs = 0.5 * math.sqrt(math.fsum(a * a))
    return lhs, rhs


def subcube_gadget(f: GridFunction, r: Box) -> ConcentrationInstance:
    """``g(nu)`` = mean of ``f`` on the subcube ``Q(nu)`` of the false cube ``r``.

    Flipping bit ``i`` moves to the face-adjacent subcube along the ``i``-th
    long axis.
    """
    m, _, cubes = subcube_partition(r)
    return ConcentrationInstance(m, [box_stats(f, q)[0] for q in cubes], 0.5)


def random_instance(m: int, rng: np.random.Generator, kind: str | None = None, p: float = 0.5) -> ConcentrationInstance:
    """Random table; ``kind`` in {uniform, gaussian, additive, parity, threshold, sparse}."""
    kinds = ("uniform", "gaussian", "additive", "parity", "threshold", "sparse")
    kind = kind or kinds[int(rng.integers(len(kinds)))]
    n = 2 ** m
    idx = np.arange(n)
    bits = ((idx[:, None] >> np.arange(m)[None, :]) & 1).astype(float) if m else np.zeros((1, 0))
    if kind == "uniform":
        t = rng.random(n)
    elif kind == "gaussian":
        t = rng.standard_normal(n)
    elif kind == "additive":
        t = bits @ rng.standard_normal(m) if m else np.zeros(1)
    elif kind == "parity":
        t = (bits.sum(axis=1) % 2) * rng.random()
    elif kind == "threshold":
        t = (bits @ rng.random(m) > rng.random() * m / 2).astype(float) if m else np.zeros(1)
    elif kind == "sparse":
        t = np.where(rng.random(n) < 0.05, rng.pareto(1.5, n), 0.0)
    else:
        raise OscboundError(f"unknown instance kind {kind!r}")
    return ConcentrationInstance(m, t, p)

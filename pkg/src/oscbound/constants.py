"""Closed-form constants attached to each dimension."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import OscboundError
from .shapes import omega


@dataclass(frozen=True)
class ConstantsRow:
    n: int
    omega: float
    dyadic: float  # c* of dyadic cubes, also the dyadic bound on f*
    bisection: float  # c* of false-cube bisection
    rising_sun: float | None  # c* of the rising sun (n = 1 only)
    wik: float  # false cubes vs cubes, 1 + 2 sqrt(n - 1)
    false_cube_bound: float  # 2 (1 + 2 sqrt(n - 1)) for f*
    sqrt2_aspect: float  # 2^((n+1)/2), route through boxes with side ratios 2^(1/n); reported only
    ball_over_cube: float  # |B| / |Q| for the circumscribed ball
    cube_over_ball: float  # |Q| / |B| for the circumscribed cube
    sdr_lower: float  # 2^(-2n) omega_n
    sdr_upper: float  # n^(n/2) omega_n
    sdr_bound: float  # D_n = 2 (1 + 2 sqrt(n - 1)) n^(n/2) omega_n

    @property
    def bds(self) -> float:
        """Best proven bound for ``f*`` against cubes: the smaller of the two routes."""
        return min(self.dyadic, self.false_cube_bound)

    @property
    def better_route(self) -> str:
        if self.dyadic < self.false_cube_bound:
            return "dyadic"
        if self.false_cube_bound < self.dyadic:
            return "false-cube"
        return "tie"

    def to_json(self) -> dict:
        d = asdict(self)
        d["bds"] = self.bds
        d["better_route"] = self.better_route
        return d


def constants(n: int) -> ConstantsRow:
    if n < 1:
        raise OscboundError("dimension must be >= 1")
    w = omega(n)
    wik = 1 + 2 * math.sqrt(n - 1)
    return ConstantsRow(
        n=n,
        omega=w,
        dyadic=float(2 ** n),
        bisection=2.0,
        rising_sun=1.0 if n == 1 else None,
        wik=wik,
        false_cube_bound=2 * wik,
        sqrt2_aspect=2 ** ((n + 1) / 2),
        ball_over_cube=2.0 ** -n * n ** (n / 2) * w,
        cube_over_ball=2.0 ** n / w,
        sdr_lower=2.0 ** (-2 * n) * w,
        sdr_upper=n ** (n / 2) * w,
        sdr_bound=2 * wik * n ** (n / 2) * w,
    )


def crossover_dimension(limit: int = 64) -> int:
    """Smallest n where the false-cube bound beats the dyadic one."""
    for n in range(1, limit + 1):
        if constants(n).better_route == "false-cube":
            return n
    raise OscboundError("no crossover below the limit")

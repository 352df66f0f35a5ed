"""Brute-force reference computations, independent of the library kernels."""

import itertools

import numpy as np


def naive_osc(values, lo, hi):
    sub = np.asarray(values)[tuple(slice(a, b) for a, b in zip(lo, hi))]
    return float(np.mean(np.abs(sub - sub.mean())))


def naive_seminorm(values, side_tuples):
    v = np.asarray(values, dtype=float)
    best = 0.0
    for s in side_tuples:
        for lo in itertools.product(*(range(d - k + 1) for d, k in zip(v.shape, s))):
            best = max(best, naive_osc(v, lo, [a + k for a, k in zip(lo, s)]))
    return best


def cube_sides(shape):
    return [(k,) * len(shape) for k in range(1, min(shape) + 1)]


def rect_sides(shape):
    return list(itertools.product(*(range(1, d + 1) for d in shape)))


def falsecube_sides(shape):
    n = len(shape)
    out = set(cube_sides(shape))
    for m in range(1, n):
        for k in range(1, max(shape) + 1):
            s = tuple(2 * k if a < m else k for a in range(n))
            if all(t <= d for t, d in zip(s, shape)):
                out.add(s)
    return sorted(out)

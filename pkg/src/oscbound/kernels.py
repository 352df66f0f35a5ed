"""Hot loops of the oscillation scans, in numba and in plain numpy.

Every public function here dispatches on :data:`oscbound._accel.USE_NUMBA`;
the ``*_numpy`` and ``*_numba`` variants are importable directly for the
equivalence tests and the benchmark.

All kernels work on 3-d arrays.  Lower-dimensional grids are padded with
trailing axes of extent 1 by :func:`as3d`, which costs nothing in the
inclusion-exclusion formulas.

Pruning.  For any shape S, Cauchy-Schwarz gives O(f, S) <= sigma_S, the
standard deviation of f on S, and sigma_S comes in O(1) from prefix tables
of f and f^2.  The scan first evaluates, per scale, the placement with the
largest sigma exactly, then visits every placement and evaluates O exactly
only where sigma (plus a rounding allowance) reaches the current best.
"""

from __future__ import annotations

import numpy as np

from . import _accel
from ._accel import njit

EPS = np.finfo(np.float64).eps
# rounding allowance factor for sigma^2 from 8-term inclusion-exclusion
_ERR_FACTOR = 64.0 * EPS
# 1-d grids at least this long use the rank sweep instead of the pruned scan
SWEEP_MIN_CELLS = 256


def as3d(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim > 3:
        raise ValueError("kernels support at most 3 axes")
    return v.reshape(v.shape + (1,) * (3 - v.ndim))


def sides3d(sides) -> np.ndarray:
    s = np.atleast_2d(np.asarray(sides, dtype=np.int64))
    if s.shape[1] > 3:
        raise ValueError("kernels support at most 3 axes")
    out = np.ones((s.shape[0], 3), dtype=np.int64)
    out[:, : s.shape[1]] = s
    return out


def prefix3d(c: np.ndarray) -> np.ndarray:
    """Float64 prefix table of a 3-d array, accumulated in extended precision."""
    acc = c.astype(np.longdouble)
    for axis in range(3):
        acc = np.cumsum(acc, axis=axis)
    out = np.zeros(tuple(d + 1 for d in c.shape), dtype=np.float64)
    out[1:, 1:, 1:] = acc
    return out


def centered_tables(values3d: np.ndarray):
    """Centred values and the prefix tables of ``c`` and ``c**2``."""
    v = as3d(values3d)
    c = v - float(np.mean(v.astype(np.longdouble)))
    return c, prefix3d(c), prefix3d(c * c)


# --------------------------------------------------------------------------
# numba


@njit
def _bsum(P, i0, i1, i2, s0, s1, s2):
    j0 = i0 + s0
    j1 = i1 + s1
    j2 = i2 + s2
    return (
        P[j0, j1, j2]
        - P[i0, j1, j2]
        - P[j0, i1, j2]
        - P[j0, j1, i2]
        + P[i0, i1, j2]
        + P[i0, j1, i2]
        + P[j0, i1, i2]
        - P[i0, i1, i2]
    )


@njit
def _box_osc(c, i0, i1, i2, s0, s1, s2, m):
    acc = 0.0
    for a in range(i0, i0 + s0):
        for b in range(i1, i1 + s1):
            for d in range(i2, i2 + s2):
                acc += abs(c[a, b, d] - m)
    return acc / (s0 * s1 * s2)


@njit
def _var_and_err(P, P2, a1, a2, i0, i1, i2, s0, s1, s2, err_factor):
    n = s0 * s1 * s2
    m = _bsum(P, i0, i1, i2, s0, s1, s2) / n
    var = _bsum(P2, i0, i1, i2, s0, s1, s2) / n - m * m
    err = err_factor * ((a2 + 2.0 * abs(m) * a1) / n + m * m + abs(var))
    return m, var, err


@njit
def scan_boxes_numba(c, P, P2, sides, per_scale):
    D0, D1, D2 = c.shape
    K = sides.shape[0]
    a1 = np.max(np.abs(P))
    a2 = np.max(P2)
    scale_best = np.full(K, -1.0)
    pos = np.zeros((K, 3), dtype=np.int64)
    n_exact = 0
    best = 0.0
    # seed: exact O at the sigma-argmax of every scale
    for k in range(K):
        s0, s1, s2 = sides[k, 0], sides[k, 1], sides[k, 2]
        vbest = -1.0
        b0 = b1 = b2 = 0
        mb = 0.0
        for i0 in range(D0 - s0 + 1):
            for i1 in range(D1 - s1 + 1):
                for i2 in range(D2 - s2 + 1):
                    m, var, err = _var_and_err(P, P2, a1, a2, i0, i1, i2, s0, s1, s2, _ERR_FACTOR)
                    if var > vbest:
                        vbest = var
                        b0, b1, b2 = i0, i1, i2
                        mb = m
        o = _box_osc(c, b0, b1, b2, s0, s1, s2, mb)
        n_exact += 1
        scale_best[k] = o
        pos[k, 0], pos[k, 1], pos[k, 2] = b0, b1, b2
        if o > best:
            best = o
    # pruned full pass
    for k in range(K):
        s0, s1, s2 = sides[k, 0], sides[k, 1], sides[k, 2]
        for i0 in range(D0 - s0 + 1):
            for i1 in range(D1 - s1 + 1):
                for i2 in range(D2 - s2 + 1):
                    thr = scale_best[k] if per_scale else best
                    m, var, err = _var_and_err(P, P2, a1, a2, i0, i1, i2, s0, s1, s2, _ERR_FACTOR)
                    if var + err < thr * thr:
                        continue
                    o = _box_osc(c, i0, i1, i2, s0, s1, s2, m)
                    n_exact += 1
                    if o > scale_best[k]:
                        scale_best[k] = o
                        pos[k, 0], pos[k, 1], pos[k, 2] = i0, i1, i2
                    if o > best:
                        best = o
    return scale_best, pos, n_exact


@njit
def box_oscillations_numba(c, P, s0, s1, s2):
    D0, D1, D2 = c.shape
    out = np.empty((D0 - s0 + 1, D1 - s1 + 1, D2 - s2 + 1))
    n = s0 * s1 * s2
    for i0 in range(D0 - s0 + 1):
        for i1 in range(D1 - s1 + 1):
            for i2 in range(D2 - s2 + 1):
                m = _bsum(P, i0, i1, i2, s0, s1, s2) / n
                out[i0, i1, i2] = _box_osc(c, i0, i1, i2, s0, s1, s2, m)
    return out


@njit
def monotone_scan_numba(v, S):
    # v non-increasing, S[i] = sum(v[:i]); O on [a, b) = 2 (S[j] - S[a] - m (j - a)) / (b - a)
    # with j the first index in [a, b) where v[j] <= m
    N = v.shape[0]
    best = 0.0
    ba = 0
    bb = 1
    for a in range(N):
        for b in range(a + 2, N + 1):
            L = b - a
            m = (S[b] - S[a]) / L
            lo = a
            hi = b - 1
            while lo < hi:
                mid = (lo + hi) // 2
                if v[mid] <= m:
                    hi = mid
                else:
                    lo = mid + 1
            o = 2.0 * (S[lo] - S[a] - m * (lo - a)) / L
            if o > best:
                best = o
                ba = a
                bb = b
    return best, ba, bb


@njit
def interval_sweep_numba(c, P):
    """Per-length max of O over all intervals of a 1-d array, in O(N^2 log N).

    For each left end ``a`` the right end sweeps up while a Fenwick tree over
    the value ranks holds the count and sum of the values seen so far, so
    ``sum |c - m| = S - 2 S_below + m (2 n_below - L)`` costs two tree
    queries.  The winner of every length is then recomputed directly; the
    tree only screens, so returned values carry no accumulated error.
    """
    N = c.shape[0]
    order = np.argsort(c, kind="mergesort")
    sv = c[order]
    rank = np.empty(N, dtype=np.int64)
    for r in range(N):
        rank[order[r]] = r
    best = np.full(N + 1, -1.0)
    pos = np.zeros(N + 1, dtype=np.int64)
    cnt = np.zeros(N + 1, dtype=np.int64)
    sm = np.zeros(N + 1)
    for a in range(N):
        cnt[:] = 0
        sm[:] = 0.0
        S = 0.0
        for b in range(a + 1, N + 1):
            i = b - 1
            x = c[i]
            j = rank[i] + 1
            while j <= N:
                cnt[j] += 1
                sm[j] += x
                j += j & -j
            S += x
            L = b - a
            m = S / L
            # number of sorted values <= m
            lo = 0
            hi = N
            while lo < hi:
                mid = (lo + hi) // 2
                if sv[mid] <= m:
                    lo = mid + 1
                else:
                    hi = mid
            nb = 0
            sb = 0.0
            j = lo
            while j > 0:
                nb += cnt[j]
                sb += sm[j]
                j -= j & -j
            o = (S - 2.0 * sb + m * (2 * nb - L)) / L
            if o > best[L]:
                best[L] = o
                pos[L] = a
    for L in range(1, N + 1):
        a = pos[L]
        m = (P[a + L, 1, 1] - P[a, 1, 1]) / L
        acc = 0.0
        for i in range(a, a + L):
            acc += abs(c[i] - m)
        best[L] = acc / L
    return best, pos


# --------------------------------------------------------------------------
# numpy


def _bsum_all(P, s):
    """Box sums of every placement of side tuple ``s`` as a 3-d array."""
    s0, s1, s2 = (int(t) for t in s)
    n0, n1, n2 = (P.shape[a] - 1 - s[a] + 1 for a in range(3))
    out = np.zeros((n0, n1, n2))
    for c0 in (0, 1):
        for c1 in (0, 1):
            for c2 in (0, 1):
                sign = -1.0 if (3 - c0 - c1 - c2) % 2 else 1.0
                out += sign * P[c0 * s0 : c0 * s0 + n0, c1 * s1 : c1 * s1 + n1, c2 * s2 : c2 * s2 + n2]
    return out


def _window_osc(c, s, idx, means):
    """Exact O for placements ``idx`` (B x 3) of side tuple ``s``."""
    win = np.lib.stride_tricks.sliding_window_view(c, tuple(int(t) for t in s))
    w = win[idx[:, 0], idx[:, 1], idx[:, 2]]
    return np.abs(w - means[:, None, None, None]).mean(axis=(1, 2, 3))


def scan_boxes_numpy(c, P, P2, sides, per_scale, batch: int = 256):
    K = sides.shape[0]
    a1 = float(np.max(np.abs(P)))
    a2 = float(np.max(P2))
    scale_best = np.full(K, -1.0)
    pos = np.zeros((K, 3), dtype=np.int64)
    n_exact = 0
    stats = []
    for k in range(K):
        s = sides[k]
        n = int(np.prod(s))
        m = _bsum_all(P, s) / n
        var = _bsum_all(P2, s) / n - m * m
        err = _ERR_FACTOR * ((a2 + 2.0 * np.abs(m) * a1) / n + m * m + np.abs(var))
        stats.append((m, var, err))
        flat = int(np.argmax(var))
        i = np.array(np.unravel_index(flat, var.shape))
        scale_best[k] = _window_osc(c, s, i[None, :], m.reshape(-1)[flat : flat + 1])[0]
        pos[k] = i
        n_exact += 1
    best = float(scale_best.max()) if K else 0.0
    for k in range(K):
        s = sides[k]
        m, var, err = stats[k]
        thr = scale_best[k] if per_scale else best
        upper = (var + err).reshape(-1)
        cand = np.flatnonzero(upper >= thr * thr)
        cand = cand[np.argsort(-upper[cand], kind="stable")]
        for start in range(0, cand.size, batch):
            chunk = cand[start : start + batch]
            thr = scale_best[k] if per_scale else best
            chunk = chunk[upper[chunk] >= thr * thr]
            if chunk.size == 0:
                break
            idx = np.stack(np.unravel_index(chunk, var.shape), axis=1)
            o = _window_osc(c, s, idx, m.reshape(-1)[chunk])
            n_exact += chunk.size
            j = int(np.argmax(o))
            if o[j] > scale_best[k]:
                scale_best[k] = o[j]
                pos[k] = idx[j]
            best = max(best, float(o[j]))
    return scale_best, pos, n_exact


def box_oscillations_numpy(c, P, s0, s1, s2, chunk_cells: int = 1 << 22):
    s = (int(s0), int(s1), int(s2))
    n = s0 * s1 * s2
    means = _bsum_all(P, s) / n
    win = np.lib.stride_tricks.sliding_window_view(c, s)
    out = np.empty(means.shape)
    rows = max(1, chunk_cells // max(1, n * means.shape[1] * means.shape[2]))
    for r in range(0, means.shape[0], rows):
        w = win[r : r + rows]
        out[r : r + rows] = np.abs(w - means[r : r + rows, :, :, None, None, None]).mean(axis=(3, 4, 5))
    return out


def monotone_scan_numpy(v, S):
    N = v.shape[0]
    neg = -v
    best, ba, bb = 0.0, 0, 1
    for a in range(N - 1):
        b = np.arange(a + 2, N + 1)
        L = b - a
        m = (S[b] - S[a]) / L
        # first j with v[j] <= m; v[a] >= m always, clamp ties below a
        j = np.maximum(np.searchsorted(neg, -m, side="left"), a)
        j = np.minimum(j, b - 1)
        o = 2.0 * (S[j] - S[a] - m * (j - a)) / L
        i = int(np.argmax(o))
        if o[i] > best:
            best, ba, bb = float(o[i]), a, int(b[i])
    return best, ba, bb


# --------------------------------------------------------------------------
# dispatch


def scan_boxes(values, sides, per_scale: bool = False, use_numba: bool | None = None):
    """Exact max of O over all placements of each side tuple.

    Returns ``(scale_best, positions, n_exact)``.  ``scale_best[k]`` is the
    exact per-scale maximum when ``per_scale`` is set; otherwise it is exact
    only for scales reaching the global maximum (others may be lower bounds,
    which is all the seminorm needs).
    """
    c, P, P2 = centered_tables(values)
    s = sides3d(sides)
    if _use(use_numba):
        if c.shape[1] == 1 and c.shape[2] == 1 and c.shape[0] >= SWEEP_MIN_CELLS:
            # 1-d: sigma rarely prunes, the rank sweep is exact per length
            best, start = interval_sweep_numba(np.ascontiguousarray(c[:, 0, 0]), P)
            lengths = s[:, 0]
            pos = np.zeros((len(s), 3), dtype=np.int64)
            pos[:, 0] = start[lengths]
            return best[lengths], pos, c.shape[0] * (c.shape[0] + 1) // 2
        return scan_boxes_numba(c, P, P2, s, bool(per_scale))
    return scan_boxes_numpy(c, P, P2, s, bool(per_scale))


def box_oscillations(values, sides, use_numba: bool | None = None) -> np.ndarray:
    """O for every placement of one side tuple; shape = number of placements per axis."""
    v = np.asarray(values, dtype=np.float64)
    c, P, _ = centered_tables(v)
    s = sides3d(sides)[0]
    if _use(use_numba):
        out = box_oscillations_numba(c, P, int(s[0]), int(s[1]), int(s[2]))
    else:
        out = box_oscillations_numpy(c, P, int(s[0]), int(s[1]), int(s[2]))
    return out.reshape(out.shape[: v.ndim])


def monotone_interval_scan(v, use_numba: bool | None = None):
    """Max O over cell intervals of a non-increasing sequence: ``(value, a, b)``."""
    v = np.asarray(v, dtype=np.float64)
    if v.size < 2:
        return 0.0, 0, v.size
    c = v - float(np.mean(v.astype(np.longdouble)))
    S = np.zeros(v.size + 1)
    S[1:] = np.cumsum(c.astype(np.longdouble))
    if _use(use_numba):
        return monotone_scan_numba(c, S)
    return monotone_scan_numpy(c, S)


def _use(flag):
    return _accel.USE_NUMBA if flag is None else bool(flag) and _accel.HAVE_NUMBA

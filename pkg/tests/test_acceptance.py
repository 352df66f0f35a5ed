"""Exit criteria at desk scale: default grids, 100 seeded trials per suite.

Each test prints one ``PASS``/``FAIL`` line; the lines are repeated in the
terminal summary.  Run alone with ``pytest -m acceptance -s``.
"""

import math
import time

import pytest

from oscbound import SuiteConfig, constants, crossover_dimension, run_suite

import conftest

pytestmark = pytest.mark.acceptance

TRIALS = 100
BUDGET_S = 300.0  # per suite run


def _run(suite, dim, **kw):
    t0 = time.perf_counter()
    rep = run_suite(SuiteConfig(suite, dim=dim, trials=TRIALS, seed=kw.pop("seed", 0), **kw))
    dt = time.perf_counter() - t0
    return rep, dt


def _check(number, title, runs, extra=()):
    """``runs``: list of (label, report, seconds); ``extra``: list of (label, ok)."""
    parts, ok = [], True
    for label, rep, dt in runs:
        good = rep.passed and dt < BUDGET_S
        ok &= good
        parts.append(f"{label} max {rep.max_ratio:.6g}/{rep.constant * (1 + rep.slack):.6g} {dt:.0f}s{'' if good else ' !'}")
    for label, good in extra:
        ok &= bool(good)
        parts.append(f"{label} {'ok' if good else 'FAILED'}")
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} [{'; '.join(parts)}]"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    assert ok, line


def _suite_runs(suite, dims, **kw):
    out = []
    for n in dims:
        rep, dt = _run(suite, n, **kw)
        out.append((f"{suite} n={n}", rep, dt))
    return out


def test_criterion_01_equimeasurable_hardy_littlewood():
    runs = _suite_runs("equimeasurable", (1, 2, 3)) + _suite_runs("hardy-littlewood", (1, 2, 3))
    # ten random sets per trial gives 1000 (f, A) pairs per dimension
    pairs = all(len(r.trials) * 10 >= 1000 for label, r, _ in runs if label.startswith("hardy"))
    exact = all(r.max_ratio == 1.0 for label, r, _ in runs if label.startswith("equi"))
    _check(1, "equimeasurability and Hardy-Littlewood", runs, [("1000 pairs", pairs), ("bit-exact", exact)])


def test_criterion_02_cz_validity():
    runs = _suite_runs("czd-validity", (1, 2, 3))
    fails = [t.witness["failures"] for _, r, _ in runs for t in r.trials if t.witness["failures"]]
    sun = sum(t.witness["pairs"].get("risingsun", 0) > 0 for t in runs[0][1].trials)
    _check(2, "CZ decompositions validate (dyadic, bisection, rising sun)", runs,
           [("no clause failures", not fails), (f"rising sun nonempty in {sun} trials", sun > 0)])


def test_criterion_03_klemes_korenovskii():
    runs = _suite_runs("klemes1d", (1,)) + _suite_runs("korenovskii", (2,))
    _check(3, "f* against intervals (n=1) and rectangles (n=2), constant 1", runs)


def test_criterion_04_bisection():
    _check(4, "f* against false cubes, constant 2", _suite_runs("bisection", (2, 3)))


def test_criterion_05_wik_and_falsecompare():
    runs = _suite_runs("wik", (1, 2, 3)) + _suite_runs("falsecompare", (1, 2, 3))
    _check(5, "false cubes against cubes, both directions", runs)


def test_criterion_06_composite_bound():
    runs = _suite_runs("bds", (1, 2, 3))
    table = all(
        abs(constants(n).false_cube_bound - want) <= 1e-12 * want
        for n, want in ((1, 2.0), (2, 6.0), (3, 2 * (1 + 2 * math.sqrt(2))))
    )
    _check(6, "f* against cubes, min of the two constants", runs,
           [("constants table", table), (f"crossover n={crossover_dimension()}", crossover_dimension() <= 4)])


def test_criterion_07_neighbors():
    _check(7, "face-adjacent cube means within 4 times the seminorm", _suite_runs("neighbors", (1, 2, 3)))


def test_criterion_08_partition_concentration():
    runs = _suite_runs("partition", (1, 2, 3)) + _suite_runs("concentration", (2,))
    ms = [t.witness.get("m", 0) for t in runs[-1][1].trials]
    _check(8, "subcube sandwich and bounded-difference concentration (exact)", runs,
           [(f"instances m<= {max(ms)}", max(ms) <= 12)])


def test_criterion_09_radial_isometry_sdr_ai():
    runs = _suite_runs("radial-isometry", (1, 2, 3)) + _suite_runs("sdr-ai", (1, 2, 3))
    _check(9, "polar route equals 1-d route; sector seminorm of Sf1 - Sf2", runs)


def test_criterion_10_shape_witnesses():
    runs = _suite_runs("shape-equivalence", (1, 2, 3))
    escapes = sum(t.lhs for _, r, _ in runs for t in r.trials)
    _check(10, "nested shape witnesses, 1e5 samples each", runs, [(f"{int(escapes)} escapes", escapes == 0)])


def test_criterion_11_sdr_two_sided():
    runs = _suite_runs("sdr-bilipschitz", (2,)) + _suite_runs("sdr-corollary", (2,))
    d2 = constants(2).sdr_bound
    _check(11, "two-sided bound for Sf1 - Sf2 and boundedness of S at n=2", runs,
           [(f"D_2 = {d2:.6f}", abs(d2 - 12 * math.pi) <= 1e-12 * d2)])


def test_criterion_12_sdr_local():
    runs = _suite_runs("sdr-local", (1, 2, 3))
    lengths = all(t.witness["length"] <= t.witness["bound"] * (1 + 1e-12) for _, r, _ in runs for t in r.trials)
    _check(12, "local interval length and per-cube oscillation bound", runs, [("interval lengths", lengths)])


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-s", "-q"]))

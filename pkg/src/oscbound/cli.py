"""Command line entry point: ``oscbound <command> ...``.

Exit codes: 0 success (or all checks pass), 1 a check failed, 2 bad usage
or unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import cz as czmod
from .concentration import check_concentration, random_instance
from .constants import constants, crossover_dimension
from .corpus import DEFAULT_WEIGHTS, FAMILIES, CorpusConfig, generate_corpus
from .errors import OscboundError
from .grid import load_grid, save_grid
from .oscillation import bmo_seminorm
from .rearrangement import decreasing_rearrangement, distribution
from .shapes import BasisDescriptor, Family
from .suites import SUITES, SuiteConfig, run_suite


def _write_json(path: str | None, obj) -> None:
    text = json.dumps(obj, indent=1)
    if path in (None, "-"):
        print(text)
        return
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def _weights(spec: str | None) -> dict:
    w = dict(DEFAULT_WEIGHTS)
    if not spec:
        return w
    for part in spec.split(","):
        name, _, val = part.partition("=")
        if name not in FAMILIES or not val:
            raise OscboundError(f"bad weight {part!r}; use family=weight with family in {', '.join(FAMILIES)}")
        w[name] = float(val)
    return w


# --------------------------------------------------------------------------
# commands


def cmd_verify(args) -> int:
    cfg = SuiteConfig(
        suite=args.suite,
        dim=args.dim,
        grid=args.grid,
        trials=args.trials,
        seed=args.seed,
        weights=_weights(args.weights),
        slack=args.slack,
        refine=args.refine,
        supersample=args.supersample,
        reproducer_dir=args.reproducers or (os.path.dirname(args.out) or "." if args.out else None),
        workers=args.workers,
    )
    report = run_suite(cfg)
    _write_json(args.out, report.to_json())
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(report.to_csv())
    if args.plot_data:
        new = not os.path.exists(args.plot_data)
        with open(args.plot_data, "a", newline="") as fh:
            w = csv.writer(fh)
            if new:
                w.writerow(["suite", "n", "trials", "max_ratio", "mean_ratio", "constant"])
            ratios = [t.ratio for t in report.trials]
            w.writerow([report.suite, report.config["dim"], len(ratios), report.max_ratio, float(np.mean(ratios)), report.constant])
    msg = f"{report.suite} n={report.config['dim']}: max ratio {report.max_ratio:.6g} vs constant {report.constant:.6g} -> {report.verdict}"
    print(msg, file=sys.stderr)
    return 0 if report.passed else 1


def cmd_rearrange(args) -> int:
    f = load_grid(args.input, args.dim)
    fs = decreasing_rearrangement(f)
    stem = args.out or os.path.splitext(args.input)[0] + "-rearranged"
    with open(stem + ".csv", "w") as fh:
        fh.write(fs.to_csv())
    _write_json(stem + ".json", {
        "input": args.input,
        "dim": f.dim,
        "measure": f.measure,
        "rearrangement": fs.to_json(),
        "distribution": distribution(f).to_json(),
    })
    print(stem + ".csv")
    return 0


def cmd_oscillation(args) -> int:
    f = load_grid(args.input, args.dim)
    b = BasisDescriptor(Family(args.basis), max_side=args.max_side, stride=args.stride, permuted=args.permuted)
    rep = bmo_seminorm(f, b, refine=args.refine, per_scale=args.per_scale)
    _write_json(args.out, {"input": args.input, "basis": args.basis, **rep.to_json()})
    return 0


def cmd_czd(args) -> int:
    g = load_grid(args.input, args.dim)
    if args.method == "risingsun":
        level = args.level if args.level is not None else max(czmod.level_from_t(g, args.t), czmod.mean_ceiling(g))
        d = czmod.rising_sun_1d(g, level)
    elif args.method == "dyadic":
        d = czmod.dyadic_cz(g, args.level, args.t)
    else:
        if args.t is None:
            raise OscboundError("bisection needs --t")
        d = czmod.bisection_cz(g, args.t, args.level)
    res = czmod.validate_cz(g, d)
    out = d.to_json()
    out["validation"] = res.to_json()
    if d.exact_endpoints is not None:
        out["exact_endpoints"] = [[str(a), str(b)] for a, b in d.exact_endpoints]
    _write_json(args.out, out)
    return 0 if res.ok else 1


def cmd_concentration(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    worst = 0.0
    for i in range(args.trials):
        inst = random_instance(args.random, rng, args.kind, args.p)
        lhs, rhs = check_concentration(inst)
        r = lhs / rhs if rhs > 0 else (0.0 if lhs <= 0 else float("inf"))
        worst = max(worst, r)
        rows.append({"trial": i, "lhs": lhs, "rhs": rhs, "ratio": r})
    ok = worst <= 1 + 1e-12
    _write_json(args.out, {"m": args.random, "p": args.p, "max_ratio": worst, "verdict": "pass" if ok else "fail", "trials": rows})
    return 0 if ok else 1


def cmd_corpus(args) -> int:
    cfg = CorpusConfig(args.dim, args.grid, args.count, args.seed, _weights(args.weights))
    os.makedirs(args.out_dir, exist_ok=True)
    index = []
    for i, item in enumerate(generate_corpus(cfg)):
        path = os.path.join(args.out_dir, f"f{i:04d}-{item.family}.oscg")
        save_grid(item.f, path)
        index.append({"path": path, "family": item.family, "params": item.params})
    _write_json(os.path.join(args.out_dir, "index.json"), index)
    print(f"{len(index)} functions in {args.out_dir}")
    return 0


def cmd_constants(args) -> int:
    dims = range(1, args.max_dim + 1)
    _write_json(args.out, {"crossover_dimension": crossover_dimension(), "rows": [constants(n).to_json() for n in dims]})
    return 0


# --------------------------------------------------------------------------
# parser


def _coords(text: str) -> int:
    value = text.split("=", 1)[1] if text.startswith("m=") else text
    try:
        m = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected m=<int>, got {text!r}") from None
    if not 0 <= m <= 20:
        raise argparse.ArgumentTypeError("m must lie in [0, 20]")
    return m


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oscbound", description="Mean-oscillation bounds for rearrangements.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a randomized verification suite")
    v.add_argument("--suite", required=True, choices=sorted(SUITES))
    v.add_argument("--dim", type=int)
    v.add_argument("--grid", type=int, help="cells per axis (suite default if omitted)")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--weights", help="corpus weights, e.g. iid=2,constant=0")
    v.add_argument("--slack", type=float)
    v.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True)
    v.add_argument("--supersample", type=int, default=4)
    v.add_argument("--out", help="JSON report path (stdout if omitted)")
    v.add_argument("--csv", help="per-trial CSV path")
    v.add_argument("--plot-data", help="append a ratio-vs-dimension row to this CSV")
    v.add_argument("--reproducers", help="directory for failing-trial dumps")
    v.add_argument("--workers", type=int, default=1, help="worker processes for the trials")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("rearrange", help="decreasing rearrangement of a grid file")
    r.add_argument("--input", required=True)
    r.add_argument("--dim", type=int)
    r.add_argument("--out", help="output stem; writes STEM.csv and STEM.json")
    r.set_defaults(func=cmd_rearrange)

    o = sub.add_parser("oscillation", help="BMO seminorm of a grid file")
    o.add_argument("--input", required=True)
    o.add_argument("--dim", type=int)
    o.add_argument("--basis", choices=["cubes", "rectangles", "falsecubes"], default="cubes")
    o.add_argument("--refine", action="store_true")
    o.add_argument("--per-scale", action="store_true")
    o.add_argument("--max-side", type=int)
    o.add_argument("--stride", type=int, default=1)
    o.add_argument("--permuted", action="store_true")
    o.add_argument("--out")
    o.set_defaults(func=cmd_oscillation)

    c = sub.add_parser("czd", help="Calderon-Zygmund decomposition of a grid file")
    c.add_argument("--input", required=True)
    c.add_argument("--dim", type=int)
    lv = c.add_mutually_exclusive_group(required=True)
    lv.add_argument("--t", type=float, help="target measure; the level is the mean of g* on (0, t)")
    lv.add_argument("--level", type=float)
    c.add_argument("--method", choices=["dyadic", "bisection", "risingsun"], default="dyadic")
    c.add_argument("--out")
    c.set_defaults(func=cmd_czd)

    k = sub.add_parser("concentration", help="bounded-difference checks on random tables")
    k.add_argument("--random", type=_coords, default=10, metavar="m=M", help="number of coordinates, e.g. m=10")
    k.add_argument("--trials", type=int, default=100)
    k.add_argument("--kind", choices=["uniform", "gaussian", "additive", "parity", "threshold", "sparse"])
    k.add_argument("--p", type=float, default=0.5)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--out")
    k.set_defaults(func=cmd_concentration)

    g = sub.add_parser("corpus", help="write seeded test functions as grid files")
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--grid", type=int, default=64)
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--weights")
    g.add_argument("--out-dir", required=True)
    g.set_defaults(func=cmd_corpus)

    t = sub.add_parser("constants", help="table of dimensional constants")
    t.add_argument("--max-dim", type=int, default=8)
    t.add_argument("--out")
    t.set_defaults(func=cmd_constants)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (OscboundError, OSError) as e:
        print(f"oscbound: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

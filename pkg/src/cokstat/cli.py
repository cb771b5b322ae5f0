"""Command line interface: ``cokstat <subcommand> [options]``.

Entry distributions are given as ``uniform`` (uniform on [0, a)),
``bernoulli:q`` (0 with probability q, 1 otherwise) or
``table:v1=p1,v2=p2,...`` with exact decimal or fractional weights.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction

from . import verify
from .cohen_lenstra import OVERFLOW, CLTable, cl_rank_table, cl_tensor_table, enumerate_cl_support
from .experiments import (ExperimentConfig, read_config_file, run_cokernel_experiment, run_moment_experiment,
                          run_rank_experiment, universality_pair)
from .groups import GroupType, group_order
from .matrices import parse_distribution
from .moments import MomentTable, solve
from .residues import as_modulus
from .structure import HomVG, census_depth, character_sums, verify_code_lemma

DIST_HELP = ("entry law: 'uniform' (uniform on [0,a)), 'bernoulli:q' (0 w.p. q, 1 w.p. 1-q), "
             "or 'table:v1=p1,v2=p2,...'")
_CONFIG_KEYS = ("n", "u", "a", "dist", "trials", "seed", "threads", "group", "delta")


def _label(key) -> str:
    if key is OVERFLOW:
        return "overflow"
    return key.label if isinstance(key, GroupType) else str(key)


def _emit(args, rows, header, payload=None):
    """Write rows as CSV, or ``payload`` (default: rows as dicts) as JSON."""
    out = open(args.out, "w", newline="") if getattr(args, "out", None) else sys.stdout
    try:
        if getattr(args, "format", "csv") == "json":
            data = payload if payload is not None else [dict(zip(header, r)) for r in rows]
            json.dump(data, out, indent=2, default=_json_default)
            out.write("\n")
        else:
            w = csv.writer(out, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, GroupType):
        return x.label
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _common(p: argparse.ArgumentParser, trials=True):
    p.add_argument("--config", help="flat 'key = value' file; command-line flags override it")
    p.add_argument("--n", type=int)
    p.add_argument("--u", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--dist", help=DIST_HELP)
    if trials:
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _config(args, kind, **extra) -> ExperimentConfig:
    values = read_config_file(args.config) if args.config else {}
    for key in _CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    values.update(extra)
    values["kind"] = kind
    return ExperimentConfig(**values)


def _dist_rows(dist):
    return [(_label(k), c, f, lo, hi) for k, c, f, lo, hi in dist.rows()]


def cmd_simulate(args) -> int:
    cfg = _config(args, "cokernel-dist")
    dist = run_cokernel_experiment(cfg)
    header = ("group_label", "count", "frequency", "ci_low", "ci_high")
    rows = _dist_rows(dist)
    _emit(args, rows, header, {"config": cfg.describe(),
                               "rows": [dict(zip(header, r)) for r in rows]})
    return 0


def cmd_rank(args) -> int:
    cfg = _config(args, "rank-dist")
    dist = run_rank_experiment(cfg)
    theory = dict(cl_rank_table(cfg.a, cfg.u).entries)
    header = ("k", "frequency", "theoretical", "ci_low", "ci_high")
    ks = sorted(set(dist.counts) | {k for k in theory if theory[k] > 1e-6})
    rows = []
    for k in ks:
        lo, hi = dist.interval(k)
        rows.append((k, dist.frequency(k), theory.get(k, 0.0), lo, hi))
    _emit(args, rows, header, {"config": cfg.describe(),
                               "rows": [dict(zip(header, r)) for r in rows]})
    return 0


def cmd_moment(args) -> int:
    cfg = _config(args, "moment")
    est = run_moment_experiment(cfg)
    expected = float(group_order(est.target)) ** -cfg.u
    header = ("group_label", "mean", "stderr", "trials", "expected")
    rows = [(est.target.label, est.mean, est.stderr, est.trials, expected)]
    _emit(args, rows, header, {"config": cfg.describe(),
                               "rows": [dict(zip(header, r)) for r in rows]})
    return 0


def cmd_universality(args) -> int:
    kind = "rank-dist" if args.rank else "cokernel-dist"
    cfg_a = _config(args, kind)
    cfg_b = _config(args, kind, dist=args.dist_b, seed=args.seed_b if args.seed_b is not None else cfg_a.seed)
    rep = universality_pair(cfg_a, cfg_b)
    pa, pb = rep["a"].probabilities(), rep["b"].probabilities()
    theory = dict(rep["theory"].entries)
    keys = sorted(set(pa) | set(pb), key=lambda k: (k.order, k.components) if isinstance(k, GroupType) else k)
    header = ("outcome", "frequency_a", "frequency_b", "theoretical")
    rows = [(_label(k), pa.get(k, 0.0), pb.get(k, 0.0), theory.get(k, 0.0)) for k in keys]
    summary = {k: rep[k] for k in ("tv_ab", "tv_a_theory", "tv_b_theory")}
    if args.format == "csv":
        rows += [(name, value, "", "") for name, value in summary.items()]
    _emit(args, rows, header, {"config_a": rep["config_a"], "config_b": rep["config_b"], **summary,
                               "rows": [dict(zip(header, r)) for r in rows]})
    return 0


def cmd_cl_table(args) -> int:
    mod = as_modulus(args.a)
    if args.tensor:
        table = cl_tensor_table(mod, args.u)
    else:
        combined = {GroupType(): 1.0}
        for p in mod.primes:
            cutoff = p ** int(math.floor(math.log(args.cutoff, p) + 1e-12))
            local = enumerate_cl_support(p, args.u, cutoff)
            combined = {H * B: w * v for H, w in combined.items() for B, v in local}
        entries = sorted(combined.items(), key=lambda kv: (kv[0].order, kv[0].components))
        table = CLTable(entries, max(0.0, 1.0 - math.fsum(combined.values())))
    rows, acc = [], 0.0
    for B, w in table:
        acc += w
        rows.append((B.label, w, acc))
    rows.append(("tail_mass", table.tail_mass, acc + table.tail_mass))
    _emit(args, rows, ("group_label", "probability", "cumulative"))
    return 0


def cmd_rank_table(args) -> int:
    table = cl_rank_table(args.a, args.u, args.kmax)
    rows, acc = [], 0.0
    for k, w in table:
        acc += w
        rows.append((k, w, acc))
    rows.append(("tail_mass", table.tail_mass, acc + table.tail_mass))
    _emit(args, rows, ("k", "probability", "cumulative"))
    return 0


def read_moment_csv(path, a) -> MomentTable:
    entries = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            entries[GroupType.parse(row["group_label"])] = Fraction(row["moment"].strip())
    return MomentTable(a, entries, {G: "empirical" for G in entries})


def cmd_solve_moments(args) -> int:
    if args.input:
        table = read_moment_csv(args.input, args.a)
    else:
        table = MomentTable.cohen_lenstra(args.a, args.u, args.rank + 1)
    sol = solve(table, args.rank)
    rows = [(G.label, float(p), float(sol.residual.get(G, 0))) for G, p in sol.probabilities.items()]
    rows += [(G.label, 0.0, float(r)) for G, r in sol.residual.items() if G not in sol.probabilities]
    header = ("group_label", "probability", "residual")
    payload = {"a": args.a, "rank": args.rank,
               "rows": [{"group_label": G.label, "probability": str(p),
                         "residual": str(sol.residual.get(G, 0))} for G, p in sol.probabilities.items()]}
    _emit(args, rows, header, payload)
    return 0


def cmd_verify_bounds(args) -> int:
    a = args.a
    groups = [GroupType.parse(g) for g in args.group] if args.group else \
        [G for G in (GroupType.cyclic(a),) if group_order(G) <= 8]
    reports = []
    if args.dist:
        dist = parse_distribution(args.dist, a)
        reports.append(character_sums(dist, a).to_dict() | {"lemma": "character-sum"})
        for G in groups:
            ones = HomVG(G, tuple(1 % group_order(G) for _ in range(args.n)))
            reports.append(verify_code_lemma(ones, dist, args.delta, a))
    reports.append(verify.check_character_grid(a, args.step))
    for G in groups:
        reports.append(verify.check_code_lemma(G, a, args.n, args.step))
        reports.append(verify.check_depth_bound(G, a, args.n, (args.delta,), args.step))
        reports.append(census_depth(args.n, G, args.delta) | {"lemma": "depth-census"})
    ok = all(r.get("passed", r.get("pass", True)) for r in reports
             if r.get("status") != "precondition-violation")
    out = {"a": a, "delta": args.delta, "n_max": args.n, "passed": ok, "reports": reports}
    stream = open(args.out, "w") if args.out else sys.stdout
    json.dump(out, stream, indent=2, default=_json_default)
    stream.write("\n")
    if stream is not sys.stdout:
        stream.close()
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cokstat", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="empirical distribution of cok(M) (x) Z/aZ")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rank", help="empirical corank histogram mod a prime")
    _common(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("moment", help="estimate E #Sur(cok M, G)")
    _common(p)
    p.add_argument("--group", help="target group label, e.g. '3:[1]' or '2:[1,1]'")
    p.set_defaults(func=cmd_moment)

    p = sub.add_parser("universality", help="compare two entry laws at the same n, u, a")
    _common(p)
    p.add_argument("--dist-b", required=True, help="second entry law")
    p.add_argument("--seed-b", type=int)
    p.add_argument("--rank", action="store_true", help="compare corank histograms (a prime)")
    p.set_defaults(func=cmd_universality)

    p = sub.add_parser("cl-table", help="Cohen-Lenstra probabilities up to a cutoff")
    p.add_argument("--a", type=int, required=True, help="primes of a define the group family")
    p.add_argument("--u", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=2**8, help="max order per prime")
    p.add_argument("--tensor", action="store_true", help="law of Y (x) Z/aZ instead")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_cl_table)

    p = sub.add_parser("rank-table", help="limiting corank probabilities")
    p.add_argument("--a", type=int, required=True, help="the prime p")
    p.add_argument("--u", type=int, default=0)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_rank_table)

    p = sub.add_parser("solve-moments", help="invert moments to a distribution (exact)")
    p.add_argument("--in", dest="input", help="CSV with columns group_label, moment")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--rank", type=int, default=3, help="truncation rank R")
    p.add_argument("--u", type=int, default=0, help="with no --in, use M_G = |G|^-u")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_solve_moments)

    p = sub.add_parser("verify-bounds", help="exact checks of the column bounds (JSON)")
    p.add_argument("--a", type=int, default=2)
    p.add_argument("--n", type=int, default=6, help="largest n for exhaustive checks")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--dist", help=DIST_HELP)
    p.add_argument("--group", action="append", help="group label (repeatable)")
    p.add_argument("--step", type=float, default=0.05, help="probability grid step")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_bounds)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"cokstat: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

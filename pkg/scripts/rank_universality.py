#!/usr/bin/env python3
"""Corank histograms mod p for several entry laws, against the limiting law.

Example:
    python scripts/rank_universality.py --p 2 --n 50 100 200 --dist uniform bernoulli:0.9 bernoulli:0.99
"""
import argparse
import csv
import sys

from cokstat.experiments import ExperimentConfig, run_rank_experiment, theoretical_table, tv_distance

parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
parser.add_argument("--p", type=int, default=2)
parser.add_argument("--u", type=int, default=0)
parser.add_argument("--n", type=int, nargs="+", default=[25, 50, 100])
parser.add_argument("--dist", nargs="+", default=["uniform", "bernoulli:0.9"])
parser.add_argument("--trials", type=int, default=20_000)
parser.add_argument("--seed", type=int, default=1)
parser.add_argument("--kmax", type=int, default=3)
args = parser.parse_args()

out = csv.writer(sys.stdout, lineterminator="\n")
out.writerow(["dist", "n", *[f"freq_k{k}" for k in range(args.kmax + 1)], "tv_to_limit"])
for dist in args.dist:
    for n in args.n:
        cfg = ExperimentConfig(n=n, u=args.u, a=args.p, dist=dist, trials=args.trials, seed=args.seed,
                               kind="rank-dist")
        emp = run_rank_experiment(cfg)
        tv = tv_distance(emp, theoretical_table(cfg))
        out.writerow([dist, n, *[f"{emp.frequency(k):.5f}" for k in range(args.kmax + 1)], f"{tv:.5f}"])
limit = theoretical_table(ExperimentConfig(n=1, u=args.u, a=args.p, kind="rank-dist"))
out.writerow(["limit", "inf", *[f"{limit.probability(k):.5f}" for k in range(args.kmax + 1)], "0"])

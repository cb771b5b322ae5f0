#!/usr/bin/env python3
"""Sample E #Sur(cok M, G) as n grows and compare with |G|^-u."""
import argparse

from cokstat.experiments import ExperimentConfig, run_moment_experiment
from cokstat.groups import GroupType

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--group", default="3:[1]")
parser.add_argument("--a", type=int, default=3)
parser.add_argument("--u", type=int, default=0)
parser.add_argument("--dist", default="bernoulli:0.8")
parser.add_argument("--n", type=int, nargs="+", default=[5, 10, 20, 40])
parser.add_argument("--trials", type=int, default=20_000)
parser.add_argument("--seed", type=int, default=3)
args = parser.parse_args()

G = GroupType.parse(args.group)
target = G.order ** -args.u
print(f"G = {G.label}, a = {args.a}, u = {args.u}, entries {args.dist}, limit {target:.4f}")
print(f"{'n':>4}  {'mean':>8}  {'stderr':>8}  {'gap/stderr':>10}")
for n in args.n:
    est = run_moment_experiment(ExperimentConfig(n=n, u=args.u, a=args.a, dist=args.dist,
                                                 trials=args.trials, seed=args.seed), G)
    z = (est.mean - target) / est.stderr if est.stderr else float("nan")
    print(f"{n:>4}  {est.mean:8.4f}  {est.stderr:8.4f}  {z:10.2f}")

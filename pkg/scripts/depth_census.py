#!/usr/bin/env python3
"""Count maps (Z/a)^n -> G by depth and report each count against the n-dependent bound factor."""
import argparse

from cokstat.groups import GroupType
from cokstat.structure import census_depth

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--group", default="2:[1]")
parser.add_argument("--delta", type=float, default=0.3)
parser.add_argument("--n", type=int, nargs="+", default=list(range(4, 13)))
args = parser.parse_args()

G = GroupType.parse(args.group)
print("n,depth,count,bound_factor,ratio,depth_one_implies_code")
for n in args.n:
    c = census_depth(n, G, args.delta)
    for row in c["rows"]:
        print(f"{n},{row['depth']},{row['count']},{row.get('bound_factor', '')},{row.get('ratio', '')},"
              f"{c['depth_one_implies_code']}")

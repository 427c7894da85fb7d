#!/usr/bin/env python3
"""Compare exact range-search costs: sequential scan vs pivot table vs net tree.

For each dimension, generates a workload, calibrates per-query ranges to a
fixed result size, and reports the mean number of distance evaluations per
query for each method. An index "wins" when its count stays below the scan
cost n; in high dimension both indexes collapse onto the scan (or worse,
once navigation overhead is counted).

Usage:
    python scripts/index_showdown.py [--family uniform-cube] [--d 1,2,4,8,16]
                                     [--n 4000] [--k 16] [--queries 25]
"""

import argparse
import sys

import numpy as np

from metricdim import rng
from metricdim.generate import Family, GeneratorSpec, generate
from metricdim.nettree import build_net_tree, net_range_query
from metricdim.pivot import RandomPivots, build_pivot_index, calibrate_eps, range_query

FAMILIES = {f.value: f for f in Family}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--family", choices=sorted(FAMILIES), default="uniform-cube")
    parser.add_argument("--d", default="1,2,4,8,16,32")
    parser.add_argument("--n", type=int, default=4000)
    parser.add_argument("--k", type=int, default=16)
    parser.add_argument("--target", type=int, default=10)
    parser.add_argument("--queries", type=int, default=25)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args(argv)

    family = FAMILIES[args.family]
    print(f"family={args.family} n={args.n} k={args.k} target={args.target} queries={args.queries} seed={args.seed}")
    print(f"{'d':>5} {'scan':>8} {'pivot':>8} {'nettree':>9} {'pivot_wins':>10} {'net_wins':>8}")

    for d in (int(x) for x in args.d.split(",")):
        ds = generate(GeneratorSpec(family, d, args.n, rng.derive_seed(args.seed, 1, d)))
        qs = generate(GeneratorSpec(family, d, args.queries, rng.derive_seed(args.seed, 2, d)))
        index = build_pivot_index(ds, args.k, RandomPivots(rng.derive_seed(args.seed, 3, d)))
        tree, _ = build_net_tree(ds)
        pivot_cost, net_cost = [], []
        for q in qs.points:
            eps = calibrate_eps(ds, q, args.target)
            _, pstats = range_query(index, ds, q, eps)
            _, nstats = net_range_query(tree, ds, q, eps)
            pivot_cost.append(pstats.distance_computations)
            net_cost.append(nstats.distance_computations)
        pivot_mean, net_mean = float(np.mean(pivot_cost)), float(np.mean(net_cost))
        print(
            f"{d:>5} {args.n:>8} {pivot_mean:>8.0f} {net_mean:>9.0f} "
            f"{str(pivot_mean < args.n):>10} {str(net_mean < args.n):>8}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())

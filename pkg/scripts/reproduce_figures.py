#!/usr/bin/env python3
"""Regenerate the four benchmark CSV outputs into an output directory.

Usage:
    python scripts/reproduce_figures.py [--out-dir figures] [--seed 42] [--fast]

--fast shrinks every workload so the whole run takes seconds; the full
settings match the defaults documented in the README.
"""

import argparse
import sys
import time
from pathlib import Path

from metricdim import cli


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="figures")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--fast", action="store_true", help="small workloads for a quick smoke run")
    args = parser.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = str(args.seed)
    seeds = ",".join(str(args.seed + i) for i in range(10))

    if args.fast:
        jobs = [
            ("fig-a.csv", ["fig-a", "--d", "2,20,200", "--n", "60", "--seeds", seeds]),
            ("fig-b.csv", ["fig-b", "--d", "1,2,5,10", "--n", "500", "--seeds", seed]),
            ("fig-c.csv", ["fig-c", "--d", "16,64", "--n", "2000", "--k", "8", "--grid", "101", "--seed", seed]),
            ("fig-d.csv", ["fig-d", "--n", "1000", "--k", "8", "--target", "5", "--queries", "10", "--seed", seed]),
        ]
    else:
        jobs = [
            ("fig-a.csv", ["fig-a", "--seeds", seeds]),
            ("fig-b.csv", ["fig-b", "--seeds", seed]),
            ("fig-c.csv", ["fig-c", "--seed", seed]),
            ("fig-d.csv", ["fig-d", "--seed", seed]),
        ]

    for name, command in jobs:
        target = out / name
        start = time.time()
        code = cli.main(command + ["--out", str(target)])
        if code != 0:
            print(f"{name}: FAILED with exit code {code}", file=sys.stderr)
            return code
        print(f"{name}: wrote {target} in {time.time() - start:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())

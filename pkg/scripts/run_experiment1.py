#!/usr/bin/env python3
"""Synthetic-corpus rate benchmark: sample images from the model prior
and compare the adaptive quadtree code against fixed block sizes."""

import argparse
import sys
from pathlib import Path

from quadbayes import bench
from quadbayes.quadtree import HyperParams


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--dmax", type=int, default=6)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--g", type=float, default=0.5)
    ap.add_argument("--json", help="write the full report here")
    args = ap.parse_args()

    hp = HyperParams(alpha=args.alpha, beta=args.beta, g=args.g)
    report = bench.experiment1(count=args.count, d_max=args.dmax,
                               seed=args.seed, hp=hp)
    print(bench.format_table(report))
    if args.json:
        Path(args.json).write_text(bench.to_json(report))
        print(f"wrote {args.json}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

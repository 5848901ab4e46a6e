#!/usr/bin/env python3
"""Single-image rate benchmark on a binarized photograph."""

import argparse
import sys
from pathlib import Path

from quadbayes import bench, pnm
from quadbayes.quadtree import HyperParams


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("image", help="PGM (binarized at --threshold) or PBM")
    ap.add_argument("--threshold", type=int, default=128)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--g", type=float, default=0.5)
    ap.add_argument("--json", help="write the full report here")
    args = ap.parse_args()

    img = pnm.read_pnm(Path(args.image).read_bytes())
    bits = img.pixels if img.is_binary else pnm.binarize(img.pixels,
                                                         args.threshold)
    hp = HyperParams(alpha=args.alpha, beta=args.beta, g=args.g)
    report = bench.experiment2(bits, source=args.image, hp=hp)
    print(bench.format_table(report))
    if args.json:
        Path(args.json).write_text(bench.to_json(report))
        print(f"wrote {args.json}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

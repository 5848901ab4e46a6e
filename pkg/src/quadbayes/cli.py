"""Command-line interface.

Subcommands: compress, decompress, rate, map, gen, verify, bench.
Hyperparameters default to alpha = beta = 1/2, g = 1/2, binarization
threshold 128; all are overridable with flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, codec, oracle, pnm, synth, weighting
from .map_tree import compute_map, dump_model
from .quadtree import BlockId, HyperParams, enumerate_models, g_array, \
    node_count
from .weighting import fixed_block_g


def _hyper(args) -> HyperParams:
    return HyperParams(alpha=args.alpha, beta=args.beta, g=args.g)


def _read_binary_image(path: str, threshold: int) -> np.ndarray:
    img = pnm.read_pnm(Path(path).read_bytes())
    if img.is_binary:
        return img.pixels
    return pnm.binarize(img.pixels, threshold)


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--g", type=float, default=0.5,
                   help="prior split weight per block (default 0.5)")


def _add_threshold_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threshold", type=int, default=128,
                   help="binarization threshold for grayscale input "
                        "(value >= threshold maps to 1)")


def cmd_compress(args) -> int:
    img = _read_binary_image(args.input, args.threshold)
    data = codec.compress(img, _hyper(args), pad=not args.no_pad)
    Path(args.output).write_bytes(data)
    print(f"{args.input}: {img.shape[1]}x{img.shape[0]} -> {len(data)} bytes "
          f"({8.0 * len(data) / img.size:.3f} bpp)")
    return 0


def cmd_decompress(args) -> int:
    img = codec.decompress(Path(args.input).read_bytes(), _hyper(args))
    Path(args.output).write_bytes(pnm.write_pbm(img))
    print(f"{args.input}: -> {img.shape[1]}x{img.shape[0]} pixels")
    return 0


def cmd_rate(args) -> int:
    img = _read_binary_image(args.input, args.threshold)
    hp = _hyper(args)
    g = None
    if args.fixed is not None:
        d_max = codec.grid_depth_for(*img.shape)
        g = fixed_block_g(d_max, args.fixed)
    rates = codec.measure_rate(img, hp, g)
    label = f"fixed-{args.fixed}" if args.fixed is not None else "quadtree"
    print(f"{label}: actual {rates['actual_bpp']:.3f} bpp, "
          f"ideal {rates['ideal_bpp']:.3f} bpp")
    return 0


def cmd_map(args) -> int:
    img = _read_binary_image(args.input, args.threshold)
    hp = _hyper(args)
    side = 1 << codec.grid_depth_for(*img.shape)
    grid = np.zeros((side, side), dtype=np.uint8)
    grid[:img.shape[0], :img.shape[1]] = img
    run = weighting.run_image(grid, hp)
    est = compute_map(run.state)
    overlay = pnm.render_overlay(grid, est.model)[:img.shape[0],
                                                  :img.shape[1]]
    Path(args.output).write_bytes(pnm.write_pgm(overlay))
    if args.dump:
        Path(args.dump).write_text(dump_model(est.model))
    print(f"best segmentation: {len(est.model.leaf_indices)} blocks, "
          f"log posterior {est.log_posterior:.4f}")
    return 0


def cmd_gen(args) -> int:
    out = Path(args.dir)
    out.mkdir(parents=True, exist_ok=True)
    hp = _hyper(args)
    for i in range(args.count):
        seed = args.seed + i
        model, theta, img = synth.generate(hp, args.dmax, seed)
        stem = out / f"img_{i:04d}"
        stem.with_suffix(".pbm").write_bytes(pnm.write_pbm(img))
        sidecar = {
            "seed": seed,
            "d_max": args.dmax,
            "alpha": hp.alpha,
            "beta": hp.beta,
            "g": hp.g,
            "model": dump_model(model).splitlines(),
            "theta": {leaf.label(): theta[leaf]
                      for leaf in model.leaf_blocks()},
        }
        stem.with_suffix(".json").write_text(
            json.dumps(sidecar, indent=2, sort_keys=True))
    print(f"wrote {args.count} images to {out}")
    return 0


def cmd_verify(args) -> int:
    failures = 0

    def check(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        mark = "ok" if ok else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        print(f"{mark:4s} {name}{suffix}")
        failures += 0 if ok else 1

    d_max = args.dmax
    hp = HyperParams(alpha=args.alpha, beta=args.beta, g=args.g)
    rng = np.random.default_rng(args.seed)

    total = float(oracle.prior_weights(d_max, hp.g).sum())
    check("prior normalizes over all models", abs(total - 1.0) < 1e-12,
          f"sum={total!r}")

    rand_g = {BlockId.from_index(i): float(u) for i, u in enumerate(
        rng.random(node_count(d_max)))}
    total = float(oracle.prior_weights(d_max, rand_g, hp).sum())
    check("prior normalizes under randomized weights",
          abs(total - 1.0) < 1e-12, f"sum={total!r}")

    sums = oracle.leaf_prior_sums(d_max, hp.g)
    garr = g_array(d_max, hp.g)
    worst = 0.0
    for i in range(node_count(d_max)):
        expect = 1.0 - garr[i]
        idx = i
        while idx:
            idx = (idx - 1) // 4
            expect *= garr[idx]
        worst = max(worst, abs(sums[i] - expect))
    check("per-node leaf mass matches closed form", worst < 1e-12,
          f"max err={worst:.2e}")

    if d_max <= oracle.MAX_MIXTURE_DEPTH:
        worst = 0.0
        n_pixels = 1 << (2 * d_max)
        for k in range(args.images):
            bits = rng.integers(0, 2, size=n_pixels)
            st = weighting.new_state(d_max, hp)
            for t in range(n_pixels):
                p1 = st.coding_probability(1)
                ref = oracle.exact_mixture_predictive(
                    bits[:t].tolist(), 1, hp, d_max)
                worst = max(worst, abs(p1 - ref))
                st.advance(int(bits[t]))
        check("sequential mixture equals enumerated mixture", worst < 1e-9,
              f"max err={worst:.2e} over {args.images} images")

        post = oracle.posterior_weights(bits.tolist(), hp, d_max)
        worst = max(abs(weighting.model_posterior(st, m) - post[i])
                    for i, m in enumerate(enumerate_models(d_max)))
        check("state reconstructs the model posterior", worst < 1e-9,
              f"max err={worst:.2e}")

        est = compute_map(st)
        ref_model, ref_p = oracle.exact_map(bits.tolist(), hp, d_max)
        check("max-posterior search matches exhaustive argmax",
              abs(est.posterior - ref_p) < 1e-9 and
              abs(weighting.model_posterior(st, est.model) - ref_p) < 1e-9,
              f"value={est.posterior:.6f} ref={ref_p:.6f}")
    else:
        print(f"note: mixture checks need --dmax <= "
              f"{oracle.MAX_MIXTURE_DEPTH}, skipped")

    return 1 if failures else 0


def cmd_bench(args) -> int:
    hp = HyperParams(alpha=args.alpha, beta=args.beta, g=args.g)
    if args.which == "exp1":
        report = bench.experiment1(count=args.count, d_max=args.dmax,
                                   seed=args.seed, hp=hp)
    else:
        img = _read_binary_image(args.input, args.threshold)
        report = bench.experiment2(img, source=args.input, hp=hp)
    print(bench.format_table(report))
    if args.json:
        Path(args.json).write_text(bench.to_json(report))
        print(f"wrote {args.json}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="quadbayes",
        description="Lossless binary-image codec over a Bayesian mixture of "
                    "quadtree segmentations")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="PBM/PGM -> .qtb")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--no-pad", action="store_true",
                   help="refuse images that are not square powers of two")
    _add_model_flags(p)
    _add_threshold_flag(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help=".qtb -> PBM")
    p.add_argument("input")
    p.add_argument("output")
    _add_model_flags(p)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("rate", help="report actual and ideal bpp")
    p.add_argument("input")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--quadtree", action="store_true", default=True,
                       help="adaptive segmentation (default)")
    group.add_argument("--fixed", type=int, metavar="N",
                       help="fixed NxN block baseline")
    _add_model_flags(p)
    _add_threshold_flag(p)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("map", help="write the best-segmentation overlay")
    p.add_argument("input")
    p.add_argument("output", help="overlay PGM path")
    p.add_argument("--dump", help="also write a textual tree dump")
    _add_model_flags(p)
    _add_threshold_flag(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("gen", help="sample images from the model")
    p.add_argument("dir")
    p.add_argument("--dmax", type=int, default=6)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    _add_model_flags(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="cross-check against enumeration")
    p.add_argument("--dmax", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--images", type=int, default=5)
    _add_model_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="rate benchmarks")
    bsub = p.add_subparsers(dest="which", required=True)
    b1 = bsub.add_parser("exp1", help="synthetic corpus rates")
    b1.add_argument("--count", type=int, default=1000)
    b1.add_argument("--dmax", type=int, default=6)
    b1.add_argument("--seed", type=int, default=1)
    b1.add_argument("--json", help="write the full report as JSON")
    _add_model_flags(b1)
    b1.set_defaults(func=cmd_bench, which="exp1")
    b2 = bsub.add_parser("exp2", help="single-image rates")
    b2.add_argument("input")
    b2.add_argument("--json", help="write the full report as JSON")
    _add_model_flags(b2)
    _add_threshold_flag(b2)
    b2.set_defaults(func=cmd_bench, which="exp2")

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

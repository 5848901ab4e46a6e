"""Benchmark harness: synthetic-corpus and single-image rate tables.

Experiment 1 draws a corpus from the generative model itself (image i
uses seed ``seed + i``) and reports mean coding rates for the adaptive
quadtree configuration against fixed block-size baselines.  Experiment
2 does the same for one real binarized image.  The fixed baselines run
through the same engine with split weights forced to one segmentation.
"""

from __future__ import annotations

import json
import time

import numpy as np

from . import codec, synth
from .quadtree import DEFAULT_HP, GSpec, HyperParams
from .weighting import fixed_block_g

DEFAULT_BLOCK_SIZES = (4, 8, 16)


def _configs(d_max: int, block_sizes=DEFAULT_BLOCK_SIZES):
    configs: list[tuple[str, GSpec | None]] = [("quadtree", None)]
    for b in block_sizes:
        if b <= 1 << d_max:  # baseline blocks must fit the grid
            configs.append((f"fixed-{b}", fixed_block_g(d_max, b)))
    return configs


def _rate_entry(name: str, seed: int | None, images: list[np.ndarray],
                hp: HyperParams, g: GSpec | None) -> dict:
    t0 = time.perf_counter()
    per_image = []
    for img in images:
        data = codec.compress(img, hp, g)
        per_image.append(8.0 * len(data) / img.size)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return {
        "config": name,
        "seed": seed,
        "per_image_bpp": per_image,
        "mean_bpp": float(np.mean(per_image)),
        "wall_time_ms": wall_ms,
    }


def experiment1(count: int = 1000, d_max: int = 6, seed: int = 1,
                hp: HyperParams = DEFAULT_HP,
                block_sizes=DEFAULT_BLOCK_SIZES) -> dict:
    """Rates over a synthetic corpus drawn from the model prior."""
    images = [synth.generate(hp, d_max, seed + i)[2] for i in range(count)]
    results = [_rate_entry(name, seed, images, hp, g)
               for name, g in _configs(d_max, block_sizes)]
    return {
        "experiment": "exp1",
        "count": count,
        "d_max": d_max,
        "seed": seed,
        "alpha": hp.alpha,
        "beta": hp.beta,
        "results": results,
    }


def experiment2(image: np.ndarray, source: str = "",
                hp: HyperParams = DEFAULT_HP,
                block_sizes=DEFAULT_BLOCK_SIZES) -> dict:
    """Rates for one binary image under every configuration."""
    d_max = codec.grid_depth_for(*image.shape)
    results = [_rate_entry(name, None, [image], hp, g)
               for name, g in _configs(d_max, block_sizes)]
    return {
        "experiment": "exp2",
        "source": source,
        "height": int(image.shape[0]),
        "width": int(image.shape[1]),
        "alpha": hp.alpha,
        "beta": hp.beta,
        "results": results,
    }


def format_table(report: dict) -> str:
    """Aligned human-readable mean-rate table (bits per pixel)."""
    names = [r["config"] for r in report["results"]]
    means = [r["mean_bpp"] for r in report["results"]]
    cells = [f"{m:.3f}" for m in means]
    widths = [max(len(n), len(c)) for n, c in zip(names, cells)]
    head = "  ".join(n.ljust(w) for n, w in zip(names, widths))
    body = "  ".join(c.ljust(w) for c, w in zip(cells, widths))
    return f"mean coding rate (bit/pel)\n{head}\n{body}"


def to_json(report: dict) -> str:
    """Deterministic serialization (wall_time_ms fields excepted)."""
    return json.dumps(report, indent=2, sort_keys=True)

"""Sampling from the generative model: tree, then parameters, then pixels.

All draws go through a seeded ``numpy.random.Generator`` (PCG64), so
runs are reproducible from the seed alone.
"""

from __future__ import annotations

import numpy as np

from .quadtree import (
    BlockId,
    DEFAULT_HP,
    GSpec,
    HyperParams,
    QuadtreeModel,
    ROOT,
    g_value,
)


def sample_model(hp: HyperParams, d_max: int,
                 rng: np.random.Generator,
                 g: GSpec | None = None) -> QuadtreeModel:
    """Draw a segmentation: each block splits with its own weight g."""
    spec = hp.g if g is None else g
    inner: list[BlockId] = []
    stack = [ROOT]
    while stack:
        node = stack.pop()
        if rng.random() < g_value(spec, node, d_max):
            inner.append(node)
            stack.extend(node.children())
    return QuadtreeModel(d_max, inner)


def sample_params(m: QuadtreeModel, hp: HyperParams,
                  rng: np.random.Generator) -> dict[BlockId, float]:
    """Independent Beta(alpha, beta) occurrence probability per leaf."""
    return {leaf: float(rng.beta(hp.alpha, hp.beta))
            for leaf in m.leaf_blocks()}


def sample_image(m: QuadtreeModel, theta: dict[BlockId, float], d_max: int,
                 rng: np.random.Generator) -> np.ndarray:
    """Per-pixel Bernoulli draws with the containing leaf's parameter."""
    side = 1 << d_max
    img = np.zeros((side, side), dtype=np.uint8)
    for leaf in m.leaf_blocks():
        r, c = leaf.origin(d_max)
        s = leaf.side(d_max)
        img[r:r + s, c:c + s] = rng.random((s, s)) < theta[leaf]
    return img


def generate(hp: HyperParams, d_max: int, seed: int,
             ) -> tuple[QuadtreeModel, dict[BlockId, float], np.ndarray]:
    """One full draw (model, parameters, image) from a fresh seeded rng."""
    rng = np.random.default_rng(seed)
    m = sample_model(hp, d_max, rng)
    theta = sample_params(m, hp, rng)
    img = sample_image(m, theta, d_max, rng)
    return m, theta, img

"""Maximum-posterior segmentation extracted from a coding state.

A bottom-up max-product sweep scores every node with the best posterior
mass attainable by the subtree below it; a flag records whether
splitting beat stopping.  Backtracking the flags from the root yields
the single best full quadtree.  Scores are kept in log domain: a deep
tree multiplies thousands of weights and would underflow linear doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadtree import BlockId, QuadtreeModel, depth_of_index, level_offset
from .weighting import CodingState


@dataclass(frozen=True)
class MapEstimate:
    model: QuadtreeModel
    log_posterior: float  # natural log of the model's posterior mass

    @property
    def posterior(self) -> float:
        return math.exp(self.log_posterior)


def compute_map(st: CodingState) -> MapEstimate:
    """Most probable segmentation under the state's current split weights.

    Ties between stopping and splitting resolve to stopping, so the
    shallower tree wins exact ties.
    """
    d_max = st.d_max
    with np.errstate(divide="ignore"):
        log_stay = np.log1p(-st.g)   # weight of "this block is a leaf"
        log_split = np.log(st.g)
    n = st.g.size
    phi = np.zeros(n, dtype=np.float64)  # singleton level: phi = 1
    h = np.zeros(n, dtype=bool)
    for d in range(d_max - 1, -1, -1):
        lo, hi = level_offset(d), level_offset(d + 1)
        child_sum = phi[hi:level_offset(d + 2)].reshape(-1, 4).sum(axis=1)
        split = log_split[lo:hi] + child_sum
        stay = log_stay[lo:hi]
        h[lo:hi] = split > stay
        phi[lo:hi] = np.maximum(stay, split)

    inner: list[int] = []
    if h[0]:
        frontier = [0]
        while frontier:
            idx = frontier.pop()
            inner.append(idx)
            child0 = _first_child(idx)
            for q in range(4):
                if h[child0 + q]:
                    frontier.append(child0 + q)
    model = QuadtreeModel._from_index_sets(d_max, tuple(inner), None)
    return MapEstimate(model=model, log_posterior=float(phi[0]))


def _first_child(idx: int) -> int:
    depth = depth_of_index(idx)
    z = idx - level_offset(depth)
    return level_offset(depth + 1) + 4 * z


def dump_model(m: QuadtreeModel) -> str:
    """Pre-order textual dump, one ``<label> <inner|leaf>`` line per node."""
    inner = set(m.inner_indices)
    lines: list[str] = []

    def visit(idx: int) -> None:
        block = BlockId.from_index(idx)
        if idx in inner:
            lines.append(f"{block.label()} inner")
            child0 = _first_child(idx)
            for q in range(4):
                visit(child0 + q)
        else:
            lines.append(f"{block.label()} leaf")

    visit(0)
    return "\n".join(lines) + "\n"

"""Sequential Bayes-mixture coding probabilities in O(d_max) per pixel.

For each pixel, the engine walks the root-to-pixel path of blocks,
forms each block's Beta-Bernoulli predictive from its own counts, and
mixes child against parent with the per-node posterior split weight.
After the pixel value is known, the weights on that path are updated by
the ratio rule and every path block absorbs the pixel into its counts.
The root value of the mixture recursion is exactly the model-averaged
predictive over all full quadtrees, which is what gets fed to the
entropy coder.

State evolution is deterministic double precision with a fixed
evaluation order (see ``_kernels``); an encoder and a decoder running
the same symbol sequence reproduce identical state trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .leaf_model import Counts
from .quadtree import (
    BlockId,
    DEFAULT_HP,
    GSpec,
    HyperParams,
    QuadtreeModel,
    g_array,
    node_count,
)


class StateError(RuntimeError):
    """Raised when a coding state is used past the end of its grid."""


def grid_depth(shape: tuple[int, int]) -> int:
    """d_max for a square power-of-two image shape."""
    h, w = shape
    if h != w or h < 1 or h & (h - 1):
        raise ValueError(f"image must be square with power-of-two side, "
                         f"got {h}x{w}")
    return h.bit_length() - 1


def fixed_block_g(d_max: int, block_size: int) -> tuple[float, ...]:
    """Per-depth split weights that force a fixed-size block segmentation.

    Splitting is certain above the depth whose blocks have side
    ``block_size`` and impossible from there down, so exactly that
    segmentation carries all prior mass.
    """
    if block_size < 1 or block_size & (block_size - 1):
        raise ValueError(f"block size must be a power of two, "
                         f"got {block_size}")
    split_depth = d_max - (block_size.bit_length() - 1)
    if split_depth < 0:
        raise ValueError(f"block size {block_size} exceeds the "
                         f"{1 << d_max}-pixel grid side")
    return tuple(1.0 if d < split_depth else 0.0 for d in range(d_max + 1))


class CodingState:
    """Mutable per-image state: split weights and counts for every node.

    Single-writer: one state must not be mutated concurrently.  Distinct
    states are fully independent.
    """

    __slots__ = ("d_max", "hp", "alpha", "beta", "n_pixels", "t", "visits",
                 "g", "n0", "n1", "_path", "_q0", "_q1", "_scratch_t",
                 "_clamp")

    def __init__(self, d_max: int, hp: HyperParams = DEFAULT_HP,
                 g: GSpec | None = None):
        if d_max < 0:
            raise ValueError("d_max must be nonnegative")
        self.d_max = d_max
        self.hp = hp
        self.alpha = float(hp.alpha)
        self.beta = float(hp.beta)
        self.n_pixels = 1 << (2 * d_max)
        self.t = 0
        self.visits = 0
        self.g = g_array(d_max, hp.g if g is None else g)
        n = node_count(d_max)
        self.n0 = np.zeros(n, dtype=np.int64)
        self.n1 = np.zeros(n, dtype=np.int64)
        self._path = np.zeros(d_max + 1, dtype=np.int64)
        self._q0 = np.zeros(d_max + 1, dtype=np.float64)
        self._q1 = np.zeros(d_max + 1, dtype=np.float64)
        self._scratch_t = -1
        self._clamp = np.zeros(1, dtype=np.float64)

    @property
    def clamp_excess(self) -> float:
        """Worst split-weight overshoot absorbed by clamping so far."""
        return float(self._clamp[0])

    def _fill_scratch(self) -> None:
        if self.t >= self.n_pixels:
            raise StateError(f"all {self.n_pixels} pixels already consumed")
        if self._scratch_t != self.t:
            self.visits += _kernels.step(
                self.g, self.n0, self.n1, self.alpha, self.beta,
                self.t, self.d_max, self._path, self._q0, self._q1)
            self._scratch_t = self.t

    def probabilities(self) -> tuple[float, float]:
        """Coding probabilities (p0, p1) for the next pixel. Read-only."""
        self._fill_scratch()
        return float(self._q0[0]), float(self._q1[0])

    def coding_probability(self, v: int) -> float:
        p0, p1 = self.probabilities()
        if v == 1:
            return p1
        if v == 0:
            return p0
        raise ValueError(f"pixel value must be 0 or 1, got {v}")

    def advance(self, v: int) -> None:
        """Consume the realized pixel value: update weights and counts."""
        if v not in (0, 1):
            raise ValueError(f"pixel value must be 0 or 1, got {v}")
        self._fill_scratch()
        _kernels.advance(self.g, self.n0, self.n1, np.int64(v), self.d_max,
                         self._path, self._q0, self._q1, self._clamp)
        self.t += 1
        assert self._clamp[0] < 1e-12, \
            f"split-weight clamp absorbed {self._clamp[0]:.3e} > 1e-12"

    def g_posterior(self, block: BlockId) -> float:
        return float(self.g[block.index(self.d_max)])

    def node_counts(self, block: BlockId) -> Counts:
        i = block.index(self.d_max)
        return Counts(int(self.n0[i]), int(self.n1[i]))


def new_state(d_max: int, hp: HyperParams = DEFAULT_HP,
              g: GSpec | None = None) -> CodingState:
    """Fresh state: zero counts, split weights at their prior values."""
    return CodingState(d_max, hp, g)


def coding_probability(st: CodingState, v: int) -> float:
    """q(v) for the next pixel under the current state (no mutation)."""
    return st.coding_probability(v)


def advance(st: CodingState, v: int) -> None:
    st.advance(v)


def model_posterior(st: CodingState, m: QuadtreeModel) -> float:
    """Posterior mass of one segmentation, reconstructed from the state.

    Product of the current split weights over inner nodes and their
    complements over leaves.  Underflows for deep trees; see
    :func:`model_log_posterior`.
    """
    if m.d_max != st.d_max:
        raise ValueError("model and state have different d_max")
    p = 1.0
    for i in m.inner_indices:
        p *= st.g[i]
    for i in m.leaf_indices:
        p *= 1.0 - st.g[i]
    return p


def model_log_posterior(st: CodingState, m: QuadtreeModel) -> float:
    """Natural log of :func:`model_posterior`, safe for deep trees."""
    if m.d_max != st.d_max:
        raise ValueError("model and state have different d_max")
    with np.errstate(divide="ignore"):
        inner = np.asarray(m.inner_indices, dtype=np.intp)
        leaf = np.asarray(m.leaf_indices, dtype=np.intp)
        total = 0.0
        if inner.size:
            total += float(np.sum(np.log(st.g[inner])))
        total += float(np.sum(np.log1p(-st.g[leaf])))
    return total


def _as_bits(image: np.ndarray) -> np.ndarray:
    bits = np.ascontiguousarray(image, dtype=np.uint8)
    if bits.ndim != 2:
        raise ValueError("image must be 2-D")
    if bits.max(initial=0) > 1:
        raise ValueError("image must be binary (values 0 and 1)")
    return bits


@dataclass
class ImageRun:
    """Result of scanning a whole image through the engine."""

    p1: np.ndarray          # coding probability of symbol 1, per pixel
    p_realized: np.ndarray  # coding probability of the actual pixel value
    state: CodingState      # state after the final pixel


def run_image(image: np.ndarray, hp: HyperParams = DEFAULT_HP,
              g: GSpec | None = None) -> ImageRun:
    """Scan a square power-of-two binary image in raster order."""
    bits = _as_bits(image)
    d_max = grid_depth(bits.shape)
    st = CodingState(d_max, hp, g)
    p1 = np.empty(st.n_pixels, dtype=np.float64)
    p_real = np.empty(st.n_pixels, dtype=np.float64)
    st.visits += _kernels.run_bits(
        bits.reshape(-1), st.g, st.n0, st.n1, st.alpha, st.beta, d_max,
        st._path, st._q0, st._q1, p1, p_real, st._clamp)
    st.t = st.n_pixels
    st._scratch_t = -1
    assert st._clamp[0] < 1e-12, \
        f"split-weight clamp absorbed {st._clamp[0]:.3e} > 1e-12"
    return ImageRun(p1=p1, p_realized=p_real, state=st)


def total_ideal_codelength(image: np.ndarray, hp: HyperParams = DEFAULT_HP,
                           g: GSpec | None = None) -> float:
    """Sum over pixels of -log2 of the realized coding probability."""
    run = run_image(image, hp, g)
    return float(-np.sum(np.log2(run.p_realized)))

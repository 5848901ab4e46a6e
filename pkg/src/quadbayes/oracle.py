"""Brute-force references computed by full model enumeration.

Everything here is the slow, obviously-correct route: evidences and
predictives as explicit sums over every full quadtree, posteriors by
Bayes' rule over that enumeration, and the maximum-posterior model by
exhaustive argmax.  Used as the right-hand side of equivalence tests
and by the ``verify`` CLI subcommand; guarded to small grids.
"""

from __future__ import annotations

import functools
from math import lgamma, exp
from typing import Mapping, Sequence

import numpy as np

from .quadtree import (
    GSpec,
    HyperParams,
    QuadtreeModel,
    _enumerate_index_sets,
    g_array,
    node_count,
    MAX_ENUMERATION_DEPTH,
)

# The mixture predictive sums over every model at every step; depth 2
# (17 models) is plenty to exercise it and keeps tests fast.
MAX_MIXTURE_DEPTH = 2


class _Enumeration:
    """Flat arrays over the full model list for bulk products."""

    def __init__(self, d_max: int):
        raw = _enumerate_index_sets(d_max)
        self.d_max = d_max
        self.raw = raw
        self.n_models = len(raw)
        leaf_counts = np.fromiter((len(l) for _, l in raw),
                                  dtype=np.intp, count=self.n_models)
        self.leaf_concat = np.fromiter(
            (i for _, l in raw for i in l), dtype=np.intp)
        self.leaf_starts = np.zeros(self.n_models, dtype=np.intp)
        np.cumsum(leaf_counts[:-1], out=self.leaf_starts[1:])
        self.model_of_leaf_slot = np.repeat(
            np.arange(self.n_models, dtype=np.intp), leaf_counts)
        # raw[0] is the root-only model: the single empty inner set.
        inner_counts = np.fromiter((len(i) for i, _ in raw),
                                   dtype=np.intp, count=self.n_models)
        assert inner_counts[0] == 0 and np.all(inner_counts[1:] > 0)
        self.inner_concat = np.fromiter(
            (j for i, _ in raw for j in i), dtype=np.intp)
        self.inner_starts = np.zeros(max(self.n_models - 1, 0), dtype=np.intp)
        if self.n_models > 2:
            np.cumsum(inner_counts[1:-1], out=self.inner_starts[1:])
        self._models = None

    def priors(self, garr: np.ndarray) -> np.ndarray:
        """Product-form weight of every model under split weights ``garr``."""
        out = np.multiply.reduceat(1.0 - garr[self.leaf_concat],
                                   self.leaf_starts)
        if self.n_models > 1:
            out[1:] *= np.multiply.reduceat(garr[self.inner_concat],
                                            self.inner_starts)
        return out

    def leaf_products(self, per_node: np.ndarray) -> np.ndarray:
        """Product of ``per_node`` over each model's leaf set."""
        return np.multiply.reduceat(per_node[self.leaf_concat],
                                    self.leaf_starts)

    def models(self) -> list[QuadtreeModel]:
        if self._models is None:
            self._models = [
                QuadtreeModel._from_index_sets(self.d_max, inner, leaf)
                for inner, leaf in self.raw
            ]
        return self._models

    def model_at(self, i: int) -> QuadtreeModel:
        inner, leaf = self.raw[i]
        return QuadtreeModel._from_index_sets(self.d_max, inner, leaf)


@functools.lru_cache(maxsize=None)
def _enumeration(d_max: int) -> _Enumeration:
    if d_max > MAX_ENUMERATION_DEPTH:
        raise ValueError(
            f"enumeration is limited to d_max <= {MAX_ENUMERATION_DEPTH}")
    return _Enumeration(d_max)


def _beta_ratio(n0: int, n1: int, alpha: float, beta: float) -> float:
    """B(n1 + alpha, n0 + beta) / B(alpha, beta)."""
    num = lgamma(n1 + alpha) + lgamma(n0 + beta) - lgamma(n0 + n1 + alpha + beta)
    den = lgamma(alpha) + lgamma(beta) - lgamma(alpha + beta)
    return exp(num - den)


def exact_block_marginal(pixels: Sequence[int], hp: HyperParams) -> float:
    """Marginal likelihood of a multiset of pixels from one block."""
    n1 = int(sum(pixels))
    n0 = len(pixels) - n1
    return _beta_ratio(n0, n1, hp.alpha, hp.beta)


def _node_counts(pixels: Sequence[int], d_max: int) -> tuple[np.ndarray,
                                                             np.ndarray]:
    """Per-node 0/1 counts over a raster-order pixel prefix."""
    n_pixels = 1 << (2 * d_max)
    if len(pixels) > n_pixels:
        raise ValueError(f"prefix longer than the {n_pixels}-pixel grid")
    n0 = np.zeros(node_count(d_max), dtype=np.int64)
    n1 = np.zeros(node_count(d_max), dtype=np.int64)
    width = 1 << d_max
    for t, v in enumerate(pixels):
        row, col = divmod(t, width)
        target = n1 if v else n0
        target[0] += 1
        off, lvl_width, z = 0, 1, 0
        for d in range(1, d_max + 1):
            off += lvl_width
            lvl_width <<= 2
            xb = (row >> (d_max - d)) & 1
            yb = (col >> (d_max - d)) & 1
            z = (z << 2) | (xb << 1) | yb
            target[off + z] += 1
    return n0, n1


def _marginal_per_node(pixels: Sequence[int], hp: HyperParams,
                       d_max: int) -> np.ndarray:
    n0, n1 = _node_counts(pixels, d_max)
    out = np.empty(n0.size, dtype=np.float64)
    for i in range(n0.size):
        out[i] = _beta_ratio(int(n0[i]), int(n1[i]), hp.alpha, hp.beta)
    return out


def _resolve_g(d_max: int, hp: HyperParams, g) -> np.ndarray:
    if g is None:
        g = hp.g
    if isinstance(g, np.ndarray):
        if g.size != node_count(d_max):
            raise ValueError("g array has the wrong node count")
        return np.asarray(g, dtype=np.float64)
    return g_array(d_max, g)


def evidence(pixels: Sequence[int], hp: HyperParams, d_max: int,
             g: GSpec | np.ndarray | None = None) -> float:
    """Mixture marginal likelihood of a raster prefix over all models."""
    enum = _enumeration(d_max)
    priors = enum.priors(_resolve_g(d_max, hp, g))
    lik = enum.leaf_products(_marginal_per_node(pixels, hp, d_max))
    return float(priors @ lik)


def exact_mixture_predictive(pixels: Sequence[int], v: int, hp: HyperParams,
                             d_max: int,
                             g: GSpec | np.ndarray | None = None) -> float:
    """Model-averaged predictive for the next raster pixel being ``v``.

    Computed as a ratio of enumerated evidences; limited to
    d_max <= 2 because every call touches every model.
    """
    if d_max > MAX_MIXTURE_DEPTH:
        raise ValueError(
            f"mixture predictive is limited to d_max <= {MAX_MIXTURE_DEPTH}")
    if len(pixels) >= 1 << (2 * d_max):
        raise ValueError("no pixels left to predict")
    num = evidence(list(pixels) + [v], hp, d_max, g)
    den = evidence(pixels, hp, d_max, g)
    return num / den


def prior_weights(d_max: int,
                  g: GSpec | np.ndarray,
                  hp: HyperParams = HyperParams()) -> np.ndarray:
    """Product-form weight of every enumerated model (enumeration order)."""
    enum = _enumeration(d_max)
    return enum.priors(_resolve_g(d_max, hp, g))


def leaf_prior_sums(d_max: int,
                    g: GSpec | np.ndarray,
                    hp: HyperParams = HyperParams()) -> np.ndarray:
    """For each node s: the prior mass of models whose leaf set contains s."""
    enum = _enumeration(d_max)
    priors = enum.priors(_resolve_g(d_max, hp, g))
    return np.bincount(enum.leaf_concat,
                       weights=priors[enum.model_of_leaf_slot],
                       minlength=node_count(d_max))


def posterior_weights(pixels: Sequence[int], hp: HyperParams, d_max: int,
                      g: GSpec | np.ndarray | None = None) -> np.ndarray:
    """Posterior probability of every model given a raster prefix."""
    enum = _enumeration(d_max)
    priors = enum.priors(_resolve_g(d_max, hp, g))
    lik = enum.leaf_products(_marginal_per_node(pixels, hp, d_max))
    w = priors * lik
    return w / w.sum()


def exact_model_posterior(pixels: Sequence[int], hp: HyperParams, d_max: int,
                          g: GSpec | np.ndarray | None = None,
                          ) -> dict[QuadtreeModel, float]:
    """Posterior as a model -> probability map (enumeration order)."""
    enum = _enumeration(d_max)
    w = posterior_weights(pixels, hp, d_max, g)
    return dict(zip(enum.models(), w.tolist()))


def exact_map(pixels: Sequence[int], hp: HyperParams, d_max: int,
              g: GSpec | np.ndarray | None = None,
              ) -> tuple[QuadtreeModel, float]:
    """Exhaustive argmax of the model posterior, with its probability."""
    enum = _enumeration(d_max)
    w = posterior_weights(pixels, hp, d_max, g)
    i = int(np.argmax(w))
    return enum.model_at(i), float(w[i])

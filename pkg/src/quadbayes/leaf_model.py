"""Per-block Bernoulli source with a conjugate Beta prior.

The parameter is integrated out, so a block's predictive distribution
depends only on the 0/1 counts observed inside it so far.
"""

from __future__ import annotations

from typing import NamedTuple

from .quadtree import HyperParams


class Counts(NamedTuple):
    n0: int = 0
    n1: int = 0


def predictive(c: Counts, hp: HyperParams, v: int) -> float:
    """Posterior-predictive probability of the next pixel being ``v``."""
    total = c.n0 + c.n1 + hp.alpha + hp.beta
    if v == 1:
        return (c.n1 + hp.alpha) / total
    if v == 0:
        return (c.n0 + hp.beta) / total
    raise ValueError(f"pixel value must be 0 or 1, got {v}")


def update(c: Counts, v: int) -> Counts:
    """Counts after observing one more pixel of value ``v``."""
    if v == 1:
        return Counts(c.n0, c.n1 + 1)
    if v == 0:
        return Counts(c.n0 + 1, c.n1)
    raise ValueError(f"pixel value must be 0 or 1, got {v}")

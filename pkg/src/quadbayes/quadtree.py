"""Block addressing and segmentation models on the complete quadtree.

The pixel grid is square with side ``2**d_max``.  Recursive quadrisection
yields square blocks: a block at depth ``d`` has side ``2**(d_max - d)``
and is addressed by its quadrant path from the root, one
(row-half, col-half) bit pair per level.  Pixel coordinates are
``(row, col)`` and raster order is ``t = row * width + col``.

Nodes of the complete tree live in a flat array indexed by level offset
plus Morton code, so parent/child arithmetic is O(1): the children of
the node with Morton code ``z`` at depth ``d`` are ``4*z + q`` at depth
``d + 1``, with quadrant ``q = 2*row_bit + col_bit``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

# Quadrants in Morton order: (row half, column half).
QUADRANTS: tuple[tuple[int, int], ...] = ((0, 0), (0, 1), (1, 0), (1, 1))

# Full model enumeration grows as T(d+1) = 1 + T(d)**4; depth 3 already
# has 83,522 trees and depth 4 would have ~4.9e19.
MAX_ENUMERATION_DEPTH = 3


def level_offset(depth: int) -> int:
    """Flat-array position of the first node at ``depth``."""
    return ((1 << (2 * depth)) - 1) // 3


def node_count(d_max: int) -> int:
    """Number of nodes in the complete quadtree of depth ``d_max``."""
    return level_offset(d_max + 1)


def depth_of_index(index: int) -> int:
    """Depth of the node stored at flat-array position ``index``."""
    return ((3 * index + 1).bit_length() - 1) // 2


@dataclass(frozen=True)
class BlockId:
    """Address of one block: the quadrant path down from the root.

    The empty path is the whole grid.  A path of length ``d_max``
    addresses a single pixel.
    """

    path: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        for xy in self.path:
            if xy not in QUADRANTS:
                raise ValueError(f"bad quadrant pair {xy!r}")

    @property
    def depth(self) -> int:
        return len(self.path)

    @property
    def morton(self) -> int:
        """Morton code among nodes of the same depth."""
        z = 0
        for x, y in self.path:
            z = (z << 2) | (x << 1) | y
        return z

    @classmethod
    def from_morton(cls, depth: int, z: int) -> "BlockId":
        if not 0 <= z < (1 << (2 * depth)):
            raise ValueError(f"morton code {z} out of range for depth {depth}")
        pairs = []
        for level in reversed(range(depth)):
            q = (z >> (2 * level)) & 3
            pairs.append((q >> 1, q & 1))
        return cls(tuple(pairs))

    @classmethod
    def from_index(cls, index: int) -> "BlockId":
        depth = depth_of_index(index)
        return cls.from_morton(depth, index - level_offset(depth))

    def index(self, d_max: int) -> int:
        """Position in the flat complete-tree array of grid depth ``d_max``."""
        if self.depth > d_max:
            raise ValueError(f"depth {self.depth} exceeds d_max={d_max}")
        return level_offset(self.depth) + self.morton

    def child(self, x: int, y: int) -> "BlockId":
        return BlockId(self.path + ((x, y),))

    def children(self) -> tuple["BlockId", ...]:
        return tuple(self.child(x, y) for x, y in QUADRANTS)

    def parent(self) -> "BlockId":
        if not self.path:
            raise ValueError("the root block has no parent")
        return BlockId(self.path[:-1])

    def side(self, d_max: int) -> int:
        """Side length in pixels on a ``2**d_max`` grid."""
        if self.depth > d_max:
            raise ValueError(f"depth {self.depth} exceeds d_max={d_max}")
        return 1 << (d_max - self.depth)

    def origin(self, d_max: int) -> tuple[int, int]:
        """(row, col) of the top-left pixel of this block."""
        side = self.side(d_max)  # validates depth
        row = col = 0
        for k, (x, y) in enumerate(self.path, start=1):
            row += x << (d_max - k)
            col += y << (d_max - k)
        return row, col

    def label(self) -> str:
        """Compact quadrant-digit label; the root is ``"."``."""
        if not self.path:
            return "."
        return "".join(str((x << 1) | y) for x, y in self.path)

    def __repr__(self) -> str:
        return f"BlockId({self.label()!r})"


ROOT = BlockId()

GSpec = Union[float, Sequence[float], Mapping[BlockId, float]]


def _check_unit(value: float, what: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{what} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class HyperParams:
    """Prior configuration: Beta(alpha, beta) per block plus split weights.

    ``g`` gives the a-priori probability that a block is subdivided.  It
    may be a single float, a per-depth sequence (index = block depth), or
    a mapping from :class:`BlockId` to float (missing nodes default to
    1/2).  Single-pixel blocks never split; their weight is forced to 0
    regardless of ``g``.
    """

    alpha: float = 0.5
    beta: float = 0.5
    g: GSpec = 0.5

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if isinstance(self.g, (int, float)):
            _check_unit(self.g, "g")


DEFAULT_HP = HyperParams()


def g_value(g: GSpec, block: BlockId, d_max: int) -> float:
    """Split weight of ``block`` under the given ``g`` form (0 at pixels)."""
    if block.depth > d_max:
        raise ValueError(f"depth {block.depth} exceeds d_max={d_max}")
    if block.depth == d_max:
        return 0.0
    if isinstance(g, (int, float)):
        return _check_unit(g, "g")
    if isinstance(g, Mapping):
        return _check_unit(g.get(block, 0.5), f"g[{block.label()}]")
    return _check_unit(g[block.depth], f"g[depth={block.depth}]")


def g_array(d_max: int, g: GSpec) -> np.ndarray:
    """Split weights for every node of the flat complete-tree array."""
    n = node_count(d_max)
    if isinstance(g, (int, float)):
        arr = np.full(n, _check_unit(g, "g"), dtype=np.float64)
    elif isinstance(g, Mapping):
        arr = np.full(n, 0.5, dtype=np.float64)
        for block, value in g.items():
            arr[block.index(d_max)] = value
    else:
        if len(g) != d_max + 1:
            raise ValueError(
                f"per-depth g needs {d_max + 1} entries, got {len(g)}")
        arr = np.empty(n, dtype=np.float64)
        for depth in range(d_max + 1):
            arr[level_offset(depth):level_offset(depth + 1)] = g[depth]
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError("g values must lie in [0, 1]")
    # pixel-level blocks cannot split
    arr[level_offset(d_max):] = 0.0
    return arr


def block_contains(s: BlockId, coord: tuple[int, int], d_max: int) -> bool:
    """Whether pixel ``coord = (row, col)`` lies inside block ``s``.

    Equivalent to checking that the top ``depth`` bits of the row equal
    the path's row bits and likewise for the column.
    """
    i, j = coord
    side = 1 << d_max
    if not (0 <= i < side and 0 <= j < side):
        raise ValueError(f"coordinate {coord} outside {side}x{side} grid")
    d = s.depth
    if d > d_max:
        raise ValueError(f"depth {d} exceeds d_max={d_max}")
    if d == 0:
        return True
    xbits = ybits = 0
    for x, y in s.path:
        xbits = (xbits << 1) | x
        ybits = (ybits << 1) | y
    return (i >> (d_max - d)) == xbits and (j >> (d_max - d)) == ybits


def path_nodes(t: int, d_max: int) -> list[BlockId]:
    """Blocks containing pixel ``t`` (raster order), root first.

    The result has ``d_max + 1`` entries; consecutive entries are
    parent and child, ending at the single-pixel block.
    """
    n_pixels = 1 << (2 * d_max)
    if not 0 <= t < n_pixels:
        raise ValueError(f"pixel index {t} out of range [0, {n_pixels})")
    width = 1 << d_max
    row, col = t // width, t % width
    nodes = [ROOT]
    for d in range(1, d_max + 1):
        x = (row >> (d_max - d)) & 1
        y = (col >> (d_max - d)) & 1
        nodes.append(nodes[-1].child(x, y))
    return nodes


class QuadtreeModel:
    """A full quadtree of blocks: every inner node has all four children.

    The model is identified by its inner-node set; the leaf set (the
    children of inner nodes that are not themselves inner, or the root
    alone) partitions the pixel grid into blocks.
    """

    __slots__ = ("d_max", "_inner_idx", "_leaf_idx", "_inner", "_leaves")

    def __init__(self, d_max: int, inner: Iterable[BlockId] = ()):
        if d_max < 0:
            raise ValueError("d_max must be nonnegative")
        inner_set = frozenset(inner)
        for node in inner_set:
            if node.depth >= d_max:
                raise ValueError(
                    f"inner node {node.label()} too deep for d_max={d_max}")
            if node.path and node.parent() not in inner_set:
                raise ValueError(
                    f"inner node {node.label()} is disconnected from the root")
        self.d_max = d_max
        self._inner_idx = tuple(sorted(n.index(d_max) for n in inner_set))
        self._leaf_idx = None
        self._inner = inner_set
        self._leaves = None

    @classmethod
    def _from_index_sets(cls, d_max: int,
                         inner_idx: tuple[int, ...],
                         leaf_idx: tuple[int, ...] | None) -> "QuadtreeModel":
        # Trusted constructor: callers guarantee a valid rooted full tree.
        # leaf_idx=None derives the leaf set lazily.
        m = cls.__new__(cls)
        m.d_max = d_max
        m._inner_idx = tuple(sorted(inner_idx))
        m._leaf_idx = tuple(sorted(leaf_idx)) if leaf_idx is not None else None
        m._inner = None
        m._leaves = None
        return m

    @property
    def inner_indices(self) -> tuple[int, ...]:
        return self._inner_idx

    @property
    def leaf_indices(self) -> tuple[int, ...]:
        if self._leaf_idx is None:
            if not self._inner_idx:
                leaf = (0,)
            else:
                inner = set(self._inner_idx)
                leaf = []
                for i in self._inner_idx:
                    depth = depth_of_index(i)
                    z = i - level_offset(depth)
                    child0 = level_offset(depth + 1) + 4 * z
                    for q in range(4):
                        if child0 + q not in inner:
                            leaf.append(child0 + q)
                leaf = tuple(sorted(leaf))
            self._leaf_idx = leaf
        return self._leaf_idx

    @property
    def inner(self) -> frozenset[BlockId]:
        if self._inner is None:
            self._inner = frozenset(BlockId.from_index(i)
                                    for i in self._inner_idx)
        return self._inner

    @property
    def leaves(self) -> frozenset[BlockId]:
        if self._leaves is None:
            self._leaves = frozenset(BlockId.from_index(i)
                                     for i in self.leaf_indices)
        return self._leaves

    def leaf_blocks(self) -> tuple[BlockId, ...]:
        """Leaves in flat-index order (deterministic)."""
        return tuple(BlockId.from_index(i) for i in self.leaf_indices)

    @property
    def max_depth(self) -> int:
        return max((depth_of_index(i) for i in self.leaf_indices), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuadtreeModel):
            return NotImplemented
        return self.d_max == other.d_max and self._inner_idx == other._inner_idx

    def __hash__(self) -> int:
        return hash((self.d_max, self._inner_idx))

    def __repr__(self) -> str:
        labels = ",".join(b.label() for b in sorted(
            self.inner, key=lambda b: b.index(self.d_max)))
        return f"QuadtreeModel(d_max={self.d_max}, inner=[{labels}])"


def model_prior(m: QuadtreeModel, hp: HyperParams) -> float:
    """Product-form prior: (1 - g) over leaves times g over inner nodes."""
    garr = g_array(m.d_max, hp.g)
    p = 1.0
    for i in m.inner_indices:
        p *= garr[i]
    for i in m.leaf_indices:
        p *= 1.0 - garr[i]
    return p


def _enumerate_index_sets(d_max: int) -> list[tuple[tuple[int, ...],
                                                    tuple[int, ...]]]:
    """All full quadtrees as (inner indices, leaf indices) pairs."""

    def rec(depth: int, z: int):
        idx = level_offset(depth) + z
        if depth == d_max:
            return [((), (idx,))]
        out = [((), (idx,))]
        c0, c1, c2, c3 = (rec(depth + 1, 4 * z + q) for q in range(4))
        me = (idx,)
        for i0, l0 in c0:
            for i1, l1 in c1:
                for i2, l2 in c2:
                    for i3, l3 in c3:
                        out.append((me + i0 + i1 + i2 + i3,
                                    l0 + l1 + l2 + l3))
        return out

    return rec(0, 0)


def enumerate_models(d_max: int) -> list[QuadtreeModel]:
    """Every full quadtree of depth <= d_max, each exactly once.

    Refuses d_max > 3: the count T(d+1) = 1 + T(d)**4 explodes beyond
    the 83,522 trees of depth 3.
    """
    if d_max < 0:
        raise ValueError("d_max must be nonnegative")
    if d_max > MAX_ENUMERATION_DEPTH:
        raise ValueError(
            f"enumeration is limited to d_max <= {MAX_ENUMERATION_DEPTH}")
    return [QuadtreeModel._from_index_sets(d_max, inner, leaf)
            for inner, leaf in _enumerate_index_sets(d_max)]

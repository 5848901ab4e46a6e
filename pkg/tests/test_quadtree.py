import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadbayes.quadtree import (
    ROOT,
    BlockId,
    HyperParams,
    QuadtreeModel,
    block_contains,
    enumerate_models,
    g_array,
    g_value,
    level_offset,
    model_prior,
    node_count,
    path_nodes,
)


def blk(*pairs):
    return BlockId(tuple(pairs))


class TestBlockId:
    def test_root(self):
        assert ROOT.depth == 0
        assert ROOT.morton == 0
        assert ROOT.index(3) == 0
        assert ROOT.label() == "."

    def test_bad_quadrant(self):
        with pytest.raises(ValueError):
            BlockId(((0, 2),))

    def test_index_layout(self):
        # depth-d level starts at (4**d - 1) / 3
        assert [level_offset(d) for d in range(4)] == [0, 1, 5, 21]
        assert node_count(2) == 21
        assert blk((1, 1)).index(2) == 1 + 3
        assert blk((0, 0), (1, 1)).index(2) == 5 + 3

    def test_from_index_roundtrip(self):
        for i in range(node_count(3)):
            b = BlockId.from_index(i)
            assert b.index(3) == i

    def test_children_are_contiguous(self):
        parent = blk((1, 0))
        kids = [c.index(2) for c in parent.children()]
        z = parent.morton
        assert kids == [5 + 4 * z + q for q in range(4)]
        for c in parent.children():
            assert c.parent() == parent

    def test_geometry(self):
        b = blk((0, 0), (1, 1))
        assert b.side(2) == 1
        assert b.origin(2) == (1, 1)
        assert blk((1, 0)).origin(2) == (2, 0)
        assert blk((1, 0)).side(2) == 2

    def test_depth_guard(self):
        with pytest.raises(ValueError):
            blk((0, 0), (0, 0)).index(1)


class TestBlockContains:
    def test_root_contains_all(self):
        for i in range(4):
            for j in range(4):
                assert block_contains(ROOT, (i, j), 2)

    def test_frozen_examples(self):
        s = blk((0, 0), (1, 1))
        assert block_contains(s, (1, 1), 2) is True
        assert block_contains(s, (0, 0), 2) is False

    def test_out_of_grid(self):
        with pytest.raises(ValueError):
            block_contains(ROOT, (4, 0), 2)
        with pytest.raises(ValueError):
            block_contains(ROOT, (0, -1), 2)

    @given(st.data())
    def test_matches_fraction_inequalities(self, data):
        # direct evaluation of the defining double inequality, in exact
        # rational arithmetic
        d_max = data.draw(st.integers(0, 4), label="d_max")
        depth = data.draw(st.integers(0, d_max), label="depth")
        path = tuple(
            (data.draw(st.integers(0, 1)), data.draw(st.integers(0, 1)))
            for _ in range(depth))
        s = BlockId(path)
        side = 1 << d_max
        i = data.draw(st.integers(0, side - 1), label="row")
        j = data.draw(st.integers(0, side - 1), label="col")

        xlo = sum(Fraction(x, 2 ** k) for k, (x, _) in enumerate(path, 1))
        ylo = sum(Fraction(y, 2 ** k) for k, (_, y) in enumerate(path, 1))
        width = Fraction(1, 2 ** depth)
        expected = (xlo <= Fraction(i, side) < xlo + width
                    and ylo <= Fraction(j, side) < ylo + width)
        assert block_contains(s, (i, j), d_max) == expected


class TestPathNodes:
    def test_single_node_grid(self):
        assert path_nodes(0, 0) == [ROOT]

    def test_frozen_example(self):
        assert path_nodes(0, 2) == [ROOT, blk((0, 0)), blk((0, 0), (0, 0))]

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            path_nodes(16, 2)
        with pytest.raises(ValueError):
            path_nodes(-1, 2)

    @given(st.integers(0, 3), st.data())
    def test_path_properties(self, d_max, data):
        t = data.draw(st.integers(0, (1 << (2 * d_max)) - 1))
        nodes = path_nodes(t, d_max)
        assert len(nodes) == d_max + 1
        width = 1 << d_max
        coord = (t // width, t % width)
        for a, b in zip(nodes, nodes[1:]):
            assert b.parent() == a
        for node in nodes:
            assert block_contains(node, coord, d_max)
        assert nodes[-1].side(d_max) == 1


class TestModelPrior:
    def test_root_only(self):
        assert model_prior(QuadtreeModel(1), HyperParams()) == 0.5

    def test_one_split(self):
        # four singleton leaves have weight zero, so (1 - 0)**4 drops out
        m = QuadtreeModel(1, [ROOT])
        assert model_prior(m, HyperParams()) == 0.5

    @pytest.mark.parametrize("d_max,count", [(0, 1), (1, 2), (2, 17)])
    def test_enumeration_counts(self, d_max, count):
        models = enumerate_models(d_max)
        assert len(models) == count
        assert len(set(models)) == count

    def test_enumeration_guard(self):
        with pytest.raises(ValueError):
            enumerate_models(4)

    @pytest.mark.parametrize("d_max", [0, 1, 2])
    def test_prior_normalizes(self, d_max):
        hp = HyperParams()
        total = math.fsum(model_prior(m, hp) for m in enumerate_models(d_max))
        assert abs(total - 1.0) < 1e-12

    def test_prior_normalizes_random_g(self):
        rng = np.random.default_rng(11)
        g = {BlockId.from_index(i): float(v)
             for i, v in enumerate(rng.random(node_count(2)))}
        hp = HyperParams(g=g)
        total = math.fsum(model_prior(m, hp) for m in enumerate_models(2))
        assert abs(total - 1.0) < 1e-12

    def test_ancestor_product_identity(self):
        # mass of models in which s is a leaf: (1 - g_s) prod(ancestors g)
        rng = np.random.default_rng(5)
        g = {BlockId.from_index(i): float(v)
             for i, v in enumerate(rng.random(node_count(2)))}
        hp = HyperParams(g=g)
        models = enumerate_models(2)
        for i in range(node_count(2)):
            s = BlockId.from_index(i)
            total = math.fsum(model_prior(m, hp) for m in models
                              if i in m.leaf_indices)
            expect = 1.0 - g_value(hp.g, s, 2)
            node = s
            while node.depth:
                node = node.parent()
                expect *= g_value(hp.g, node, 2)
            assert abs(total - expect) < 1e-12


class TestModelStructure:
    @pytest.mark.parametrize("d_max", [0, 1, 2])
    def test_leaves_partition_grid(self, d_max):
        side = 1 << d_max
        for m in enumerate_models(d_max):
            seen = np.zeros((side, side), dtype=int)
            for leaf in m.leaf_blocks():
                r, c = leaf.origin(d_max)
                s = leaf.side(d_max)
                seen[r:r + s, c:c + s] += 1
            assert (seen == 1).all()

    def test_disconnected_inner_rejected(self):
        with pytest.raises(ValueError):
            QuadtreeModel(2, [blk((0, 0))])

    def test_too_deep_inner_rejected(self):
        with pytest.raises(ValueError):
            QuadtreeModel(1, [ROOT, blk((0, 0))])

    def test_equality_by_structure(self):
        assert QuadtreeModel(2, [ROOT]) == QuadtreeModel(2, [ROOT])
        assert QuadtreeModel(2, [ROOT]) != QuadtreeModel(2)


class TestGSpec:
    def test_singleton_forced_zero(self):
        arr = g_array(1, 0.7)
        assert arr[0] == 0.7
        assert (arr[1:] == 0.0).all()
        assert g_value(0.7, blk((0, 1)), 1) == 0.0

    def test_per_depth(self):
        arr = g_array(2, (1.0, 0.25, 0.0))
        assert arr[0] == 1.0
        assert (arr[1:5] == 0.25).all()
        assert (arr[5:] == 0.0).all()

    def test_per_depth_wrong_length(self):
        with pytest.raises(ValueError):
            g_array(2, (1.0, 0.5))

    def test_mapping_with_default(self):
        arr = g_array(1, {ROOT: 0.9})
        assert arr[0] == 0.9

    def test_range_validation(self):
        with pytest.raises(ValueError):
            g_array(1, 1.5)
        with pytest.raises(ValueError):
            HyperParams(alpha=0.0)
        with pytest.raises(ValueError):
            HyperParams(beta=-1.0)
        with pytest.raises(ValueError):
            HyperParams(g=-0.1)

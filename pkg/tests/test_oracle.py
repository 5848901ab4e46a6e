import numpy as np
import pytest

from quadbayes import oracle
from quadbayes.quadtree import (
    BlockId,
    HyperParams,
    enumerate_models,
    model_prior,
    node_count,
)

HP = HyperParams()


class TestBlockMarginal:
    def test_empty_block(self):
        assert oracle.exact_block_marginal([], HP) == 1.0

    def test_single_one(self):
        assert oracle.exact_block_marginal([1], HP) == pytest.approx(0.5)

    def test_two_ones(self):
        # sequential predictives: 0.5 * 0.75
        assert oracle.exact_block_marginal([1, 1], HP) == pytest.approx(
            0.375, abs=1e-15)


class TestMixturePredictive:
    def test_first_pixel_symmetric(self):
        for d_max in (0, 1, 2):
            assert oracle.exact_mixture_predictive([], 1, HP, d_max) == \
                pytest.approx(0.5, abs=1e-12)

    def test_two_model_hand_value(self):
        # d_max=1, one observed 1 at pixel (0,0), predict 1 at (0,1):
        # equal posterior on {root-only, split}; 0.5*0.75 + 0.5*0.5
        assert oracle.exact_mixture_predictive([1], 1, HP, 1) == \
            pytest.approx(0.625, abs=1e-12)

    def test_sums_to_one(self):
        rng = np.random.default_rng(2)
        bits = rng.integers(0, 2, size=9).tolist()
        p0 = oracle.exact_mixture_predictive(bits, 0, HP, 2)
        p1 = oracle.exact_mixture_predictive(bits, 1, HP, 2)
        assert p0 + p1 == pytest.approx(1.0, abs=1e-12)

    def test_depth_guard(self):
        with pytest.raises(ValueError):
            oracle.exact_mixture_predictive([], 1, HP, 3)

    def test_full_prefix_guard(self):
        with pytest.raises(ValueError):
            oracle.exact_mixture_predictive([0] * 4, 1, HP, 1)


class TestPosterior:
    def test_no_data_is_prior(self):
        post = oracle.exact_model_posterior([], HP, 2)
        for m, p in post.items():
            assert p == pytest.approx(model_prior(m, HP), abs=1e-12)

    def test_sums_to_one(self):
        rng = np.random.default_rng(3)
        bits = rng.integers(0, 2, size=16).tolist()
        w = oracle.posterior_weights(bits, HP, 2)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        assert (w > 0).all()

    def test_posterior_orders_match_enumerate_models(self):
        post = oracle.exact_model_posterior([], HP, 2)
        assert list(post.keys()) == enumerate_models(2)


class TestPriorBulk:
    @pytest.mark.parametrize("d_max", [0, 1, 2, 3])
    def test_matches_per_model_products(self, d_max):
        if d_max == 3:
            # spot-check bulk vs direct on a subset; full comparison in
            # the smaller grids
            rng = np.random.default_rng(7)
            w = oracle.prior_weights(d_max, 0.5)
            models = enumerate_models(d_max)
            for i in rng.integers(0, len(models), size=50):
                assert w[i] == pytest.approx(
                    model_prior(models[i], HP), rel=1e-12)
        else:
            w = oracle.prior_weights(d_max, 0.5)
            for i, m in enumerate(enumerate_models(d_max)):
                assert w[i] == pytest.approx(model_prior(m, HP), rel=1e-12)

    def test_leaf_sums_match_direct_accumulation(self):
        rng = np.random.default_rng(8)
        g = {BlockId.from_index(i): float(v)
             for i, v in enumerate(rng.random(node_count(2)))}
        hp = HyperParams(g=g)
        sums = oracle.leaf_prior_sums(2, g)
        models = enumerate_models(2)
        w = oracle.prior_weights(2, g)
        for node in range(node_count(2)):
            direct = sum(w[i] for i, m in enumerate(models)
                         if node in m.leaf_indices)
            assert sums[node] == pytest.approx(direct, abs=1e-12)


def test_exact_map_attains_maximum():
    rng = np.random.default_rng(4)
    bits = rng.integers(0, 2, size=16).tolist()
    m, p = oracle.exact_map(bits, HP, 2)
    w = oracle.posterior_weights(bits, HP, 2)
    assert p == pytest.approx(float(w.max()), abs=0)
    assert oracle.exact_model_posterior(bits, HP, 2)[m] == pytest.approx(p)

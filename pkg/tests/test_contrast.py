"""Encoder, discriminator, loss and gradient behavior."""

import math

import numpy as np
import pytest

from subanom.contrast import (
    ContrastPair,
    ModelParams,
    PairScore,
    batch_step,
    bce_loss,
    discriminate,
    encode_node,
    encode_subgraph,
    gradients,
    init_params,
    sample_pair,
)
from subanom.contrast.network import batch_loss
from subanom.synthetic import make_er_graph, make_gnp_graph
from conftest import build_graph
from oracles import finite_difference_gradients


def identity_params(d):
    return ModelParams(gcn_weight=np.eye(d), bilinear_weight=np.eye(d))


def random_setup(seed, n=20, attr_dim=5, hidden=4, n_pairs=3, size=3):
    rng = np.random.default_rng(seed)
    g = make_gnp_graph(n=n, p=0.2, attr_dim=attr_dim, seed=seed)
    params = init_params(attr_dim, hidden, rng)
    pairs = [
        sample_pair(g, int(rng.integers(n)), size, 0.15, rng) for _ in range(n_pairs)
    ]
    return g, params, pairs, rng


class TestEncoding:
    def test_singleton_unmasked_with_identity_weights(self):
        g = build_graph(3, [(0, 1)], attributes=np.array([[1.0, -2.0], [0.5, 3.0], [0, 0]]))
        params = identity_params(2)
        _, e = encode_subgraph(params, g, [0], mask_anchor=False)
        assert e.tolist() == [1.0, 0.0]

    def test_all_zero_attributes_give_zero_readout(self):
        g = build_graph(3, [(0, 1), (1, 2)], attributes=np.zeros((3, 2)))
        params = identity_params(2)
        _, e = encode_subgraph(params, g, [0, 1, 2], mask_anchor=False)
        assert np.array_equal(e, np.zeros(2))

    def test_masked_singleton_gives_zero_readout(self):
        g = build_graph(2, [(0, 1)], attributes=np.array([[3.0, 4.0], [1.0, 1.0]]))
        _, e = encode_subgraph(identity_params(2), g, [0], mask_anchor=True)
        assert np.array_equal(e, np.zeros(2))

    def test_empty_node_list_rejected(self, triangle_graph):
        with pytest.raises(ValueError):
            encode_subgraph(identity_params(4), triangle_graph, [])

    def test_node_projection_shares_weights_with_subgraph_encoder(self):
        g, params, _, rng = random_setup(0)
        for v in range(g.n):
            z = encode_node(params, g.attributes[v])
            embeddings, e = encode_subgraph(params, g, [v], mask_anchor=False)
            assert np.array_equal(z, embeddings[0])
            assert np.array_equal(z, e)

    def test_identity_weights_reduce_node_projection_to_relu(self):
        x = np.array([1.5, -2.0, 0.0])
        assert encode_node(identity_params(3), x).tolist() == [1.5, 0.0, 0.0]
        assert np.array_equal(encode_node(identity_params(3), np.zeros(3)), np.zeros(3))

    def test_readout_invariant_to_node_order(self):
        g, params, _, rng = random_setup(1)
        nodes = [int(v) for v in rng.choice(g.n, size=5, replace=False)]
        _, e = encode_subgraph(params, g, nodes, mask_anchor=False)
        for _ in range(5):
            perm = [nodes[i] for i in rng.permutation(len(nodes))]
            _, e2 = encode_subgraph(params, g, perm, mask_anchor=False)
            assert np.allclose(e, e2, atol=1e-12)

    def test_masked_readout_invariant_to_tail_order(self):
        g, params, _, rng = random_setup(2)
        nodes = [int(v) for v in rng.choice(g.n, size=5, replace=False)]
        _, e = encode_subgraph(params, g, nodes, mask_anchor=True)
        tail = nodes[1:]
        for _ in range(5):
            perm = [nodes[0]] + [tail[i] for i in rng.permutation(len(tail))]
            _, e2 = encode_subgraph(params, g, perm, mask_anchor=True)
            assert np.allclose(e, e2, atol=1e-12)


class TestDiscriminator:
    def test_identity_bilinear_on_shared_basis_vector(self):
        params = identity_params(3)
        z = np.array([1.0, 0.0, 0.0])
        s = discriminate(params, z, z)
        assert s == pytest.approx(0.7310585786300049, abs=1e-12)

    def test_orthogonal_vectors_score_half(self):
        params = identity_params(2)
        assert discriminate(params, np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.5

    def test_zero_node_embedding_scores_half(self):
        params = identity_params(2)
        assert discriminate(params, np.zeros(2), np.array([3.0, -1.0])) == 0.5

    def test_scores_strictly_inside_unit_interval(self):
        rng = np.random.default_rng(3)
        params = init_params(4, 4, rng)
        for _ in range(50):
            s = discriminate(params, rng.normal(size=4), rng.normal(size=4))
            assert 0.0 < s < 1.0

    def test_extreme_logits_do_not_overflow(self):
        params = identity_params(1)
        big = np.array([1e4])
        assert discriminate(params, big, big) == 1.0  # saturated but finite
        assert discriminate(params, big, -big) == 0.0


class TestLoss:
    def test_uninformative_pair_costs_two_log_two(self):
        loss = bce_loss([PairScore(s_pos=0.5, s_neg=0.5)])
        assert loss == pytest.approx(2 * math.log(2), abs=1e-12)

    def test_half_positive_with_confident_negative(self):
        loss = bce_loss([PairScore(s_pos=0.5, s_neg=1e-12)])
        assert loss == pytest.approx(math.log(2), abs=1e-9)

    def test_perfect_discrimination_limit(self):
        loss = bce_loss([PairScore(s_pos=1 - 1e-12, s_neg=1e-12)])
        assert loss == pytest.approx(0.0, abs=1e-9)

    def test_additive_over_pairs(self):
        a = PairScore(0.7, 0.2)
        b = PairScore(0.6, 0.4)
        assert bce_loss([a, b]) == pytest.approx(bce_loss([a]) + bce_loss([b]), abs=1e-12)


class TestSamplePair:
    def test_anchor_positions_and_negative_anchor_differs(self):
        g = make_gnp_graph(n=25, p=0.2, seed=4)
        rng = np.random.default_rng(9)
        for _ in range(50):
            target = int(rng.integers(g.n))
            pair = sample_pair(g, target, 4, 0.15, rng)
            assert pair.target == target
            assert pair.positive_nodes[0] == target
            assert pair.negative_nodes[0] != target
            assert len(pair.positive_nodes) <= 4
            assert len(pair.negative_nodes) <= 4


class TestGradients:
    def test_zero_gcn_weight_kills_bilinear_gradient(self):
        g, _, pairs, _ = random_setup(5)
        params = ModelParams(
            gcn_weight=np.zeros((g.attr_dim, 4)), bilinear_weight=np.ones((4, 4))
        )
        _, grad_wt = gradients(params, g, pairs)
        assert np.array_equal(grad_wt, np.zeros((4, 4)))

    def test_matches_finite_differences(self):
        for seed in (11, 12, 13):
            g, params, pairs, _ = random_setup(seed)
            grad_w, grad_wt = gradients(params, g, pairs)
            fd_w, fd_wt = finite_difference_gradients(
                lambda p: batch_loss(p, g, pairs), params
            )
            for analytic, numeric in ((grad_w, fd_w), (grad_wt, fd_wt)):
                err = np.abs(analytic - numeric)
                tol = 1e-4 * np.maximum(np.abs(numeric), 1.0) + 1e-8
                assert (err <= tol).all()

    def test_duplicated_batch_doubles_gradients(self):
        g, params, pairs, _ = random_setup(6)
        grad_w, grad_wt = gradients(params, g, pairs)
        grad_w2, grad_wt2 = gradients(params, g, pairs + pairs)
        assert np.allclose(grad_w2, 2 * grad_w, rtol=1e-12, atol=1e-12)
        assert np.allclose(grad_wt2, 2 * grad_wt, rtol=1e-12, atol=1e-12)

    def test_batch_scores_match_slow_path(self):
        g, params, pairs, _ = random_setup(7)
        result = batch_step(params, g, pairs)
        for pair, score in zip(pairs, result.scores):
            z = encode_node(params, g.attributes[pair.target])
            _, e_pos = encode_subgraph(params, g, pair.positive_nodes, mask_anchor=True)
            _, e_neg = encode_subgraph(params, g, pair.negative_nodes, mask_anchor=True)
            assert score.s_pos == pytest.approx(discriminate(params, z, e_pos), rel=1e-10)
            assert score.s_neg == pytest.approx(discriminate(params, z, e_neg), rel=1e-10)
        assert result.loss == pytest.approx(bce_loss(result.scores), rel=1e-9)

    def test_empty_batch_rejected(self):
        g, params, _, _ = random_setup(8)
        with pytest.raises(ValueError):
            batch_step(params, g, [])

    def test_loss_finite_for_wild_but_finite_params(self):
        g, _, pairs, rng = random_setup(9)
        params = ModelParams(
            gcn_weight=rng.normal(size=(g.attr_dim, 4)) * 50,
            bilinear_weight=rng.normal(size=(4, 4)) * 50,
        )
        assert np.isfinite(batch_loss(params, g, pairs))

    def test_manual_pair_construction_accepted(self):
        # Gradients must not depend on pairs coming from the sampler.
        g = make_er_graph(n=10, edge_count=20, attr_dim=3, seed=10)
        params = init_params(3, 2, np.random.default_rng(0))
        pair = ContrastPair(target=0, positive_nodes=(0, 1), negative_nodes=(5, 4))
        grad_w, grad_wt = gradients(params, g, [pair])
        assert grad_w.shape == (3, 2)
        assert grad_wt.shape == (2, 2)
        assert np.isfinite(grad_w).all() and np.isfinite(grad_wt).all()


class TestTraining:
    def make_toy(self, seed=0):
        return make_gnp_graph(n=30, p=0.15, attr_dim=6, seed=seed)

    def test_loss_decreases_on_toy_graph(self):
        from subanom.contrast import TrainConfig, train

        g = self.make_toy()
        cfg = TrainConfig(hidden_dim=8, subgraph_size=3, epochs=50, batch_size=30, seed=1)
        result = train(g, cfg)
        assert len(result.loss_curve) == 50
        assert result.loss_curve[-1] < result.loss_curve[0]
        assert all(np.isfinite(v) for v in result.loss_curve)

    def test_zero_epochs_returns_initial_weights(self):
        from subanom.contrast import TrainConfig, train

        g = self.make_toy(1)
        cfg = TrainConfig(hidden_dim=8, epochs=0, seed=7)
        result = train(g, cfg)
        assert result.loss_curve == []
        expected = init_params(g.attr_dim, 8, np.random.default_rng(7))
        assert np.array_equal(result.params.gcn_weight, expected.gcn_weight)
        assert np.array_equal(result.params.bilinear_weight, expected.bilinear_weight)

    def test_same_seed_reproduces_weights_bitwise(self):
        from subanom.contrast import TrainConfig, train

        g = self.make_toy(2)
        cfg = TrainConfig(hidden_dim=4, epochs=5, batch_size=10, seed=3)
        a = train(g, cfg)
        b = train(g, cfg)
        assert np.array_equal(a.params.gcn_weight, b.params.gcn_weight)
        assert np.array_equal(a.params.bilinear_weight, b.params.bilinear_weight)
        assert a.loss_curve == b.loss_curve

    def test_different_seeds_differ(self):
        from subanom.contrast import TrainConfig, train
        import dataclasses

        g = self.make_toy(3)
        cfg = TrainConfig(hidden_dim=4, epochs=3, batch_size=10, seed=0)
        a = train(g, cfg)
        b = train(g, dataclasses.replace(cfg, seed=1))
        assert not np.array_equal(a.params.gcn_weight, b.params.gcn_weight)

    def test_numeric_blowup_raises_divergence(self):
        from subanom.contrast import TrainConfig, train
        from subanom.errors import DivergenceError

        g = self.make_toy(4)
        hot = g.with_attributes(g.attributes * 1e155)
        cfg = TrainConfig(hidden_dim=4, epochs=2, batch_size=10, seed=0)
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(DivergenceError):
                train(hot, cfg)

    def test_config_validation(self):
        from subanom.contrast import TrainConfig
        from subanom.errors import ConfigError

        with pytest.raises(ConfigError):
            TrainConfig(hidden_dim=0)
        with pytest.raises(ConfigError):
            TrainConfig(subgraph_size=1)
        with pytest.raises(ConfigError):
            TrainConfig(layers=2)
        with pytest.raises(ConfigError):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(ConfigError):
            TrainConfig(epochs=-1)
        with pytest.raises(ConfigError):
            TrainConfig(batch_size=0)
        with pytest.raises(ConfigError):
            TrainConfig(rounds_attr=0)
        with pytest.raises(ConfigError):
            TrainConfig(rwr_restart_prob=1.0)

    def test_checkpoint_round_trip(self, tmp_path):
        from subanom.contrast import TrainConfig, load_checkpoint, save_checkpoint, train

        g = self.make_toy(5)
        cfg = TrainConfig(hidden_dim=4, epochs=2, batch_size=10, seed=9)
        result = train(g, cfg)
        path = tmp_path / "model.json"
        save_checkpoint(path, result.params, cfg)
        params, loaded_cfg = load_checkpoint(path)
        assert np.array_equal(params.gcn_weight, result.params.gcn_weight)
        assert np.array_equal(params.bilinear_weight, result.params.bilinear_weight)
        assert params.attr_dim == g.attr_dim
        assert params.hidden_dim == 4
        assert loaded_cfg == cfg

    def test_malformed_checkpoint_rejected(self, tmp_path):
        from subanom.contrast import load_checkpoint
        from subanom.errors import DataError

        path = tmp_path / "bad.json"
        path.write_text('{"attr_dim": 3}')
        with pytest.raises(DataError):
            load_checkpoint(path)
        path.write_text("not json at all")
        with pytest.raises(DataError):
            load_checkpoint(path)

    def test_embed_all_matches_node_projection(self):
        from subanom.contrast import TrainConfig, embed_all, train

        g = self.make_toy(6)
        result = train(g, TrainConfig(hidden_dim=4, epochs=1, batch_size=10, seed=0))
        table = embed_all(result.params, g)
        assert table.shape == (g.n, 4)
        # BLAS may reassociate the matrix product, so compare to the last ulp
        # rather than bit for bit.
        for v in range(g.n):
            row = encode_node(result.params, g.attributes[v])
            assert np.allclose(table[v], row, rtol=1e-12, atol=1e-14)

    def test_loss_curve_file_format(self, tmp_path):
        from subanom.contrast import write_loss_curve

        path = tmp_path / "curve.csv"
        write_loss_curve(path, [1.25, 0.5])
        lines = path.read_text().splitlines()
        assert lines[0] == "epoch,mean_batch_loss"
        assert lines[1] == "0,1.25"
        assert lines[2] == "1,0.5"

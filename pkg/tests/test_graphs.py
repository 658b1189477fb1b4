import numpy as np
import pytest

from latentgraph.autodiff import finite_difference_check, gumbel_bernoulli, make_rng, ops
from latentgraph.graphs import (
    AdjacencyMatrix,
    EdgeScores,
    read_dense_csv,
    read_edge_list,
    write_dense_csv,
    write_edge_list,
)
from latentgraph.graphs.learners import (
    ConvSpec,
    GdnLearner,
    GtsLearner,
    MtgnnLearner,
    NodePairEmbeddings,
    NriEncoder,
    SeriesEncoder,
    adjacency_to_edge_types,
    cosine_similarity,
    edge_posterior,
    edge_types_to_adjacency,
    er_edge_probability,
    er_random_graph,
    gdn_knn_adjacency,
    gts_edge_probabilities,
    gts_encode_series,
    gts_sample_adjacency,
    mtgnn_adjacency,
    mtgnn_scores,
    nri_encode_window,
)
from latentgraph.nn import MLP


def set_mlp(mlp, weights, biases):
    for layer, w, b in zip(mlp.layers, weights, biases):
        layer.weight.data[...] = w
        layer.bias.data[...] = b


class TestAdjacencyTypes:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            AdjacencyMatrix(np.array([[0.0, -1.0], [0.0, 0.0]]))

    def test_rejects_self_loop_unless_ground_truth(self):
        with pytest.raises(ValueError):
            AdjacencyMatrix(np.eye(2), source="random")
        assert AdjacencyMatrix(np.eye(2), source="ground-truth").n == 2

    def test_edge_scores_finite(self):
        with pytest.raises(ValueError):
            EdgeScores(np.array([[0.0, np.nan], [0.0, 0.0]]), model="gts")

    def test_edge_list_roundtrip(self, tmp_path):
        rng = np.random.default_rng(0)
        w = rng.random((5, 5)) * (rng.random((5, 5)) < 0.4)
        np.fill_diagonal(w, 0.0)
        path = tmp_path / "g.edges"
        write_edge_list(AdjacencyMatrix(w, source="ground-truth"), path)
        back = read_edge_list(path)
        np.testing.assert_array_equal(back.weights, w)
        assert back.source == "ground-truth"

    def test_dense_csv_roundtrip(self, tmp_path):
        s = np.random.default_rng(1).normal(size=(4, 4))
        write_dense_csv(s, tmp_path / "s.csv")
        np.testing.assert_array_equal(read_dense_csv(tmp_path / "s.csv"), s)


class TestMtgnn:
    def test_symmetric_collapse(self):
        e = np.random.default_rng(0).normal(size=(4, 3))
        w = np.random.default_rng(1).normal(size=(3, 3))
        scores, adj = mtgnn_adjacency(NodePairEmbeddings(e1=e, e2=e.copy()), w, w, 2)
        assert np.all(scores.scores == 0) and adj.num_edges == 0

    def test_hand_evaluation(self):
        emb = NodePairEmbeddings(e1=np.array([[1.0], [0.0]]), e2=np.array([[0.0], [1.0]]), saturation=1.0)
        scores, _ = mtgnn_adjacency(emb, np.eye(1), np.eye(1), 1)
        t = np.tanh(1.0)
        np.testing.assert_allclose(scores.scores[0, 1], np.tanh(t * t), atol=1e-12)
        assert abs(scores.scores[0, 1] - 0.5227) < 1e-4
        assert scores.scores[1, 0] == 0.0

    def test_saturated_k_keeps_everything(self):
        rng = np.random.default_rng(2)
        emb = NodePairEmbeddings(e1=rng.normal(size=(5, 4)), e2=rng.normal(size=(5, 4)))
        w1, w2 = rng.normal(size=(4, 4)), rng.normal(size=(4, 4))
        scores, adj = mtgnn_adjacency(emb, w1, w2, 4)
        expected = scores.scores.copy()
        np.fill_diagonal(expected, 0.0)
        np.testing.assert_array_equal(adj.weights, expected)

    @pytest.mark.parametrize("seed", range(5))
    def test_asymmetry_and_row_budget(self, seed):
        rng = np.random.default_rng(seed)
        n, k = 8, 3
        emb = NodePairEmbeddings(e1=rng.normal(size=(n, 4)), e2=rng.normal(size=(n, 4)), saturation=3.0)
        scores, adj = mtgnn_adjacency(emb, rng.normal(size=(4, 4)), rng.normal(size=(4, 4)), k)
        s = scores.scores
        assert np.all(s * s.T == 0)
        assert np.all(adj.row_nonzeros() <= k)
        assert np.all((adj.weights >= 0) & (adj.weights < 1))

    @pytest.mark.parametrize("bad", [0, 5])
    def test_k_out_of_range(self, bad):
        emb = NodePairEmbeddings(e1=np.ones((5, 2)), e2=np.ones((5, 2)))
        with pytest.raises(ValueError):
            mtgnn_adjacency(emb, np.eye(2), np.eye(2), bad)

    def test_nonpositive_alpha(self):
        with pytest.raises(ValueError):
            NodePairEmbeddings(e1=np.ones((2, 1)), e2=np.ones((2, 1)), saturation=0.0)
        with pytest.raises(ValueError):
            mtgnn_scores(np.ones((2, 1)), np.ones((2, 1)), np.eye(1), np.eye(1), -1.0)

    def test_learner_gradients(self):
        learner = MtgnnLearner(5, make_rng(0, "init"), dim=4, k=2)
        _, adj = learner.adjacency()
        mask = (adj.data != 0).astype(float)
        target = np.random.default_rng(3).random((5, 5))

        def loss():
            s = learner.scores()
            return ops.sum(ops.mul(ops.mul(s, mask), target))

        assert finite_difference_check(loss, learner.parameters()) < 1e-4


class TestGdn:
    def test_orthogonal_tie_break(self):
        scores, adj = gdn_knn_adjacency(np.eye(3), 1)
        np.testing.assert_array_equal(scores.scores, np.zeros((3, 3)))
        np.testing.assert_array_equal(adj.weights, [[0, 1, 0], [1, 0, 0], [1, 0, 0]])

    def test_identical_embeddings_index_order(self):
        _, adj = gdn_knn_adjacency(np.ones((4, 2)), 2)
        np.testing.assert_array_equal(adj.weights, [[0, 1, 1, 0], [1, 0, 1, 0], [1, 1, 0, 0], [1, 1, 0, 0]])

    def test_direct_cosine(self):
        v = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        v[1] /= np.sqrt(2)
        scores, adj = gdn_knn_adjacency(v, 1)
        assert abs(scores.scores[0, 1] - 1 / np.sqrt(2)) < 1e-12
        assert adj.weights[0, 1] == 1 and adj.weights[0].sum() == 1

    def test_zero_norm_row(self):
        with pytest.raises(ValueError):
            gdn_knn_adjacency(np.array([[1.0, 0.0], [0.0, 0.0]]), 1)

    @pytest.mark.parametrize("seed", range(5))
    def test_exact_k_and_scale_invariance(self, seed):
        rng = np.random.default_rng(seed)
        v = rng.normal(size=(9, 5))
        _, adj = gdn_knn_adjacency(v, 3)
        assert np.all(adj.row_nonzeros() == 3)
        scaled = v * rng.uniform(0.1, 10.0, size=(9, 1))
        _, adj2 = gdn_knn_adjacency(scaled, 3)
        np.testing.assert_array_equal(adj.weights, adj2.weights)

    def test_cosine_gradients(self):
        learner = GdnLearner(4, make_rng(1, "init"), dim=3, k=2)
        target = np.random.default_rng(0).random((4, 4))
        assert finite_difference_check(lambda: ops.sum(ops.mul(cosine_similarity(learner.v), target)),
                                       learner.parameters()) < 1e-4


class TestGts:
    def test_identical_rows_identical_embeddings(self):
        enc = SeriesEncoder(40, make_rng(0, "init"), dim=6)
        x = np.random.default_rng(0).normal(size=(1, 40))
        h = gts_encode_series(np.vstack([x, x]), enc).data
        np.testing.assert_array_equal(h[0], h[1])

    def test_zero_series_zero_bias(self):
        enc = SeriesEncoder(40, make_rng(0, "init"), dim=6)
        for b in enc.biases:
            b.data[...] = 0
        enc.fc.bias.data[...] = 0
        np.testing.assert_array_equal(gts_encode_series(np.zeros((3, 40)), enc).data, 0)

    def test_identity_parameters(self):
        length = 6
        enc = SeriesEncoder(length, make_rng(0, "init"), dim=length, convs=(ConvSpec(1, 1, 1),))
        enc.kernels[0].data[...] = 1.0
        enc.biases[0].data[...] = 0.0
        enc.fc.weight.data[...] = np.eye(length)
        enc.fc.bias.data[...] = 0.0
        z = np.random.default_rng(4).normal(size=(1, length))
        np.testing.assert_allclose(gts_encode_series(z, enc).data, z, atol=1e-14)

    def test_too_short_series(self):
        with pytest.raises(ValueError):
            SeriesEncoder(5, make_rng(0, "init"))

    def test_zero_mlp_gives_half(self):
        mlp = MLP([4, 1], make_rng(0, "init"))
        set_mlp(mlp, [np.zeros((4, 1))], [np.zeros(1)])
        theta = gts_edge_probabilities(np.random.default_rng(0).normal(size=(3, 2)), mlp)
        np.testing.assert_array_equal(theta.data, 0.5)

    @pytest.mark.parametrize("b,expected", [(50.0, 1.0), (-50.0, 0.0)])
    def test_saturation(self, b, expected):
        mlp = MLP([4, 1], make_rng(0, "init"))
        set_mlp(mlp, [np.zeros((4, 1))], [np.array([b])])
        theta = gts_edge_probabilities(np.ones((3, 2)), mlp).data
        np.testing.assert_allclose(theta, expected, atol=1e-20)

    def test_hand_set_single_layer(self):
        mlp = MLP([2, 1], make_rng(0, "init"))
        set_mlp(mlp, [np.array([[1.0], [-2.0]])], [np.array([0.3])])
        h = np.array([[0.5], [-1.0]])
        theta = gts_edge_probabilities(h, mlp).data
        sig = lambda x: 1 / (1 + np.exp(-x))
        for i in range(2):
            for j in range(2):
                assert abs(theta[i, j] - sig(h[i, 0] - 2 * h[j, 0] + 0.3)) < 1e-14

    def test_certain_and_impossible_edges(self):
        theta = np.array([[0.0, 1.0], [0.0, 0.0]])
        rng = make_rng(0, "gumbel")
        for _ in range(200):
            a = gts_sample_adjacency(theta, rng=rng).data
            np.testing.assert_array_equal(a, [[0, 1], [0, 0]])

    def test_half_probability_frequency(self):
        theta = np.full((2, 2), 0.5)
        rng = make_rng(7, "gumbel")
        hits = sum(gts_sample_adjacency(theta, rng=rng).data[0, 1] for _ in range(10_000))
        assert abs(hits / 10_000 - 0.5) <= 0.02

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            gts_sample_adjacency(np.array([[0.0, 1.5], [0.0, 0.0]]))

    def test_permutation_equivariance(self):
        learner = GtsLearner(40, make_rng(0, "init"), dim=5, hidden=7)
        series = np.random.default_rng(0).normal(size=(5, 40))
        perm = np.array([3, 0, 4, 1, 2])
        theta = learner.probabilities(series).data
        theta_p = learner.probabilities(series[perm]).data
        np.testing.assert_allclose(theta_p, theta[np.ix_(perm, perm)], atol=1e-12)

    def test_gradients_with_frozen_noise(self):
        learner = GtsLearner(40, make_rng(0, "init"), dim=3, hidden=4)
        series = np.random.default_rng(1).normal(size=(3, 40))
        noise = np.random.default_rng(2).logistic(size=(3, 3))
        target = np.random.default_rng(3).normal(size=(3, 3))

        # the hard sample is piecewise constant; its straight-through gradient is the soft one
        def loss():
            a = gumbel_bernoulli(learner.probabilities(series), learner.temperature, hard=False, noise=noise)
            return ops.sum(ops.mul(a, target))

        assert finite_difference_check(loss, learner.parameters()) < 1e-4


def nri_oracle(window, enc):
    """Loop-based evaluation of the four encoder equations."""
    relu = lambda x: np.maximum(x, 0)

    def mlp(m, x):
        for i, layer in enumerate(m.layers):
            x = x @ layer.weight.data + layer.bias.data
            if i < len(m.layers) - 1:
                x = relu(x)
        return x

    n = window.shape[0]
    h1 = [mlp(enc.f_emb, window[j]) for j in range(n)]
    e1 = {(i, j): mlp(enc.f_e1, np.concatenate([h1[i], h1[j]])) for i in range(n) for j in range(n)}
    h2 = [mlp(enc.f_v1, sum(e1[(i, j)] for i in range(n) if i != j)) for j in range(n)]
    out = np.zeros((n, n, enc.edge_types))
    for i in range(n):
        for j in range(n):
            out[i, j] = mlp(enc.f_e2, np.concatenate([h2[i], h2[j]]))
    return out


class TestNri:
    def test_equal_windows_equal_logits(self):
        enc = NriEncoder(6, make_rng(0, "init"), hidden=5)
        logits = nri_encode_window(np.tile(np.arange(6.0), (4, 1)), enc).data
        np.testing.assert_allclose(logits, np.broadcast_to(logits[0, 0], logits.shape), atol=1e-12)

    def test_no_edge_saturation_empty(self):
        enc = NriEncoder(4, make_rng(0, "init"), hidden=3)
        enc.f_e2.layers[-1].weight.data[...] = 0
        enc.f_e2.layers[-1].bias.data[...] = [50.0, -50.0]
        q = edge_posterior(nri_encode_window(np.random.default_rng(0).normal(size=(3, 4)), enc)).data
        hard = np.eye(2)[q.argmax(-1)]
        assert edge_types_to_adjacency(hard).sum() == 0

    def test_manual_oracle(self):
        enc = NriEncoder(4, make_rng(5, "init"), hidden=3)
        w = np.random.default_rng(5).normal(size=(3, 4))
        np.testing.assert_allclose(nri_encode_window(w, enc).data, nri_oracle(w, enc), atol=1e-12)

    def test_batched_matches_single(self):
        enc = NriEncoder(4, make_rng(5, "init"), hidden=3)
        w = np.random.default_rng(6).normal(size=(2, 3, 4))
        batched = nri_encode_window(w, enc).data
        for b in range(2):
            np.testing.assert_allclose(batched[b], nri_encode_window(w[b], enc).data, atol=1e-12)

    def test_posterior_rows_sum_to_one(self):
        enc = NriEncoder(4, make_rng(1, "init"))
        q = edge_posterior(nri_encode_window(np.random.default_rng(0).normal(size=(5, 4)), enc)).data
        np.testing.assert_allclose(q.sum(-1), 1.0, atol=1e-12)

    def test_wrong_window(self):
        with pytest.raises(ValueError):
            nri_encode_window(np.zeros((3, 5)), NriEncoder(4, make_rng(0, "init")))

    def test_permutation_equivariance(self):
        enc = NriEncoder(4, make_rng(2, "init"), hidden=6)
        w = np.random.default_rng(1).normal(size=(5, 4))
        perm = np.array([2, 4, 0, 3, 1])
        a = nri_encode_window(w, enc).data
        b = nri_encode_window(w[perm], enc).data
        np.testing.assert_allclose(b, a[np.ix_(perm, perm)], atol=1e-12)

    def test_edge_type_roundtrip(self):
        adj = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
        np.testing.assert_array_equal(edge_types_to_adjacency(adjacency_to_edge_types(adj)), adj)

    def test_gradients(self):
        enc = NriEncoder(3, make_rng(3, "init"), hidden=4)
        w = np.random.default_rng(3).normal(size=(3, 3))
        target = np.random.default_rng(4).normal(size=(3, 3, 2))
        assert finite_difference_check(lambda: ops.sum(ops.mul(nri_encode_window(w, enc), target)),
                                       enc.parameters()) < 1e-4


class TestRandomGraph:
    def test_probabilities(self):
        assert er_edge_probability(150) == 30 / 149
        assert er_edge_probability(50) == 10 / 49
        assert er_edge_probability(10) == 3 / 9

    def test_expected_edge_count(self):
        rng = make_rng(0, "random-graph")
        counts = [er_random_graph(10, rng).num_edges for _ in range(200)]
        p, m = 3 / 9, 90
        sigma = np.sqrt(m * p * (1 - p) / 200)
        assert abs(np.mean(counts) - 30) <= 3 * sigma

    def test_no_self_loops(self):
        adj = er_random_graph(30, make_rng(1, "random-graph"))
        assert np.all(np.diag(adj.weights) == 0)


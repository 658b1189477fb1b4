"""Learner + forecaster bundles with the graph-source switch."""

from __future__ import annotations

import numpy as np

from ..autodiff import Tensor, gumbel_bernoulli, gumbel_softmax, make_rng, no_grad, ops
from ..forecasting import (Dcrnn, GdnForecaster, JointLstm, MtgnnForecaster, NriDecoder, UnivariateLstms,
                           blocks_for_window, dcrnn_forecast, gdn_forecast, lstm_forecast, lstm_u_forecast, mtgnn_forecast,
                           nri_decode)
from ..graphs.learners import (EMBED_DIM, GdnLearner, GtsLearner, MtgnnLearner, NriEncoder,
                               adjacency_to_edge_types, edge_posterior, er_random_graph,
                               gts_sample_adjacency, nri_encode_window, NO_EDGE)
from ..nn import Module
from .config import ExperimentConfig

EVAL_CHUNK = 256


class ForecastModel(Module):
    """Common surface used by the training loop.

    ``fixed_adj`` is set for the ground-truth, random and none modes; the
    learner is then never built (GDN keeps its embeddings, which the
    forecaster consumes).
    """

    name = ""
    # sampled graphs are hard in the forward pass; False keeps the relaxed sample (used by gradient checks)
    straight_through = True

    def __init__(self, cfg: ExperimentConfig, n: int, fixed_adj: np.ndarray | None):
        self.cfg = cfg
        self.n = n
        self.fixed_adj = fixed_adj

    @property
    def learned(self) -> bool:
        return self.fixed_adj is None

    def forward(self, x: np.ndarray, rng: np.random.Generator | None, training: bool) -> Tensor:
        raise NotImplementedError

    def regularizer(self) -> Tensor | None:
        return None

    def edge_scores(self, val_inputs: np.ndarray) -> np.ndarray | None:
        """Continuous scores used for correlation studies (None for graph-free models)."""
        return None

    def adjacency(self) -> np.ndarray | None:
        """The graph the forecaster uses at evaluation time."""
        return self.fixed_adj

    def predict(self, x: np.ndarray) -> np.ndarray:
        with no_grad():
            outs = [self.forward(x[i:i + EVAL_CHUNK], None, False).data for i in range(0, len(x), EVAL_CHUNK)]
        return np.concatenate(outs, axis=0)


class GtsModel(ForecastModel):
    name = "gts"

    def __init__(self, cfg, n, fixed_adj, rng, train_series: np.ndarray, gt: np.ndarray | None):
        super().__init__(cfg, n, fixed_adj)
        self.train_series = train_series
        self.gt = gt
        if self.learned:
            self.learner = GtsLearner(train_series.shape[1], rng, temperature=cfg.temperature)
        self.forecaster = Dcrnn(cfg.window, rng, horizon=cfg.horizon)
        self._theta: Tensor | None = None

    def theta(self) -> Tensor:
        return self.learner.probabilities(self.train_series)

    def forward(self, x, rng, training):
        if not self.learned:
            adj = self.fixed_adj
        else:
            theta = self.theta()
            self._theta = theta
            if training:
                if self.straight_through:
                    adj = gts_sample_adjacency(theta, self.learner.temperature, rng=rng)
                else:
                    soft = gumbel_bernoulli(theta, self.learner.temperature, hard=False, rng=rng)
                    adj = ops.mul(soft, 1.0 - np.eye(self.n))
            else:
                adj = self._eval_sample(theta.data)
        return dcrnn_forecast(x, adj, self.forecaster)

    def _eval_sample(self, theta: np.ndarray) -> np.ndarray:
        # a hard sample from a fixed stream: same graph on every evaluation of the same theta
        rng = make_rng(self.cfg.seed, "eval-graph")
        return gts_sample_adjacency(theta, self.learner.temperature, rng=rng).data

    def regularizer(self):
        if not (self.learned and self.cfg.gt_weight > 0):
            return None
        if self.gt is None:
            raise ValueError("GT regularization requested without a ground-truth graph")
        off = ~np.eye(self.n, dtype=bool)
        theta = self._theta if self._theta is not None else self.theta()
        bce = ops.binary_cross_entropy(theta[off], (self.gt[off] > 0).astype(np.float64))
        return ops.scale(bce, self.cfg.gt_weight)

    def edge_scores(self, val_inputs):
        if not self.learned:
            return None
        with no_grad():
            return self.theta().data.copy()

    def adjacency(self):
        if not self.learned:
            return self.fixed_adj
        with no_grad():
            return self._eval_sample(self.theta().data)


class MtgnnModel(ForecastModel):
    name = "mtgnn"

    def __init__(self, cfg, n, fixed_adj, rng):
        super().__init__(cfg, n, fixed_adj)
        if self.learned:
            self.learner = MtgnnLearner(n, rng)
        self.forecaster = MtgnnForecaster(cfg.window, rng, blocks=blocks_for_window(cfg.window),
                                          horizon=cfg.horizon)

    def forward(self, x, rng, training):
        adj = self.learner.adjacency()[1] if self.learned else self.fixed_adj
        return mtgnn_forecast(x, adj, self.forecaster)

    def edge_scores(self, val_inputs):
        if not self.learned:
            return None
        with no_grad():
            return self.learner.scores().data.copy()

    def adjacency(self):
        if not self.learned:
            return self.fixed_adj
        with no_grad():
            return self.learner.adjacency()[1].data.copy()


class GdnModel(ForecastModel):
    name = "gdn"

    def __init__(self, cfg, n, fixed_adj, rng):
        super().__init__(cfg, n, fixed_adj)
        self.learner = GdnLearner(n, rng)
        self.forecaster = GdnForecaster(cfg.window, rng, dim=EMBED_DIM, embed_dim=EMBED_DIM,
                                        horizon=cfg.horizon)

    def forward(self, x, rng, training):
        adj = self.learner.adjacency()[1] if self.learned else self.fixed_adj
        return gdn_forecast(x, adj, self.learner.v, self.forecaster)

    def edge_scores(self, val_inputs):
        if not self.learned:
            return None
        with no_grad():
            s = self.learner.scores().data.copy()
        np.fill_diagonal(s, 0.0)
        return s

    def adjacency(self):
        if not self.learned:
            return self.fixed_adj
        with no_grad():
            return self.learner.adjacency()[1]


class NriModel(ForecastModel):
    name = "nri"

    def __init__(self, cfg, n, fixed_adj, rng):
        super().__init__(cfg, n, fixed_adj)
        if self.learned:
            self.encoder = NriEncoder(cfg.window, rng)
        else:
            self._fixed_edges = adjacency_to_edge_types(fixed_adj)
        self.decoder = NriDecoder(cfg.window, rng, horizon=cfg.horizon)
        self._last_val_adj: np.ndarray | None = None

    def forward(self, x, rng, training):
        if not self.learned:
            edges = self._fixed_edges
        else:
            logits = nri_encode_window(x, self.encoder)
            if training:
                edges = gumbel_softmax(logits, self.cfg.temperature, hard=self.straight_through, rng=rng)
            else:
                edges = np.eye(logits.shape[-1])[logits.data.argmax(axis=-1)]
        return nri_decode(x, edges, self.decoder)

    def edge_scores(self, val_inputs):
        """Mean edge probability (1 - q(no edge)) over validation windows."""
        if not self.learned:
            return None
        total = np.zeros((self.n, self.n))
        with no_grad():
            for i in range(0, len(val_inputs), EVAL_CHUNK):
                q = edge_posterior(nri_encode_window(val_inputs[i:i + EVAL_CHUNK], self.encoder)).data
                total += (1.0 - q[..., NO_EDGE]).sum(axis=0)
        scores = total / len(val_inputs)
        np.fill_diagonal(scores, 0.0)
        self._last_val_adj = (scores > 0.5).astype(np.float64)
        return scores

    def adjacency(self):
        if not self.learned:
            return self.fixed_adj
        return self._last_val_adj


class LstmModel(ForecastModel):
    name = "lstm"

    def __init__(self, cfg, n, rng):
        super().__init__(cfg, n, None)
        self.net = JointLstm(n, cfg.window, rng, horizon=cfg.horizon)

    def forward(self, x, rng, training):
        return lstm_forecast(x, self.net)

    def adjacency(self):
        return None


class LstmUModel(ForecastModel):
    name = "lstm-u"

    def __init__(self, cfg, n, rng):
        super().__init__(cfg, n, None)
        self.net = UnivariateLstms(n, cfg.window, rng, horizon=cfg.horizon)

    def forward(self, x, rng, training):
        return lstm_u_forecast(x, self.net)

    def adjacency(self):
        return None


def fixed_graph(cfg: ExperimentConfig, n: int, gt: np.ndarray | None) -> np.ndarray | None:
    """The adjacency injected for non-learned graph sources (None when learning)."""
    if cfg.graph_source == "learned":
        return None
    if cfg.graph_source == "none":
        return np.zeros((n, n))
    if cfg.graph_source == "random":
        return er_random_graph(n, make_rng(cfg.seed, "random-graph")).weights
    if gt is None:
        raise ValueError("graph_source 'ground-truth' needs a ground-truth graph")
    return np.asarray(gt, dtype=np.float64)


def build_model(cfg: ExperimentConfig, n: int, train_series: np.ndarray,
                gt: np.ndarray | None = None) -> ForecastModel:
    rng = make_rng(cfg.seed, "init")
    if cfg.model == "lstm":
        return LstmModel(cfg, n, rng)
    if cfg.model == "lstm-u":
        return LstmUModel(cfg, n, rng)
    adj = fixed_graph(cfg, n, gt)
    if cfg.model == "gts":
        return GtsModel(cfg, n, adj, rng, train_series, gt)
    if cfg.model == "mtgnn":
        return MtgnnModel(cfg, n, adj, rng)
    if cfg.model == "gdn":
        return GdnModel(cfg, n, adj, rng)
    if cfg.model == "nri":
        return NriModel(cfg, n, adj, rng)
    raise ValueError(f"unknown model {cfg.model!r}")

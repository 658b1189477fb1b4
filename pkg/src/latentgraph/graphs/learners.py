"""Graph learners: MTGNN, GDN, GTS and NRI, plus the Erdos-Renyi baseline.

Each scheme exposes a tensor-level function (used inside training so that
gradients reach its parameters) and a Module bundling the parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..autodiff import DEFAULT_TEMPERATURE, Tensor, gumbel_bernoulli, ops
from ..autodiff.tensor import as_tensor
from ..nn import MLP, Linear, Module, param, uniform_init
from .adjacency import AdjacencyMatrix, EdgeScores

EMBED_DIM = 32
NRI_EDGE_TYPES = 2
NO_EDGE = 0


def default_k(n: int) -> int:
    return min(10, n - 1)


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n - 1:
        raise ValueError(f"K must lie in [1, {n - 1}], got {k}")


def topk_mask(scores: np.ndarray, k: int) -> np.ndarray:
    """Largest ``k`` off-diagonal entries per row; lower column index wins ties."""
    return _kernels.topk_mask(scores, k, True)


# -- MTGNN -------------------------------------------------------------------

@dataclass
class NodePairEmbeddings:
    e1: np.ndarray | None = None
    e2: np.ndarray | None = None
    v: np.ndarray | None = None
    saturation: float = 3.0

    def __post_init__(self):
        if self.saturation <= 0:
            raise ValueError("saturation alpha must be positive")
        if self.v is not None and np.any(np.linalg.norm(self.v, axis=1) == 0):
            raise ValueError("GDN embedding rows must be nonzero")


def mtgnn_scores(e1, e2, w1, w2, alpha: float) -> Tensor:
    """ReLU(tanh(alpha (M1 M2^T - M2 M1^T))), M_k = tanh(alpha E_k W_k)."""
    if alpha <= 0:
        raise ValueError("saturation alpha must be positive")
    m1 = ops.tanh(ops.scale(ops.matmul(e1, w1), alpha))
    m2 = ops.tanh(ops.scale(ops.matmul(e2, w2), alpha))
    skew = ops.sub(ops.matmul(m1, ops.transpose(m2)), ops.matmul(m2, ops.transpose(m1)))
    return ops.relu(ops.tanh(ops.scale(skew, alpha)))


def mtgnn_adjacency(emb: NodePairEmbeddings, w1, w2, k: int) -> tuple[EdgeScores, AdjacencyMatrix]:
    n = emb.e1.shape[0]
    _check_k(k, n)
    s = mtgnn_scores(emb.e1, emb.e2, w1, w2, emb.saturation).data
    adj = np.where(topk_mask(s, k), s, 0.0)
    np.fill_diagonal(adj, 0.0)
    return EdgeScores(s, model="mtgnn"), AdjacencyMatrix(adj, directed=True, source="learned-mtgnn")


class MtgnnLearner(Module):
    def __init__(self, n: int, rng: np.random.Generator, dim: int = EMBED_DIM,
                 k: int | None = None, saturation: float = 3.0):
        self.e1 = param(rng.normal(size=(n, dim)))
        self.e2 = param(rng.normal(size=(n, dim)))
        self.w1 = uniform_init(rng, (dim, dim), dim)
        self.w2 = uniform_init(rng, (dim, dim), dim)
        self.k = default_k(n) if k is None else k
        self.saturation = saturation
        _check_k(self.k, n)

    def scores(self) -> Tensor:
        return mtgnn_scores(self.e1, self.e2, self.w1, self.w2, self.saturation)

    def adjacency(self) -> tuple[Tensor, Tensor]:
        """(scores, sparsified adjacency); top-K acts as a constant mask."""
        s = self.scores()
        return s, ops.mul(s, topk_mask(s.data, self.k).astype(np.float64))


# -- GDN ---------------------------------------------------------------------

def cosine_similarity(v) -> Tensor:
    v = as_tensor(v)
    if np.any(np.linalg.norm(v.data, axis=1) == 0):
        raise ValueError("zero-norm embedding row")
    norms = ops.sqrt(ops.sum(ops.mul(v, v), axis=1, keepdims=True))
    unit = ops.mul(v, ops.reciprocal(norms))
    return ops.matmul(unit, ops.transpose(unit))


def gdn_knn_adjacency(v: np.ndarray, k: int) -> tuple[EdgeScores, AdjacencyMatrix]:
    v = np.asarray(v, dtype=np.float64)
    n = v.shape[0]
    _check_k(k, n)
    s = cosine_similarity(v).data
    np.fill_diagonal(s, 0.0)
    adj = topk_mask(s, k).astype(np.float64)
    return EdgeScores(s, model="gdn"), AdjacencyMatrix(adj, directed=True, source="learned-gdn")


class GdnLearner(Module):
    def __init__(self, n: int, rng: np.random.Generator, dim: int = EMBED_DIM, k: int | None = None):
        self.v = param(rng.normal(size=(n, dim)))
        self.k = default_k(n) if k is None else k
        _check_k(self.k, n)

    def scores(self) -> Tensor:
        return cosine_similarity(self.v)

    def adjacency(self) -> tuple[Tensor, np.ndarray]:
        s = self.scores()
        return s, topk_mask(s.data, self.k).astype(np.float64)


# -- GTS ---------------------------------------------------------------------

@dataclass
class ConvSpec:
    channels: int
    kernel: int
    stride: int


GTS_CONV_STACK = (ConvSpec(8, 8, 4), ConvSpec(16, 8, 4))


class SeriesEncoder(Module):
    """Shared conv1d stack + FC mapping a whole training series to ``h_i``."""

    def __init__(self, series_length: int, rng: np.random.Generator, dim: int = EMBED_DIM,
                 convs: tuple[ConvSpec, ...] = GTS_CONV_STACK):
        self.strides = [c.stride for c in convs]
        self.kernels = []
        self.biases = []
        length, cin = series_length, 1
        for c in convs:
            if length < c.kernel:
                raise ValueError(f"series of length {series_length} shorter than the encoder receptive field")
            self.kernels.append(uniform_init(rng, (c.channels, cin, c.kernel), cin * c.kernel))
            self.biases.append(uniform_init(rng, (c.channels,), cin * c.kernel))
            length = (length - c.kernel) // c.stride + 1
            cin = c.channels
        self.series_length = series_length
        self.fc = Linear(cin * length, dim, rng)

    def __call__(self, series) -> Tensor:
        return gts_encode_series(series, self)


def gts_encode_series(series, enc: SeriesEncoder) -> Tensor:
    """h_i = FC(Vec(conv(z_i))) for every row of ``series`` (N x T_train)."""
    series = as_tensor(series)
    if series.shape[1] != enc.series_length:
        raise ValueError(f"encoder built for length {enc.series_length}, got {series.shape[1]}")
    x = ops.reshape(series, (series.shape[0], 1, series.shape[1]))
    last = len(enc.kernels) - 1
    for i, (w, b, s) in enumerate(zip(enc.kernels, enc.biases, enc.strides)):
        x = ops.conv1d(x, w, b, stride=s)
        if i < last:
            x = ops.relu(x)
    flat = ops.reshape(x, (x.shape[0], -1))
    return enc.fc(flat)


def gts_edge_probabilities(h, pair_mlp: MLP) -> Tensor:
    """theta_ij = sigmoid(g([h_i || h_j]))."""
    logits = pair_mlp.pairwise(as_tensor(h))
    return ops.sigmoid(ops.reshape(logits, logits.shape[:-1]))


def gts_sample_adjacency(theta, temperature: float = DEFAULT_TEMPERATURE,
                         rng: np.random.Generator | None = None, noise: np.ndarray | None = None) -> Tensor:
    """Straight-through Gumbel-Bernoulli sample of theta with a zero diagonal."""
    theta = as_tensor(theta)
    if np.any(theta.data < 0) or np.any(theta.data > 1):
        raise ValueError("edge probabilities must lie in [0, 1]")
    sample = gumbel_bernoulli(theta, temperature, hard=True, rng=rng, noise=noise)
    return ops.mul(sample, 1.0 - np.eye(theta.shape[-1]))


class GtsLearner(Module):
    def __init__(self, series_length: int, rng: np.random.Generator, dim: int = EMBED_DIM,
                 hidden: int = EMBED_DIM, temperature: float = DEFAULT_TEMPERATURE):
        self.encoder = SeriesEncoder(series_length, rng, dim)
        self.pair_mlp = MLP([2 * dim, hidden, 1], rng)
        self.temperature = temperature

    def probabilities(self, train_series) -> Tensor:
        return gts_edge_probabilities(gts_encode_series(train_series, self.encoder), self.pair_mlp)


# -- NRI ---------------------------------------------------------------------

class NriEncoder(Module):
    """Two rounds of node->edge->node message passing producing edge-type logits."""

    def __init__(self, window: int, rng: np.random.Generator, hidden: int = EMBED_DIM,
                 edge_types: int = NRI_EDGE_TYPES):
        if edge_types < 2:
            raise ValueError("NRI needs at least two edge types")
        self.window = window
        self.edge_types = edge_types
        self.f_emb = MLP([window, hidden, hidden], rng)
        self.f_e1 = MLP([2 * hidden, hidden, hidden], rng)
        self.f_v1 = MLP([hidden, hidden, hidden], rng)
        self.f_e2 = MLP([2 * hidden, hidden, edge_types], rng)


def nri_encode_window(window, enc: NriEncoder) -> Tensor:
    """Edge-type logits ``(..., N, N, E)``; entry [i, j] is the edge i -> j.

    ``window`` is ``(N, w)`` or batched ``(B, N, w)``.
    """
    window = as_tensor(window)
    if window.shape[-1] != enc.window:
        raise ValueError(f"window length {window.shape[-1]} != configured {enc.window}")
    n = window.shape[-2]
    h1 = enc.f_emb(window)                                   # (..., N, H)
    e1 = enc.f_e1.pairwise(h1)                               # (..., N, N, H)
    off = (1.0 - np.eye(n))[..., None]
    incoming = ops.sum(ops.mul(e1, off), axis=-3)            # sum over senders i != j
    h2 = enc.f_v1(incoming)
    return enc.f_e2.pairwise(h2)


def edge_posterior(logits) -> Tensor:
    return ops.softmax(logits, axis=-1)


def edge_types_to_adjacency(onehot: np.ndarray) -> np.ndarray:
    adj = 1.0 - np.asarray(onehot)[..., NO_EDGE]
    n = adj.shape[-1]
    return adj * (1.0 - np.eye(n))


def adjacency_to_edge_types(adj: np.ndarray, edge_types: int = NRI_EDGE_TYPES) -> np.ndarray:
    """Edge type 1 wherever ``adj > 0`` (off-diagonal), else no-edge."""
    adj = np.asarray(adj)
    n = adj.shape[-1]
    present = (adj > 0) & ~np.eye(n, dtype=bool)
    out = np.zeros(adj.shape + (edge_types,))
    out[..., NO_EDGE] = ~present
    out[..., 1] = present
    return out


# -- random baseline -------------------------------------------------------------

def expected_degree(n: int) -> int:
    if n >= 100:
        return 30
    if n >= 20:
        return 10
    return 3


def er_edge_probability(n: int) -> float:
    return min(1.0, expected_degree(n) / (n - 1))


def er_random_graph(n: int, rng: np.random.Generator) -> AdjacencyMatrix:
    """Directed Erdos-Renyi graph without self-loops."""
    if n < 2:
        raise ValueError("need at least two nodes")
    p = er_edge_probability(n)
    adj = (rng.random((n, n)) < p).astype(np.float64)
    np.fill_diagonal(adj, 0.0)
    return AdjacencyMatrix(adj, directed=True, source="random")

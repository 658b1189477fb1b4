"""Graph-attention forecaster driven by node embeddings."""

from __future__ import annotations

import numpy as np

from ..autodiff import Tensor, ops
from ..autodiff.tensor import as_tensor
from ..nn import MLP, Module, uniform_init
from .batch import HORIZON

HIDDEN = 32
_MASKED = -1e9


class GdnForecaster(Module):
    """Attention over ``N(i) + {i}`` followed by a node-wise output MLP.

    The embedding table ``v`` belongs to the GDN graph learner; it is passed
    in at call time so the learner and forecaster share one parameter.
    """

    def __init__(self, window: int, rng: np.random.Generator, dim: int = HIDDEN,
                 embed_dim: int = HIDDEN, horizon: int = HORIZON, mlp_hidden: int = HIDDEN):
        if embed_dim != dim:
            raise ValueError("v_i * h_i needs embedding dim == hidden dim")
        self.window = window
        self.dim = dim
        self.w = uniform_init(rng, (window, dim), window)
        self.a = uniform_init(rng, (4 * dim,), 4 * dim)
        self.head = MLP([dim, mlp_hidden, horizon], rng)


def gdn_attention(window, adj: np.ndarray, v, model: GdnForecaster) -> tuple[Tensor, Tensor]:
    """Return (attention weights ``(..., N, N)``, node states ``h``).

    ``alpha[i, j] = softmax_j LeakyReLU(a^T [g_i || g_j])`` over neighbours
    ``j`` with ``adj[i, j] > 0`` plus ``i`` itself, ``g_i = [v_i || W z_i]``.
    """
    window, v = as_tensor(window), as_tensor(v)
    if window.shape[-1] != model.window:
        raise ValueError(f"window length {window.shape[-1]} != configured {model.window}")
    n = window.shape[-2]
    wz = ops.matmul(window, model.w)                                    # (..., N, d)
    d_v = v.shape[-1]
    if d_v != model.dim:
        raise ValueError(f"embedding dim {d_v} != {model.dim}")
    a = model.a
    a_src_v, a_src_z = a[:d_v], a[d_v:d_v + model.dim]
    a_dst_v, a_dst_z = a[d_v + model.dim:2 * d_v + model.dim], a[2 * d_v + model.dim:]
    s_i = ops.add(ops.matmul(v, ops.reshape(a_src_v, (-1, 1))), ops.matmul(wz, ops.reshape(a_src_z, (-1, 1))))
    s_j = ops.add(ops.matmul(v, ops.reshape(a_dst_v, (-1, 1))), ops.matmul(wz, ops.reshape(a_dst_z, (-1, 1))))
    logits = ops.leaky_relu(ops.add(s_i, ops.transpose(s_j)))          # (..., N, N)
    allowed = (np.asarray(adj) > 0) | np.eye(n, dtype=bool)
    alpha = ops.softmax(ops.add(logits, np.where(allowed, 0.0, _MASKED)), axis=-1)
    h = ops.relu(ops.matmul(alpha, wz))
    return alpha, h


def gdn_forecast(window, adj: np.ndarray, v, model: GdnForecaster) -> Tensor:
    """``(..., N, horizon)`` from ``f_MLP(v_i * h_i)`` applied to every node."""
    _, h = gdn_attention(window, adj, v, model)
    return model.head(ops.mul(as_tensor(v), h))

"""Diffusion-convolutional GRU encoder-decoder."""

from __future__ import annotations

import numpy as np

from ..autodiff import Tensor, ops
from ..autodiff.tensor import as_tensor
from ..nn import Linear, Module, param, uniform_init
from .batch import HORIZON

DIFFUSION_ORDER = 2
HIDDEN = 32


def transition_matrices(adj) -> tuple[Tensor, Tensor]:
    """Forward and reverse random-walk matrices of ``adj``.

    ``out[i, j] = A_ij / outdeg(i)`` and ``rev[j, i] = A_ij / indeg(j)``,
    with 1/0 taken as 0 so isolated nodes diffuse nothing.  ``adj`` may carry
    leading batch dimensions.
    """
    adj = as_tensor(adj)
    if np.any(adj.data < 0):
        raise ValueError("adjacency has negative entries")
    out_deg = ops.sum(adj, axis=-1, keepdims=True)
    fwd = ops.mul(adj, ops.reciprocal(out_deg))
    adj_t = ops.transpose(adj)
    in_deg = ops.sum(adj_t, axis=-1, keepdims=True)
    rev = ops.mul(adj_t, ops.reciprocal(in_deg))
    return fwd, rev


def diffusion_features(z, supports: tuple[Tensor, Tensor], order: int = DIFFUSION_ORDER) -> Tensor:
    """Concatenate ``P^k Z`` for k = 1..order over both supports along the last axis."""
    z = as_tensor(z)
    feats = []
    for p in supports:
        x = z
        for _ in range(order):
            x = ops.matmul(p, x)
            feats.append(x)
    return ops.concat(feats, axis=-1)


def graph_diffusion_conv(z, adj, w_out, w_in, order: int | None = None) -> Tensor:
    """sum_k (D_O^-1 A)^k Z W_O[k] + (D_I^-1 A^T)^k Z W_I[k].

    ``w_out`` and ``w_in`` are sequences of ``order`` weight matrices.
    """
    order = len(w_out) if order is None else order
    if order < 1 or len(w_out) != order or len(w_in) != order:
        raise ValueError("need one forward and one reverse weight per diffusion step")
    feats = diffusion_features(z, transition_matrices(adj), order)
    weight = ops.concat([as_tensor(w) for w in list(w_out) + list(w_in)], axis=0)
    return ops.matmul(feats, weight)


class DcgruCell(Module):
    """GRU cell whose gate transforms are diffusion convolutions.

    The reset and update gates share one stacked weight (their columns are
    independent), the candidate has its own.
    """

    def __init__(self, n_in: int, hidden: int, rng: np.random.Generator, order: int = DIFFUSION_ORDER):
        width = 2 * order * (n_in + hidden)
        self.w_gates = uniform_init(rng, (width, 2 * hidden), width)
        self.b_gates = param(np.ones(2 * hidden))
        self.w_cand = uniform_init(rng, (width, hidden), width)
        self.b_cand = param(np.zeros(hidden))
        self.hidden = hidden
        self.order = order

    def __call__(self, z, h, supports) -> Tensor:
        return dcrnn_step(z, h, supports, self)


def dcrnn_step(z, h_prev, supports, cell: DcgruCell) -> Tensor:
    """One DCGRU update for all nodes at once.

    R = sigma(GNN_R([Z||H]) + b_R), U = sigma(GNN_U([Z||H]) + b_U),
    C = tanh(GNN_C([Z||R*H]) + b_C), H' = U*H + (1-U)*C.
    """
    z, h_prev = as_tensor(z), as_tensor(h_prev)
    hs = cell.hidden
    x = ops.concat([z, h_prev], axis=-1)
    gates = ops.sigmoid(ops.add(ops.matmul(diffusion_features(x, supports, cell.order), cell.w_gates),
                                cell.b_gates))
    r = gates[..., :hs]
    u = gates[..., hs:]
    xc = ops.concat([z, ops.mul(r, h_prev)], axis=-1)
    c = ops.tanh(ops.add(ops.matmul(diffusion_features(xc, supports, cell.order), cell.w_cand),
                         cell.b_cand))
    return ops.add(ops.mul(u, h_prev), ops.mul(ops.sub(1.0, u), c))


class Dcrnn(Module):
    """Encoder consumes the window; decoder feeds back its own predictions."""

    def __init__(self, window: int, rng: np.random.Generator, hidden: int = HIDDEN,
                 horizon: int = HORIZON, order: int = DIFFUSION_ORDER):
        self.window = window
        self.horizon = horizon
        self.encoder = DcgruCell(1, hidden, rng, order)
        self.decoder = DcgruCell(1, hidden, rng, order)
        self.head = Linear(hidden, 1, rng)

    def __call__(self, window, adj) -> Tensor:
        return dcrnn_forecast(window, adj, self)


def dcrnn_forecast(window, adj, model: Dcrnn, horizon: int | None = None) -> Tensor:
    """Forecast ``(..., N, horizon)`` from a ``(..., N, w)`` window."""
    window = as_tensor(window)
    if window.shape[-1] != model.window:
        raise ValueError(f"window length {window.shape[-1]} != configured {model.window}")
    horizon = model.horizon if horizon is None else horizon
    supports = transition_matrices(adj)
    lead = window.shape[:-1]
    h = Tensor(np.zeros(lead + (model.encoder.hidden,)))
    for t in range(model.window):
        h = model.encoder(window[..., t:t + 1], h, supports)
    y = window[..., -1:]
    outputs = []
    for _ in range(horizon):
        h = model.decoder(y, h, supports)
        y = model.head(h)
        outputs.append(y)
    return ops.concat(outputs, axis=-1)

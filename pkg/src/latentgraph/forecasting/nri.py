"""NRI MLP decoder: per-edge-type message passing with autoregressive rollout."""

from __future__ import annotations

import numpy as np

from ..autodiff import Tensor, ops
from ..autodiff.tensor import as_tensor
from ..nn import MLP, Module
from .batch import HORIZON

HIDDEN = 32


class NriDecoder(Module):
    """One message MLP per edge type; type 0 ("no edge") has none and sends nothing."""

    def __init__(self, window: int, rng: np.random.Generator, edge_types: int = 2,
                 hidden: int = HIDDEN, horizon: int = HORIZON):
        self.window = window
        self.edge_types = edge_types
        self.horizon = horizon
        self.messages = [MLP([2 * window, hidden, hidden], rng) for _ in range(edge_types - 1)]
        self.node = MLP([window + hidden, hidden, 1], rng)


def _check_onehot(edges: np.ndarray, edge_types: int) -> None:
    if edges.shape[-1] != edge_types:
        raise ValueError(f"expected {edge_types} edge types, got {edges.shape[-1]}")
    if not np.allclose(edges.sum(axis=-1), 1.0):
        raise ValueError("edge-type rows must sum to 1")


def _messages(state: Tensor, edges, model: NriDecoder, off: np.ndarray) -> Tensor:
    """Sum over senders i of sum_e onehot[i, j, e] * MLP_e([x_i || x_j])."""
    total = None
    for e, mlp in enumerate(model.messages, start=1):
        m = mlp.pairwise(state)                                      # (..., N, N, H)
        weight = ops.mul(edges[..., e:e + 1], off)
        term = ops.sum(ops.mul(m, weight), axis=-3)
        total = term if total is None else ops.add(total, term)
    return total


def nri_decode(window, edge_onehots, model: NriDecoder, horizon: int | None = None) -> Tensor:
    """Forecast ``(..., N, horizon)``; each step predicts a delta on the last value.

    ``edge_onehots[..., i, j, :]`` types the edge i -> j; node j aggregates its
    incoming edges.  The state is the trailing ``w`` values, shifted as
    predictions are appended.
    """
    window = as_tensor(window)
    edges = as_tensor(edge_onehots)
    if window.shape[-1] != model.window:
        raise ValueError(f"window length {window.shape[-1]} != configured {model.window}")
    _check_onehot(edges.data, model.edge_types)
    horizon = model.horizon if horizon is None else horizon
    n = window.shape[-2]
    off = (1.0 - np.eye(n))[..., None]
    state = window
    preds = []
    for _ in range(horizon):
        agg = _messages(state, edges, model, off)
        delta = model.node(ops.concat([state, agg], axis=-1))
        y = ops.add(state[..., -1:], delta)
        preds.append(y)
        state = ops.concat([state[..., 1:], y], axis=-1)
    return ops.concat(preds, axis=-1)

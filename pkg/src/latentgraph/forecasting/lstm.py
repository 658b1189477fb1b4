"""LSTM baselines: one joint LSTM over all series, and N independent LSTMs."""

from __future__ import annotations

import numpy as np

from ..autodiff import Tensor, ops
from ..autodiff.tensor import as_tensor
from ..nn import Linear, Module, param, uniform_init
from .batch import HORIZON

HIDDEN = 64


def _lstm_update(gates: Tensor, c: Tensor, hidden: int) -> tuple[Tensor, Tensor]:
    i = ops.sigmoid(gates[..., :hidden])
    f = ops.sigmoid(gates[..., hidden:2 * hidden])
    g = ops.tanh(gates[..., 2 * hidden:3 * hidden])
    o = ops.sigmoid(gates[..., 3 * hidden:])
    c = ops.add(ops.mul(f, c), ops.mul(i, g))
    return ops.mul(o, ops.tanh(c)), c


class JointLstm(Module):
    """Reads the N-vector of all series per step; linear head back to N."""

    def __init__(self, n: int, window: int, rng: np.random.Generator, hidden: int = HIDDEN,
                 horizon: int = HORIZON):
        self.n = n
        self.window = window
        self.hidden = hidden
        self.horizon = horizon
        self.w_x = uniform_init(rng, (n, 4 * hidden), hidden)
        self.w_h = uniform_init(rng, (hidden, 4 * hidden), hidden)
        self.b = param(np.zeros(4 * hidden))
        self.head = Linear(hidden, n, rng)


def lstm_forecast(window, model: JointLstm) -> Tensor:
    """``(B, N, w)`` or ``(N, w)`` -> matching ``(..., N, horizon)``."""
    window = as_tensor(window)
    squeeze = window.ndim == 2
    if squeeze:
        window = ops.reshape(window, (1,) + window.shape)
    b, n, w = window.shape
    if n != model.n or w != model.window:
        raise ValueError(f"expected (B, {model.n}, {model.window}) windows, got {window.shape}")
    seq = ops.transpose(window, (0, 2, 1))                               # (B, w, N)
    h = Tensor(np.zeros((b, model.hidden)))
    c = Tensor(np.zeros((b, model.hidden)))

    def step(x, h, c):
        gates = ops.add(ops.add(ops.matmul(x, model.w_x), ops.matmul(h, model.w_h)), model.b)
        return _lstm_update(gates, c, model.hidden)

    for t in range(w):
        h, c = step(seq[:, t, :], h, c)
    y = seq[:, -1, :]
    outs = []
    for _ in range(model.horizon):
        h, c = step(y, h, c)
        y = model.head(h)
        outs.append(y)
    out = ops.stack(outs, axis=-1)                                      # (B, N, horizon)
    return ops.reshape(out, out.shape[1:]) if squeeze else out


class UnivariateLstms(Module):
    """N LSTMs with separate weights, stored stacked along a leading node axis."""

    def __init__(self, n: int, window: int, rng: np.random.Generator, hidden: int = HIDDEN,
                 horizon: int = HORIZON):
        self.n = n
        self.window = window
        self.hidden = hidden
        self.horizon = horizon
        self.w_x = uniform_init(rng, (n, 1, 4 * hidden), hidden)
        self.w_h = uniform_init(rng, (n, hidden, 4 * hidden), hidden)
        self.b = param(np.zeros((n, 1, 4 * hidden)))
        self.w_out = uniform_init(rng, (n, hidden, 1), hidden)
        self.b_out = param(np.zeros((n, 1, 1)))


def lstm_u_forecast(window, model: UnivariateLstms) -> Tensor:
    """Series i's forecast depends only on series i's window."""
    window = as_tensor(window)
    squeeze = window.ndim == 2
    if squeeze:
        window = ops.reshape(window, (1,) + window.shape)
    b, n, w = window.shape
    if n != model.n or w != model.window:
        raise ValueError(f"expected (B, {model.n}, {model.window}) windows, got {window.shape}")
    seq = ops.transpose(window, (1, 2, 0))                               # (N, w, B)
    h = Tensor(np.zeros((n, b, model.hidden)))
    c = Tensor(np.zeros((n, b, model.hidden)))

    def step(x, h, c):                                                  # x: (N, B, 1)
        gates = ops.add(ops.add(ops.matmul(x, model.w_x), ops.matmul(h, model.w_h)), model.b)
        return _lstm_update(gates, c, model.hidden)

    for t in range(w):
        h, c = step(ops.reshape(seq[:, t, :], (n, b, 1)), h, c)
    y = ops.reshape(seq[:, -1, :], (n, b, 1))
    outs = []
    for _ in range(model.horizon):
        h, c = step(y, h, c)
        y = ops.add(ops.matmul(h, model.w_out), model.b_out)
        outs.append(y)
    out = ops.transpose(ops.concat(outs, axis=-1), (1, 0, 2))            # (B, N, horizon)
    return ops.reshape(out, out.shape[1:]) if squeeze else out

"""MTGNN-style forecaster: inception temporal convs interleaved with graph convs."""

from __future__ import annotations

import numpy as np

from ..autodiff import Tensor, ops
from ..autodiff.tensor import as_tensor
from ..nn import Linear, Module, uniform_init
from .batch import HORIZON
from .dcrnn import transition_matrices

CHANNELS = 16
KERNELS = (2, 3, 5)
BLOCKS = 3


def _split_channels(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def receptive_field(kernels=KERNELS, blocks: int = BLOCKS) -> int:
    return 1 + blocks * (max(kernels) - 1)


class MtgnnBlock(Module):
    def __init__(self, channels: int, kernels, rng: np.random.Generator):
        self.kernels = tuple(kernels)
        self.branch_w = []
        self.branch_b = []
        for k, c in zip(self.kernels, _split_channels(channels, len(self.kernels))):
            self.branch_w.append(uniform_init(rng, (c, channels, k), channels * k))
            self.branch_b.append(uniform_init(rng, (c,), channels * k))
        self.graph_w = uniform_init(rng, (channels, channels), channels)


def blocks_for_window(window: int, kernels=KERNELS, blocks: int = BLOCKS) -> int:
    """Most blocks (up to ``blocks``) whose receptive field fits in ``window``."""
    fit = (window - 1) // (max(kernels) - 1)
    if fit < 1:
        raise ValueError(f"window {window} shorter than one block's receptive field {max(kernels)}")
    return min(blocks, fit)


class MtgnnForecaster(Module):
    def __init__(self, window: int, rng: np.random.Generator, channels: int = CHANNELS,
                 kernels=KERNELS, blocks: int = BLOCKS, horizon: int = HORIZON):
        if window < receptive_field(kernels, blocks):
            raise ValueError(f"window {window} shorter than receptive field {receptive_field(kernels, blocks)}")
        self.window = window
        self.channels = channels
        self.start = Linear(1, channels, rng)
        self.blocks = [MtgnnBlock(channels, kernels, rng) for _ in range(blocks)]
        self.head = Linear(channels, horizon, rng)


def _inception(x: Tensor, block: MtgnnBlock) -> Tensor:
    """x: (M, C, L) -> (M, C, L - max(k) + 1); branch outputs right-aligned."""
    out_len = x.shape[2] - max(block.kernels) + 1
    parts = []
    for w, b in zip(block.branch_w, block.branch_b):
        y = ops.conv1d(x, w, b)
        parts.append(y[:, :, y.shape[2] - out_len:])
    return ops.tanh(ops.concat(parts, axis=1))


def mtgnn_forecast(window, adj, model: MtgnnForecaster) -> Tensor:
    """Forecast ``(B, N, horizon)`` from windows ``(B, N, w)`` (or ``(N, w)``)."""
    window = as_tensor(window)
    squeeze = window.ndim == 2
    if squeeze:
        window = ops.reshape(window, (1,) + window.shape)
    b, n, w = window.shape
    if w != model.window:
        raise ValueError(f"window length {w} != configured {model.window}")
    fwd, _ = transition_matrices(adj)
    c = model.channels
    x = model.start(ops.reshape(window, (b, n, w, 1)))                  # (B, N, L, C)
    for block in model.blocks:
        length = x.shape[2]
        conv_in = ops.reshape(ops.transpose(x, (0, 1, 3, 2)), (b * n, c, length))
        t = _inception(conv_in, block)                                  # (B*N, C, L')
        new_len = t.shape[2]
        t = ops.transpose(ops.reshape(t, (b, n, c, new_len)), (0, 1, 3, 2))   # (B, N, L', C)
        mixed = ops.matmul(fwd, ops.reshape(t, (b, n, new_len * c)))
        g = ops.add(t, ops.matmul(ops.reshape(mixed, (b, n, new_len, c)), block.graph_w))
        x = ops.add(g, x[:, :, length - new_len:, :])
    out = model.head(x[:, :, -1, :])
    return ops.reshape(out, out.shape[1:]) if squeeze else out

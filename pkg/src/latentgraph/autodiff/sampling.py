"""Counter-based RNG streams and Gumbel relaxations."""

from __future__ import annotations

import zlib

import numpy as np

from . import ops
from .tensor import Tensor, as_tensor

DEFAULT_TEMPERATURE = 0.5
_PROB_EPS = 1e-12


def make_rng(seed: int, stream: str | int = 0) -> np.random.Generator:
    """Independent Philox stream keyed by ``(seed, stream)``.

    String stream names hash to a stable integer, so ``make_rng(3, "gumbel")``
    yields the same draws in every process.
    """
    key = zlib.crc32(stream.encode()) if isinstance(stream, str) else int(stream)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), key])))


def gumbel_noise(shape, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(shape)
    return -np.log(-np.log(np.clip(u, 1e-300, 1.0 - 1e-16)))


def logistic_noise(shape, rng: np.random.Generator) -> np.ndarray:
    u = np.clip(rng.random(shape), 1e-300, 1.0 - 1e-16)
    return np.log(u) - np.log1p(-u)


def gumbel_softmax(logits, temperature: float = DEFAULT_TEMPERATURE, hard: bool = True,
                   rng: np.random.Generator | None = None, noise: np.ndarray | None = None) -> Tensor:
    """Relaxed categorical sample over the last axis.

    With ``hard=True`` the forward value is one-hot at the argmax of the soft
    sample while gradients flow through the soft sample (straight-through).
    Pass ``noise`` to freeze the Gumbel draw.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    logits = as_tensor(logits)
    if noise is None:
        noise = gumbel_noise(logits.shape, rng)
    soft = ops.softmax(ops.scale(ops.add(logits, noise), 1.0 / temperature), axis=-1)
    if not hard:
        return soft
    idx = soft.data.argmax(axis=-1)
    onehot = np.zeros_like(soft.data)
    np.put_along_axis(onehot, idx[..., None], 1.0, axis=-1)
    return ops.straight_through(onehot, soft)


def gumbel_bernoulli(prob, temperature: float = DEFAULT_TEMPERATURE, hard: bool = True,
                     rng: np.random.Generator | None = None, noise: np.ndarray | None = None) -> Tensor:
    """Element-wise relaxed Bernoulli(prob) sample.

    Equivalent to a two-class Gumbel softmax over ``[log p, log(1-p)]``; the
    difference of two Gumbel variables is logistic, so one logistic draw per
    entry suffices.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    prob = as_tensor(prob)
    if noise is None:
        noise = logistic_noise(prob.shape, rng)
    logit = ops.sub(ops.log(ops.add(prob, _PROB_EPS)), ops.log(ops.add(ops.scale(prob, -1.0), 1.0 + _PROB_EPS)))
    soft = ops.sigmoid(ops.scale(ops.add(logit, noise), 1.0 / temperature))
    if not hard:
        return soft
    return ops.straight_through((soft.data > 0.5).astype(np.float64), soft)

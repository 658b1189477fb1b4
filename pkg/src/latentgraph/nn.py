"""Parameter containers shared by the learners and forecasters."""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .autodiff import Tensor, ops


class Module:
    """Attribute-walking parameter registry.

    Leaf tensors with ``requires_grad`` stored as public attributes (directly,
    or inside child modules and lists of modules) are parameters.  Names are dotted
    attribute paths in definition order, which fixes the serialisation
    layout.
    """

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Tensor]]:
        for key, value in vars(self).items():
            if key.startswith("_"):
                continue
            name = f"{prefix}{key}"
            if isinstance(value, Tensor) and value.requires_grad and value.is_leaf:
                yield name, value
            elif isinstance(value, Module):
                yield from value.named_parameters(name + ".")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{name}.{i}.")
                    elif isinstance(item, Tensor) and item.requires_grad:
                        yield f"{name}.{i}", item

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.named_parameters()]

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())


def param(data) -> Tensor:
    return Tensor(np.array(data, dtype=np.float64), requires_grad=True)


def uniform_init(rng: np.random.Generator, shape, fan_in: int) -> Tensor:
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return param(rng.uniform(-bound, bound, size=shape))


class Linear(Module):
    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator, bias: bool = True):
        self.weight = uniform_init(rng, (n_in, n_out), n_in)
        self.bias = uniform_init(rng, (n_out,), n_in) if bias else None

    def __call__(self, x) -> Tensor:
        y = ops.matmul(x, self.weight)
        return y if self.bias is None else ops.add(y, self.bias)


class MLP(Module):
    """Linear layers with ReLU between them (none after the last)."""

    def __init__(self, sizes: list[int], rng: np.random.Generator, bias: bool = True):
        if len(sizes) < 2:
            raise ValueError("MLP needs at least input and output sizes")
        self.layers = [Linear(a, b, rng, bias=bias) for a, b in zip(sizes[:-1], sizes[1:])]

    def __call__(self, x) -> Tensor:
        for i, layer in enumerate(self.layers):
            x = layer(x)
            if i < len(self.layers) - 1:
                x = ops.relu(x)
        return x

    def pairwise(self, h) -> Tensor:
        """Apply the MLP to ``[h_i || h_j]`` for every ordered pair.

        ``h`` is ``(..., N, d)``; the result is ``(..., N, N, out)`` with the
        first layer split so the N^2 concatenations are never materialised.
        """
        first = self.layers[0]
        d = h.shape[-1]
        if first.weight.shape[0] != 2 * d:
            raise ValueError(f"pairwise MLP expects input width {2 * d}, has {first.weight.shape[0]}")
        left = ops.matmul(h, first.weight[:d])
        right = ops.matmul(h, first.weight[d:])
        x = ops.add(ops.reshape(left, left.shape[:-1] + (1, left.shape[-1])),
                    ops.reshape(right, right.shape[:-2] + (1,) + right.shape[-2:]))
        if first.bias is not None:
            x = ops.add(x, first.bias)
        for layer in self.layers[1:]:
            x = layer(ops.relu(x))
        return x

"""Dense float64 tensors with a reverse-mode tape."""

from __future__ import annotations

import contextlib
import os
from typing import Callable, Iterable, Sequence

import numpy as np

_DEBUG = os.environ.get("LATENTGRAPH_DEBUG", "") not in ("", "0")
_grad_enabled = True


class ShapeError(ValueError):
    """Raised when an op receives operands with incompatible shapes."""

    def __init__(self, op: str, detail: str):
        super().__init__(f"{op}: {detail}")
        self.op = op


@contextlib.contextmanager
def no_grad():
    """Disable tape recording inside the block (evaluation, parameter updates)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    """An n-d float64 array that records the ops producing it.

    Leaves created with ``requires_grad=True`` receive ``.grad`` after
    :func:`backward`.  Non-leaf tensors keep a reference to their inputs and a
    closure mapping the output gradient to input gradients.
    """

    __slots__ = ("data", "grad", "requires_grad", "op", "_parents", "_backward", "name")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.op = "leaf"
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], Sequence[np.ndarray | None]] | None = None
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def is_leaf(self) -> bool:
        return not self._parents

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def detach(self) -> Tensor:
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        tag = f", op={self.op}" if self.op != "leaf" else ""
        return f"Tensor(shape={self.shape}{tag}, requires_grad={self.requires_grad})"

    def __len__(self) -> int:
        return self.shape[0]

    # operator sugar; implementations live in ops.py
    def __add__(self, other):
        from . import ops
        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from . import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops
        return ops.mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        from . import ops
        return ops.scale(self, -1.0)

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, other)

    def __getitem__(self, index):
        from . import ops
        return ops.index(self, index)

    @property
    def T(self) -> Tensor:
        from . import ops
        return ops.transpose(self)

    def reshape(self, *shape) -> Tensor:
        from . import ops
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)

    def sum(self, axis=None, keepdims: bool = False) -> Tensor:
        from . import ops
        return ops.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> Tensor:
        from . import ops
        return ops.mean(self, axis=axis, keepdims=keepdims)

    def backward(self) -> Tape:
        return backward(self)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def record(
    op: str,
    value: np.ndarray,
    parents: Iterable[Tensor],
    grad_fn: Callable[[np.ndarray], Sequence[np.ndarray | None]],
) -> Tensor:
    """Wrap ``value`` as the output of ``op``; attach ``grad_fn`` when needed."""
    out = Tensor.__new__(Tensor)
    out.data = value
    out.grad = None
    out.name = None
    out.op = op
    parents = tuple(parents)
    if _DEBUG and all(np.all(np.isfinite(p.data)) for p in parents):
        if not np.all(np.isfinite(value)):
            raise FloatingPointError(f"{op} produced non-finite values from finite inputs")
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = grad_fn
    else:
        out.requires_grad = False
        out._parents = ()
        out._backward = None
    return out


class Tape:
    """Topologically ordered record of the ops between the leaves and a root.

    ``nodes`` lists every tensor on a gradient path, inputs before outputs.
    ``grads`` maps ``id(tensor)`` to the accumulated gradient after
    :meth:`run`.
    """

    def __init__(self, root: Tensor):
        self.root = root
        self.nodes: list[Tensor] = _topological_order(root)
        self.grads: dict[int, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.nodes)

    def run(self) -> dict[int, np.ndarray]:
        root = self.root
        grads = self.grads
        grads.clear()
        grads[id(root)] = np.ones_like(root.data)
        for node in reversed(self.nodes):
            g = grads.pop(id(node), None) if node._parents else grads.get(id(node))
            if g is None:
                continue
            if not node._parents:
                node.grad = g if node.grad is None else node.grad + g
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                if pg.shape != parent.data.shape:
                    raise ShapeError(node.op, f"gradient shape {pg.shape} != input shape {parent.data.shape}")
                key = id(parent)
                prev = grads.get(key)
                grads[key] = pg if prev is None else prev + pg
        return grads


def _topological_order(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    return order


def backward(loss: Tensor) -> Tape:
    """Accumulate d(loss)/d(leaf) into ``leaf.grad`` for every reachable leaf."""
    if not isinstance(loss, Tensor):
        raise TypeError("backward expects a Tensor")
    if loss.data.size != 1:
        raise ShapeError("backward", f"loss must be scalar, got shape {loss.shape}")
    if not loss.requires_grad:
        raise ValueError("backward: loss is not on the tape (no input requires grad)")
    tape = Tape(loss)
    tape.run()
    return tape


def grad(loss: Tensor, params: Sequence[Tensor]) -> list[np.ndarray]:
    """Gradients of ``loss`` w.r.t. ``params``; zeros for params off the path.

    Unlike :func:`backward` this accepts a constant loss, for which every
    gradient is zero.  Existing ``.grad`` values are left untouched.
    """
    saved = [p.grad for p in params]
    for p in params:
        p.grad = None
    try:
        if loss.requires_grad:
            if loss.data.size != 1:
                raise ShapeError("grad", f"loss must be scalar, got shape {loss.shape}")
            Tape(loss).run()
        return [np.zeros_like(p.data) if p.grad is None else p.grad for p in params]
    finally:
        for p, g in zip(params, saved):
            p.grad = g

"""Differentiable op catalog.

Every function takes :class:`Tensor` (or array-like) inputs and returns a
Tensor recorded on the tape.  Broadcasting follows numpy; gradients are
summed back to each input's shape.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels
from .tensor import ShapeError, Tensor, as_tensor, record

LEAKY_SLOPE = 0.2


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


def _check_broadcast(op: str, a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(op, f"cannot broadcast {a.shape} with {b.shape}") from None


# -- elementwise arithmetic -------------------------------------------------

def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("add", a, b)
    sa, sb = a.shape, b.shape
    return record("add", a.data + b.data, (a, b),
                  lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb)))


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("sub", a, b)
    sa, sb = a.shape, b.shape
    return record("sub", a.data - b.data, (a, b),
                  lambda g: (_unbroadcast(g, sa), _unbroadcast(-g, sb)))


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("mul", a, b)
    ad, bd = a.data, b.data

    def grad_fn(g):
        return (_unbroadcast(g * bd, ad.shape) if a.requires_grad else None,
                _unbroadcast(g * ad, bd.shape) if b.requires_grad else None)

    return record("mul", ad * bd, (a, b), grad_fn)


def scale(a, c: float) -> Tensor:
    a = as_tensor(a)
    c = float(c)
    return record("scale", a.data * c, (a,), lambda g: (g * c,))


def reciprocal(a) -> Tensor:
    """Elementwise 1/x with the convention 1/0 := 0 (degree normalisation)."""
    a = as_tensor(a)
    nz = a.data != 0
    out = np.zeros_like(a.data)
    np.divide(1.0, a.data, out=out, where=nz)
    return record("reciprocal", out, (a,), lambda g: (-g * out * out,))


def abs(a) -> Tensor:
    a = as_tensor(a)
    s = np.sign(a.data)
    return record("abs", np.abs(a.data), (a,), lambda g: (g * s,))


def sqrt(a) -> Tensor:
    a = as_tensor(a)
    out = np.sqrt(a.data)
    return record("sqrt", out, (a,), lambda g: (g * 0.5 / out,))


def log(a) -> Tensor:
    a = as_tensor(a)
    d = a.data
    return record("log", np.log(d), (a,), lambda g: (g / d,))


# -- activations -------------------------------------------------------------

def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    out = _stable_sigmoid(a.data)
    return record("sigmoid", out, (a,), lambda g: (g * out * (1.0 - out),))


def _stable_sigmoid(x: np.ndarray) -> np.ndarray:
    # overflow-free; one transcendental instead of exp plus a select
    out = np.tanh(0.5 * x)
    out += 1.0
    out *= 0.5
    return out


def tanh(a) -> Tensor:
    a = as_tensor(a)
    out = np.tanh(a.data)
    return record("tanh", out, (a,), lambda g: (g * (1.0 - out * out),))


def relu(a) -> Tensor:
    a = as_tensor(a)
    m = a.data > 0
    return record("relu", a.data * m, (a,), lambda g: (g * m,))


def leaky_relu(a, slope: float = LEAKY_SLOPE) -> Tensor:
    a = as_tensor(a)
    k = np.where(a.data > 0, 1.0, slope)
    return record("leaky_relu", a.data * k, (a,), lambda g: (g * k,))


def softmax(a, axis: int = -1) -> Tensor:
    a = as_tensor(a)
    z = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(z)
    out = e / e.sum(axis=axis, keepdims=True)

    def grad_fn(g):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

    return record("softmax", out, (a,), grad_fn)


# -- linear algebra ----------------------------------------------------------

def matmul(a, b) -> Tensor:
    """``a @ b`` with numpy batching rules (leading dims broadcast)."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError("matmul", f"operands must be at least 2-d, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError("matmul", f"inner dims differ: {a.shape} @ {b.shape}")
    try:
        np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    except ValueError:
        raise ShapeError("matmul", f"batch dims differ: {a.shape} @ {b.shape}") from None
    ad, bd = a.data, b.data
    if bd.ndim == 2 and ad.ndim > 2:
        return _matmul_right_2d(a, b)

    def grad_fn(g):
        ga = gb = None
        if a.requires_grad:
            ga = _unbroadcast(g @ np.swapaxes(bd, -1, -2), ad.shape)
        if b.requires_grad:
            gb = _unbroadcast(np.swapaxes(ad, -1, -2) @ g, bd.shape)
        return ga, gb

    return record("matmul", ad @ bd, (a, b), grad_fn)


# Batched operand times a shared 2-d weight: one GEMM over the folded batch.

def _matmul_right_2d(a: Tensor, b: Tensor) -> Tensor:
    ad, bd = a.data, b.data
    a2 = ad.reshape(-1, ad.shape[-1])
    out = (a2 @ bd).reshape(ad.shape[:-1] + (bd.shape[1],))

    def grad_fn(g):
        g2 = g.reshape(-1, g.shape[-1])
        ga = (g2 @ bd.T).reshape(ad.shape) if a.requires_grad else None
        gb = a2.T @ g2 if b.requires_grad else None
        return ga, gb

    return record("matmul", out, (a, b), grad_fn)


bmm = matmul


def transpose(a, axes: tuple[int, ...] | None = None) -> Tensor:
    a = as_tensor(a)
    if axes is None:
        axes = tuple(range(a.ndim - 2)) + (a.ndim - 1, a.ndim - 2) if a.ndim >= 2 else (0,)
    inv = np.argsort(axes)
    return record("transpose", np.transpose(a.data, axes), (a,),
                  lambda g: (np.transpose(g, inv),))


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    src = a.shape
    try:
        out = a.data.reshape(shape)
    except ValueError:
        raise ShapeError("reshape", f"cannot reshape {src} into {tuple(shape)}") from None
    return record("reshape", out, (a,), lambda g: (g.reshape(src),))


# -- reductions --------------------------------------------------------------

def sum(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    src = a.shape

    def grad_fn(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, src).copy(),)

    return record("sum", np.asarray(a.data.sum(axis=axis, keepdims=keepdims)), (a,), grad_fn)


def mean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    n = a.size if axis is None else int(np.prod([a.shape[i] for i in np.atleast_1d(axis)]))
    return scale(sum(a, axis=axis, keepdims=keepdims), 1.0 / n)


# -- structural ----------------------------------------------------------------

def concat(tensors, axis: int = -1) -> Tensor:
    ts = [as_tensor(t) for t in tensors]
    try:
        out = np.concatenate([t.data for t in ts], axis=axis)
    except ValueError as exc:
        raise ShapeError("concat", str(exc)) from None
    bounds = np.cumsum([t.shape[axis] for t in ts])[:-1]
    return record("concat", out, ts, lambda g: tuple(np.split(g, bounds, axis=axis)))


def stack(tensors, axis: int = 0) -> Tensor:
    ts = [as_tensor(t) for t in tensors]
    try:
        out = np.stack([t.data for t in ts], axis=axis)
    except ValueError as exc:
        raise ShapeError("stack", str(exc)) from None
    n = len(ts)
    return record("stack", out, ts,
                  lambda g: tuple(np.squeeze(p, axis) for p in np.split(g, n, axis=axis)))


def index(a, idx) -> Tensor:
    """Basic or advanced indexing; gradients scatter-add back."""
    a = as_tensor(a)
    src = a.shape

    basic = _is_basic_index(idx)

    def grad_fn(g):
        out = np.zeros(src)
        if basic:
            out[idx] += g
        else:
            np.add.at(out, idx, g)
        return (out,)

    return record("index", a.data[idx], (a,), grad_fn)


def _is_basic_index(idx) -> bool:
    parts = idx if isinstance(idx, tuple) else (idx,)
    return all(p is None or p is Ellipsis or isinstance(p, (int, np.integer, slice)) for p in parts)


def gather_rows(a, rows) -> Tensor:
    """Select rows of a 2-d (or leading axis of an n-d) tensor by integer index."""
    a = as_tensor(a)
    rows = np.asarray(rows, dtype=np.intp)
    if rows.size and (rows.min() < -a.shape[0] or rows.max() >= a.shape[0]):
        raise ShapeError("gather_rows", f"row index out of range for {a.shape[0]} rows")
    return index(a, rows)


def embedding(table, ids) -> Tensor:
    """Look up rows of an embedding table; ``ids`` may be any integer array."""
    return gather_rows(table, ids)


def straight_through(hard: np.ndarray, soft: Tensor) -> Tensor:
    """Forward value ``hard``, gradient routed unchanged to ``soft``."""
    soft = as_tensor(soft)
    hard = np.asarray(hard, dtype=np.float64)
    if hard.shape != soft.shape:
        raise ShapeError("straight_through", f"{hard.shape} vs {soft.shape}")
    return record("straight_through", hard, (soft,), lambda g: (g,))


def dropout(a, p: float, rng: np.random.Generator | None, training: bool = True) -> Tensor:
    """Inverted dropout; identity outside training or when ``p == 0``."""
    a = as_tensor(a)
    if not training or p == 0.0:
        return a
    if not 0.0 <= p < 1.0:
        raise ValueError(f"dropout probability must be in [0, 1), got {p}")
    keep = (rng.random(a.shape) >= p) / (1.0 - p)
    return record("dropout", a.data * keep, (a,), lambda g: (g * keep,))


# -- convolution ---------------------------------------------------------------

def conv1d(x, w, b=None, stride: int = 1, dilation: int = 1) -> Tensor:
    """Valid (unpadded) 1-d cross-correlation.

    x: (B, C_in, L); w: (C_out, C_in, k); b: (C_out,) or None.
    Returns (B, C_out, L_out) with L_out = (L - dilation*(k-1) - 1)//stride + 1.
    """
    x, w = as_tensor(x), as_tensor(w)
    if x.ndim != 3 or w.ndim != 3:
        raise ShapeError("conv1d", f"expected x (B,C,L) and w (O,C,k), got {x.shape}, {w.shape}")
    if x.shape[1] != w.shape[1]:
        raise ShapeError("conv1d", f"channel mismatch: x has {x.shape[1]}, kernel expects {w.shape[1]}")
    span = dilation * (w.shape[2] - 1) + 1
    if span > x.shape[2]:
        raise ShapeError("conv1d", f"kernel span {span} exceeds series length {x.shape[2]}")
    xd, wd = x.data, w.data
    out = _kernels.conv1d_forward(xd, wd, stride, dilation)

    def grad_fn(g):
        gx, gw = _kernels.conv1d_backward(g, xd, wd, stride, dilation)
        return (gx if x.requires_grad else None, gw if w.requires_grad else None)

    y = record("conv1d", out, (x, w), grad_fn)
    if b is not None:
        y = add(y, reshape(b, (1, -1, 1)))
    return y


# -- losses built from the catalog ---------------------------------------------

def masked_mae(pred, target: np.ndarray, mask: np.ndarray | None = None) -> Tensor:
    """Mean |pred - target| over entries where ``mask`` is true.

    A batch whose entries are all masked out contributes exactly zero loss
    and zero gradient.
    """
    pred = as_tensor(pred)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError("masked_mae", f"prediction {pred.shape} vs target {target.shape}")
    m = np.ones(target.shape) if mask is None else np.asarray(mask, dtype=np.float64)
    value, g_unit = _kernels.masked_abs_error(pred.data, target, m)
    return record("masked_mae", np.asarray(value), (pred,), lambda g: (g * g_unit,))


def binary_cross_entropy(prob, target: np.ndarray, eps: float = 1e-12) -> Tensor:
    """Element-wise BCE averaged over all entries; ``prob`` clipped away from 0/1."""
    prob = as_tensor(prob)
    t = np.asarray(target, dtype=np.float64)
    p = np.clip(prob.data, eps, 1.0 - eps)
    value = -(t * np.log(p) + (1.0 - t) * np.log(1.0 - p)).mean()
    inside = (prob.data > eps) & (prob.data < 1.0 - eps)
    g_unit = (-(t / p) + (1.0 - t) / (1.0 - p)) * inside / t.size
    return record("bce", np.asarray(value), (prob,), lambda g: (g * g_unit,))

"""Pure-numpy reference kernels.

These define the semantics; the compiled module must agree with them to
rounding (see tests/test_kernels.py).
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _windows(x: np.ndarray, k: int, stride: int, dilation: int) -> np.ndarray:
    span = dilation * (k - 1) + 1
    return sliding_window_view(x, span, axis=2)[:, :, ::stride, ::dilation]


def conv1d_forward(x: np.ndarray, w: np.ndarray, stride: int, dilation: int) -> np.ndarray:
    win = _windows(x, w.shape[2], stride, dilation)          # B, C, L_out, k
    out = np.tensordot(win, w, axes=([1, 3], [1, 2]))         # B, L_out, O
    return np.ascontiguousarray(out.transpose(0, 2, 1))


def conv1d_backward(g: np.ndarray, x: np.ndarray, w: np.ndarray, stride: int, dilation: int):
    k = w.shape[2]
    win = _windows(x, k, stride, dilation)
    gw = np.tensordot(g, win, axes=([0, 2], [0, 2]))          # O, C, k
    gx = np.zeros_like(x)
    l_out = g.shape[2]
    for j in range(k):
        start = j * dilation
        stop = start + stride * (l_out - 1) + 1
        gx[:, :, start:stop:stride] += np.einsum("bol,oc->bcl", g, w[:, :, j])
    return gx, gw


def masked_abs_error(pred: np.ndarray, target: np.ndarray, mask: np.ndarray):
    count = mask.sum()
    if count == 0:
        return 0.0, np.zeros_like(pred)
    diff = pred - target
    value = float((np.abs(diff) * mask).sum() / count)
    return value, np.sign(diff) * mask / count


def topk_mask(scores: np.ndarray, k: int, exclude_diagonal: bool = True) -> np.ndarray:
    """Boolean mask of the ``k`` largest entries per row; lower index wins ties."""
    s = np.array(scores, dtype=np.float64)
    if exclude_diagonal:
        np.fill_diagonal(s, -np.inf)
    order = np.argsort(-s, axis=1, kind="stable")[:, :k]
    mask = np.zeros(s.shape, dtype=bool)
    np.put_along_axis(mask, order, True, axis=1)
    return mask

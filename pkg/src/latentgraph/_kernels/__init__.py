"""Hot kernels with a compiled core and a numpy fallback.

The compiled module is used when it imports cleanly, unless the environment
variable ``LATENTGRAPH_PURE_PYTHON`` is set.  ``BACKEND`` names the active
implementation.
"""

from __future__ import annotations

import importlib
import os

import numpy as np

from . import _fallback

_core = None
if os.environ.get("LATENTGRAPH_PURE_PYTHON", "") in ("", "0"):
    try:
        _core = importlib.import_module(f"{__name__}._core")
    except ImportError:
        _core = None

BACKEND = "cython" if _core is not None else "python"


def _c(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


if _core is not None:

    def conv1d_forward(x, w, stride, dilation):
        return _core.conv1d_forward(_c(x), _c(w), stride, dilation)

    def conv1d_backward(g, x, w, stride, dilation):
        return _core.conv1d_backward(_c(g), _c(x), _c(w), stride, dilation)

    def masked_abs_error(pred, target, mask):
        shape = np.shape(pred)
        value, grad = _core.masked_abs_error(_c(pred).ravel(), _c(target).ravel(), _c(mask).ravel())
        return value, grad.reshape(shape)

    def topk_mask(scores, k, exclude_diagonal=True):
        return _core.topk_mask(_c(scores), int(k), bool(exclude_diagonal))

else:
    conv1d_forward = _fallback.conv1d_forward
    conv1d_backward = _fallback.conv1d_backward
    masked_abs_error = _fallback.masked_abs_error
    topk_mask = _fallback.topk_mask

__all__ = ["BACKEND", "conv1d_forward", "conv1d_backward", "masked_abs_error", "topk_mask"]

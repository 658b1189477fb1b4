"""The compiled kernels must agree with the numpy reference."""

import numpy as np
import pytest

from latentgraph import _kernels
from latentgraph._kernels import _fallback

compiled = pytest.mark.skipif(_kernels.BACKEND != "cython", reason="compiled core not built")


@compiled
@pytest.mark.parametrize("stride,dilation", [(1, 1), (2, 1), (1, 3), (4, 2)])
def test_conv1d_matches_reference(stride, dilation):
    rng = np.random.default_rng(stride * 10 + dilation)
    x = rng.normal(size=(3, 2, 40))
    w = rng.normal(size=(5, 2, 4))
    out = _kernels.conv1d_forward(x, w, stride, dilation)
    np.testing.assert_allclose(out, _fallback.conv1d_forward(x, w, stride, dilation), atol=1e-12)
    g = rng.normal(size=out.shape)
    gx, gw = _kernels.conv1d_backward(g, x, w, stride, dilation)
    rx, rw = _fallback.conv1d_backward(g, x, w, stride, dilation)
    np.testing.assert_allclose(gx, rx, atol=1e-12)
    np.testing.assert_allclose(gw, rw, atol=1e-12)


@compiled
def test_masked_abs_error_matches_reference():
    rng = np.random.default_rng(0)
    p, t = rng.normal(size=(4, 3, 12)), rng.normal(size=(4, 3, 12))
    m = (rng.random(p.shape) > 0.3).astype(float)
    v, g = _kernels.masked_abs_error(p, t, m)
    rv, rg = _fallback.masked_abs_error(p, t, m)
    assert v == pytest.approx(rv, abs=1e-14)
    np.testing.assert_allclose(g, rg, atol=1e-15)


@compiled
def test_topk_matches_reference_including_ties():
    rng = np.random.default_rng(1)
    s = np.round(rng.normal(size=(12, 12)), 1)
    for k in (1, 3, 11):
        np.testing.assert_array_equal(_kernels.topk_mask(s, k), _fallback.topk_mask(s, k))


@pytest.mark.parametrize("impl", [_fallback, _kernels])
def test_all_masked_is_zero(impl):
    v, g = impl.masked_abs_error(np.ones((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)))
    assert v == 0.0
    assert not g.any()


@pytest.mark.parametrize("impl", [_fallback, _kernels])
def test_topk_tie_break_lowest_index(impl):
    mask = impl.topk_mask(np.ones((3, 3)), 1)
    np.testing.assert_array_equal(mask, [[0, 1, 0], [1, 0, 0], [1, 0, 0]])

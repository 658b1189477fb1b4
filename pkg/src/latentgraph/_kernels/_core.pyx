# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; drop-in replacements for ``_fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def conv1d_forward(double[:, :, ::1] x, double[:, :, ::1] w, Py_ssize_t stride, Py_ssize_t dilation):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], L = x.shape[2]
    cdef Py_ssize_t O = w.shape[0], K = w.shape[2]
    cdef Py_ssize_t L_out = (L - dilation * (K - 1) - 1) // stride + 1
    out_arr = np.zeros((B, O, L_out))
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t b, o, c, l, j
    cdef double wv
    cdef double *dst
    cdef const double *src
    with nogil:
        for b in range(B):
            for o in range(O):
                dst = &out[b, o, 0]
                for c in range(C):
                    for j in range(K):
                        # innermost loop runs along time so it vectorizes
                        wv = w[o, c, j]
                        src = &x[b, c, j * dilation]
                        if stride == 1:
                            for l in range(L_out):
                                dst[l] += wv * src[l]
                        else:
                            for l in range(L_out):
                                dst[l] += wv * src[l * stride]
    return out_arr


def conv1d_backward(double[:, :, ::1] g, double[:, :, ::1] x, double[:, :, ::1] w,
                    Py_ssize_t stride, Py_ssize_t dilation):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], L = x.shape[2]
    cdef Py_ssize_t O = w.shape[0], K = w.shape[2], L_out = g.shape[2]
    gx_arr = np.zeros((B, C, L))
    gw_arr = np.zeros((O, C, K))
    cdef double[:, :, ::1] gx = gx_arr
    cdef double[:, :, ::1] gw = gw_arr
    cdef Py_ssize_t b, o, c, l, j
    cdef double wv, acc
    cdef const double *gb
    cdef const double *xs
    cdef double *gxs
    with nogil:
        for b in range(B):
            for o in range(O):
                gb = &g[b, o, 0]
                for c in range(C):
                    for j in range(K):
                        wv = w[o, c, j]
                        xs = &x[b, c, j * dilation]
                        gxs = &gx[b, c, j * dilation]
                        acc = 0.0
                        if stride == 1:
                            for l in range(L_out):
                                acc = acc + gb[l] * xs[l]
                                gxs[l] += gb[l] * wv
                        else:
                            for l in range(L_out):
                                acc = acc + gb[l] * xs[l * stride]
                                gxs[l * stride] += gb[l] * wv
                        gw[o, c, j] += acc
    return gx_arr, gw_arr


def masked_abs_error(double[::1] pred, double[::1] target, double[::1] mask):
    cdef Py_ssize_t n = pred.shape[0], i
    cdef double count = 0.0, total = 0.0, d, scale
    grad_arr = np.zeros(n)
    cdef double[::1] grad = grad_arr
    with nogil:
        for i in range(n):
            count += mask[i]
        if count > 0:
            scale = 1.0 / count
            for i in range(n):
                d = (pred[i] - target[i]) * mask[i]
                total += fabs(d)
                # sign(d) * mask / count without branches; d == 0 gives 0
                grad[i] = ((d > 0) - (d < 0)) * mask[i] * scale
            total = total * scale
    return total, grad_arr


def topk_mask(double[:, ::1] scores, Py_ssize_t k, bint exclude_diagonal=True):
    cdef Py_ssize_t n = scores.shape[0], m = scores.shape[1]
    mask_arr = np.zeros((n, m), dtype=np.uint8)
    cdef unsigned char[:, ::1] mask = mask_arr
    cdef Py_ssize_t i, j, r, best
    cdef double bv = 0.0
    with nogil:
        for i in range(n):
            for r in range(k):
                best = -1
                for j in range(m):
                    if mask[i, j] or (exclude_diagonal and i == j):
                        continue
                    # strict '>' keeps the lowest index among ties
                    if best < 0 or scores[i, j] > bv:
                        best = j
                        bv = scores[i, j]
                if best < 0:
                    break
                mask[i, best] = 1
    return mask_arr.astype(bool)

"""numba-compiled convolution kernels.

Loop nests are ordered so the innermost index walks the last (contiguous)
axis of every array it touches, and all three kernels parallelize over
image rows. ``_conv2d_backward_kernel`` accumulates into per-thread
buffers (deterministic strided row partition) that the wrapper sums.
"""
from __future__ import annotations

import numba
import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True, fastmath=False)
def _conv2d_forward(xp, w, b, out):
    kh, kw, cin, cout = w.shape
    H, W, _ = out.shape
    for i in prange(H):
        for j in range(W):
            for o in range(cout):
                out[i, j, o] = b[o]
            for di in range(kh):
                for dj in range(kw):
                    for c in range(cin):
                        xv = xp[i + di, j + dj, c]
                        for o in range(cout):
                            out[i, j, o] += xv * w[di, dj, c, o]


@njit(cache=True, parallel=True, fastmath=False)
def _conv2d_backward_input(dyp, wft, dx):
    # wft has shape (kh, kw, cout, cin): kernel flipped spatially and
    # transposed so the innermost loop over cin is contiguous.
    kh, kw, cout, cin = wft.shape
    H, W, _ = dx.shape
    for i in prange(H):
        for j in range(W):
            for c in range(cin):
                dx[i, j, c] = 0.0
            for di in range(kh):
                for dj in range(kw):
                    for o in range(cout):
                        dv = dyp[i + di, j + dj, o]
                        for c in range(cin):
                            dx[i, j, c] += dv * wft[di, dj, o, c]


@njit(cache=True, parallel=True, fastmath=False)
def _conv2d_backward_kernel(xp, dy, dw_t):
    nt, kh, kw, cin, cout = dw_t.shape
    H, W, _ = dy.shape
    for t in prange(nt):
        for i in range(t, H, nt):
            for j in range(W):
                for di in range(kh):
                    for dj in range(kw):
                        for c in range(cin):
                            xv = xp[i + di, j + dj, c]
                            for o in range(cout):
                                dw_t[t, di, dj, c, o] += xv * dy[i, j, o]


def _pad(x, kh, kw):
    ph, pw = kh // 2, kw // 2
    return np.pad(x, ((ph, kh - 1 - ph), (pw, kw - 1 - pw), (0, 0)))


def conv2d_forward(x, w, b):
    kh, kw, cin, cout = w.shape
    xp = np.ascontiguousarray(_pad(x, kh, kw))
    out = np.empty((x.shape[0], x.shape[1], cout), dtype=np.float64)
    _conv2d_forward(xp, np.ascontiguousarray(w), np.ascontiguousarray(b), out)
    return out


def conv2d_backward_input(dy, w, in_shape):
    kh, kw, cin, cout = w.shape
    wft = np.ascontiguousarray(w[::-1, ::-1].transpose(0, 1, 3, 2))
    ph, pw = kh - 1 - kh // 2, kw - 1 - kw // 2
    dyp = np.ascontiguousarray(
        np.pad(dy, ((ph, kh - 1 - ph), (pw, kw - 1 - pw), (0, 0))))
    dx = np.empty((in_shape[0], in_shape[1], cin), dtype=np.float64)
    _conv2d_backward_input(dyp, wft, dx)
    return dx


def conv2d_backward_kernel(x, dy, kh, kw):
    cin = x.shape[2]
    cout = dy.shape[2]
    xp = np.ascontiguousarray(_pad(x, kh, kw))
    nt = numba.get_num_threads()
    dw_t = np.zeros((nt, kh, kw, cin, cout), dtype=np.float64)
    _conv2d_backward_kernel(xp, np.ascontiguousarray(dy), dw_t)
    return dw_t.sum(axis=0)

"""Pure-numpy reference kernels (im2col based)."""
from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _pad(x: np.ndarray, kh: int, kw: int) -> np.ndarray:
    ph, pw = kh // 2, kw // 2
    return np.pad(x, ((ph, kh - 1 - ph), (pw, kw - 1 - pw), (0, 0)))


def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    kh, kw, cin, cout = w.shape
    xp = _pad(x, kh, kw)
    win = sliding_window_view(xp, (kh, kw), axis=(0, 1))  # (H, W, cin, kh, kw)
    y = np.einsum("hwcij,ijco->hwo", win, w, optimize=True)
    return y + b


def conv2d_backward_input(dy: np.ndarray, w: np.ndarray, in_shape) -> np.ndarray:
    kh, kw, cin, cout = w.shape
    # full correlation of dy with the kernel flipped in both spatial axes
    wf = w[::-1, ::-1]  # (kh, kw, cin, cout)
    ph, pw = kh - 1 - kh // 2, kw - 1 - kw // 2
    dyp = np.pad(dy, ((ph, kh - 1 - ph), (pw, kw - 1 - pw), (0, 0)))
    win = sliding_window_view(dyp, (kh, kw), axis=(0, 1))  # (H, W, cout, kh, kw)
    dx = np.einsum("hwoij,ijco->hwc", win, wf, optimize=True)
    return dx[: in_shape[0], : in_shape[1]]


def conv2d_backward_kernel(x: np.ndarray, dy: np.ndarray, kh: int, kw: int) -> np.ndarray:
    xp = _pad(x, kh, kw)
    win = sliding_window_view(xp, (kh, kw), axis=(0, 1))  # (H, W, cin, kh, kw)
    dw = np.einsum("hwcij,hwo->ijco", win, dy, optimize=True)
    return dw

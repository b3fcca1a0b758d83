"""Minimal layer zoo with hand-written backward passes (float64 throughout).

Every layer caches what its backward pass needs on forward; ``backward(dy)``
returns dx and accumulates parameter gradients in ``self.g``. Parameters and
gradients live in the dicts ``self.p`` / ``self.g`` under matching keys.
"""
from __future__ import annotations

import numpy as np

from .. import kernels


class Layer:
    def __init__(self):
        self.p: dict[str, np.ndarray] = {}
        self.g: dict[str, np.ndarray] = {}

    def zero_grad(self):
        for k in self.p:
            self.g[k] = np.zeros_like(self.p[k])

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dy: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Dense(Layer):
    """Affine map on the last axis."""

    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator):
        super().__init__()
        self.p["W"] = rng.normal(0.0, 1.0 / np.sqrt(d_in), (d_in, d_out))
        self.p["b"] = np.zeros(d_out)
        self.zero_grad()

    def forward(self, x):
        self._x = x
        return x @ self.p["W"] + self.p["b"]

    def backward(self, dy):
        x2 = self._x.reshape(-1, self._x.shape[-1])
        dy2 = dy.reshape(-1, dy.shape[-1])
        self.g["W"] += x2.T @ dy2
        self.g["b"] += dy2.sum(axis=0)
        return (dy2 @ self.p["W"].T).reshape(self._x.shape)


class BinProject(Layer):
    """Learned projection of the bin axis of a (T, F, C) tensor to (T, Q, C).

    Weights are shared across time frames and channels.
    """

    def __init__(self, f_in: int, f_out: int, rng: np.random.Generator):
        super().__init__()
        self.p["W"] = rng.normal(0.0, 1.0 / np.sqrt(f_in), (f_in, f_out))
        self.p["b"] = np.zeros(f_out)
        self.zero_grad()

    def forward(self, x):
        self._x = x
        return np.einsum("tfc,fq->tqc", x, self.p["W"],
                         optimize=True) + self.p["b"][None, :, None]

    def backward(self, dy):
        self.g["W"] += np.einsum("tfc,tqc->fq", self._x, dy, optimize=True)
        self.g["b"] += dy.sum(axis=(0, 2))
        return np.einsum("tqc,fq->tfc", dy, self.p["W"], optimize=True)


class Conv2D(Layer):
    """Stride-1 same-padding 2-D convolution on (H, W, C) tensors.

    The inner loops live in :mod:`transkit.kernels` (numba or numpy backend).
    """

    def __init__(self, kh: int, kw: int, c_in: int, c_out: int,
                 rng: np.random.Generator):
        super().__init__()
        fan_in = kh * kw * c_in
        self.p["W"] = rng.normal(0.0, 1.0 / np.sqrt(fan_in), (kh, kw, c_in, c_out))
        self.p["b"] = np.zeros(c_out)
        self.kh, self.kw = kh, kw
        self.zero_grad()

    def forward(self, x):
        self._x = x
        return kernels.conv2d_forward(x, self.p["W"], self.p["b"])

    def backward(self, dy):
        self.g["W"] += kernels.conv2d_backward_kernel(self._x, dy, self.kh, self.kw)
        self.g["b"] += dy.sum(axis=(0, 1))
        return kernels.conv2d_backward_input(dy, self.p["W"], self._x.shape)


class ReLU(Layer):
    def forward(self, x):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dy):
        return np.where(self._mask, dy, 0.0)


class Tanh(Layer):
    def forward(self, x):
        self._y = np.tanh(x)
        return self._y

    def backward(self, dy):
        return dy * (1.0 - self._y ** 2)


class AvgPool2(Layer):
    """2x2 average pool; odd trailing rows/cols are zero-padded first."""

    def forward(self, x):
        H, W, C = x.shape
        self._in_shape = x.shape
        Hp, Wp = H + (H % 2), W + (W % 2)
        if (Hp, Wp) != (H, W):
            x = np.pad(x, ((0, Hp - H), (0, Wp - W), (0, 0)))
        self._pad_shape = (Hp, Wp, C)
        return x.reshape(Hp // 2, 2, Wp // 2, 2, C).mean(axis=(1, 3))

    def backward(self, dy):
        Hp, Wp, C = self._pad_shape
        dx = np.repeat(np.repeat(dy, 2, axis=0), 2, axis=1) / 4.0
        H, W, _ = self._in_shape
        return dx[:H, :W]


class Upsample2(Layer):
    """Nearest-neighbour 2x upsampling."""

    def forward(self, x):
        self._in_shape = x.shape
        return np.repeat(np.repeat(x, 2, axis=0), 2, axis=1)

    def backward(self, dy):
        H, W, C = self._in_shape
        return dy.reshape(H, 2, W, 2, C).sum(axis=(1, 3))


class PoolBins(Layer):
    """Average-pool the bin axis of (T, F, C) down by an integer factor."""

    def __init__(self, factor: int):
        super().__init__()
        self.factor = factor

    def forward(self, x):
        T, F, C = x.shape
        self._in_shape = x.shape
        f = self.factor
        Fp = ((F + f - 1) // f) * f
        if Fp != F:
            x = np.pad(x, ((0, 0), (0, Fp - F), (0, 0)))
        self._Fp = Fp
        return x.reshape(T, Fp // f, f, C).mean(axis=2)

    def backward(self, dy):
        T, F, C = self._in_shape
        dx = np.repeat(dy, self.factor, axis=1) / self.factor
        return dx[:, :F]


class ResBlock(Layer):
    """conv -> relu -> conv, plus identity skip."""

    def __init__(self, channels: int, rng: np.random.Generator, k: int = 3):
        super().__init__()
        self.c1 = Conv2D(k, k, channels, channels, rng)
        self.r = ReLU()
        self.c2 = Conv2D(k, k, channels, channels, rng)
        self.children = [self.c1, self.c2]

    def zero_grad(self):
        for c in self.children:
            c.zero_grad()

    def forward(self, x):
        return x + self.c2.forward(self.r.forward(self.c1.forward(x)))

    def backward(self, dy):
        return dy + self.c1.backward(self.r.backward(self.c2.backward(dy)))


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    z = x - x.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


__all__ = [
    "Layer", "Dense", "BinProject", "Conv2D", "ReLU", "Tanh", "AvgPool2",
    "Upsample2", "PoolBins", "ResBlock", "sigmoid", "softmax",
]

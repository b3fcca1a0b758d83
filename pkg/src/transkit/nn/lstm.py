"""LSTM over a (T, d) sequence, plus a bidirectional wrapper."""
from __future__ import annotations

import numpy as np

from .layers import Layer, sigmoid


class LSTM(Layer):
    """Unidirectional LSTM; gate order in the packed weights is i, f, g, o."""

    def __init__(self, d_in: int, hidden: int, rng: np.random.Generator):
        super().__init__()
        H = hidden
        self.p["W"] = rng.normal(0.0, 1.0 / np.sqrt(d_in), (d_in, 4 * H))
        self.p["U"] = rng.normal(0.0, 1.0 / np.sqrt(H), (H, 4 * H))
        self.p["b"] = np.zeros(4 * H)
        self.H = H
        self.zero_grad()

    def forward(self, x):
        T = x.shape[0]
        H = self.H
        self._x = x
        self._i = np.zeros((T, H)); self._f = np.zeros((T, H))
        self._g = np.zeros((T, H)); self._o = np.zeros((T, H))
        self._c = np.zeros((T, H)); self._h = np.zeros((T, H))
        h = np.zeros(H)
        c = np.zeros(H)
        W, U, b = self.p["W"], self.p["U"], self.p["b"]
        for t in range(T):
            z = x[t] @ W + h @ U + b
            i = sigmoid(z[:H]); f = sigmoid(z[H:2 * H])
            g = np.tanh(z[2 * H:3 * H]); o = sigmoid(z[3 * H:])
            c = f * c + i * g
            h = o * np.tanh(c)
            self._i[t], self._f[t], self._g[t], self._o[t] = i, f, g, o
            self._c[t], self._h[t] = c, h
        return self._h

    def backward(self, dy):
        T = dy.shape[0]
        H = self.H
        x = self._x
        W, U = self.p["W"], self.p["U"]
        dx = np.zeros_like(x)
        dh_next = np.zeros(H)
        dc_next = np.zeros(H)
        for t in range(T - 1, -1, -1):
            i, f, g, o = self._i[t], self._f[t], self._g[t], self._o[t]
            c = self._c[t]
            c_prev = self._c[t - 1] if t > 0 else np.zeros(H)
            h_prev = self._h[t - 1] if t > 0 else np.zeros(H)
            dh = dy[t] + dh_next
            tc = np.tanh(c)
            do = dh * tc
            dc = dh * o * (1.0 - tc ** 2) + dc_next
            di = dc * g
            df = dc * c_prev
            dg = dc * i
            dc_next = dc * f
            dz = np.concatenate([
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                dg * (1.0 - g ** 2),
                do * o * (1.0 - o),
            ])
            self.g["W"] += np.outer(x[t], dz)
            self.g["U"] += np.outer(h_prev, dz)
            self.g["b"] += dz
            dx[t] = dz @ W.T
            dh_next = dz @ U.T
        return dx


class BiLSTM(Layer):
    """Forward and backward LSTMs, outputs concatenated to (T, 2H)."""

    def __init__(self, d_in: int, hidden: int, rng: np.random.Generator):
        super().__init__()
        self.fw = LSTM(d_in, hidden, rng)
        self.bw = LSTM(d_in, hidden, rng)
        self.H = hidden
        self.children = [self.fw, self.bw]

    def zero_grad(self):
        self.fw.zero_grad()
        self.bw.zero_grad()

    def forward(self, x):
        hf = self.fw.forward(x)
        hb = self.bw.forward(x[::-1])[::-1]
        return np.concatenate([hf, hb], axis=1)

    def backward(self, dy):
        H = self.H
        dxf = self.fw.backward(dy[:, :H])
        dxb = self.bw.backward(dy[::-1, H:])[::-1]
        return dxf + dxb


__all__ = ["LSTM", "BiLSTM"]

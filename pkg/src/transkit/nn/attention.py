"""Single-head scaled dot-product self-attention."""
from __future__ import annotations

import numpy as np

from .layers import Layer, softmax


class SelfAttention(Layer):
    """X (N, d) -> softmax(Q K^T / sqrt(dk)) V Wo, all projections learned."""

    def __init__(self, d_model: int, d_k: int, rng: np.random.Generator):
        super().__init__()
        s = 1.0 / np.sqrt(d_model)
        self.p["Wq"] = rng.normal(0.0, s, (d_model, d_k))
        self.p["Wk"] = rng.normal(0.0, s, (d_model, d_k))
        self.p["Wv"] = rng.normal(0.0, s, (d_model, d_k))
        self.p["Wo"] = rng.normal(0.0, 1.0 / np.sqrt(d_k), (d_k, d_model))
        self.d_k = d_k
        self.zero_grad()

    def forward(self, x):
        self._x = x
        self._Q = x @ self.p["Wq"]
        self._K = x @ self.p["Wk"]
        self._V = x @ self.p["Wv"]
        scores = self._Q @ self._K.T / np.sqrt(self.d_k)
        self._A = softmax(scores, axis=-1)
        self._H = self._A @ self._V
        return self._H @ self.p["Wo"]

    def backward(self, dy):
        x, A, V = self._x, self._A, self._V
        self.g["Wo"] += self._H.T @ dy
        dH = dy @ self.p["Wo"].T
        dA = dH @ V.T
        dV = A.T @ dH
        dS = (dA - (dA * A).sum(axis=-1, keepdims=True)) * A
        dS /= np.sqrt(self.d_k)
        dQ = dS @ self._K
        dK = dS.T @ self._Q
        self.g["Wq"] += x.T @ dQ
        self.g["Wk"] += x.T @ dK
        self.g["Wv"] += x.T @ dV
        return dQ @ self.p["Wq"].T + dK @ self.p["Wk"].T + dV @ self.p["Wv"].T


class PatchAttention(Layer):
    """Self-attention over coarse time-pitch patches of a (T, F, C) map.

    The map is average-pooled into (pt x pf) patches, each patch becomes one
    token of dimension C, attention output is unpooled back to the input
    resolution. Used as a residual branch at encoder-decoder bottlenecks.
    """

    def __init__(self, channels: int, rng: np.random.Generator,
                 pt: int = 4, pf: int = 4):
        super().__init__()
        self.attn = SelfAttention(channels, channels, rng)
        self.pt, self.pf = pt, pf
        self.children = [self.attn]

    def zero_grad(self):
        self.attn.zero_grad()

    def _pad(self, x):
        T, F, C = x.shape
        Tp = ((T + self.pt - 1) // self.pt) * self.pt
        Fp = ((F + self.pf - 1) // self.pf) * self.pf
        if (Tp, Fp) != (T, F):
            x = np.pad(x, ((0, Tp - T), (0, Fp - F), (0, 0)))
        return x, Tp, Fp

    def forward(self, x):
        self._in_shape = x.shape
        xp, Tp, Fp = self._pad(x)
        C = x.shape[2]
        nt, nf = Tp // self.pt, Fp // self.pf
        self._grid = (Tp, Fp, nt, nf, C)
        tokens = xp.reshape(nt, self.pt, nf, self.pf, C).mean(axis=(1, 3))
        y = self.attn.forward(tokens.reshape(nt * nf, C))
        y = y.reshape(nt, nf, C)
        out = np.repeat(np.repeat(y, self.pt, axis=0), self.pf, axis=1)
        T, F, _ = self._in_shape
        return out[:T, :F]

    def backward(self, dy):
        T, F, C = self._in_shape
        Tp, Fp, nt, nf, _ = self._grid
        dyp = np.zeros((Tp, Fp, C))
        dyp[:T, :F] = dy
        dtok = dyp.reshape(nt, self.pt, nf, self.pf, C).sum(axis=(1, 3))
        dtok = self.attn.backward(dtok.reshape(nt * nf, C)).reshape(nt, nf, C)
        dxp = np.repeat(np.repeat(dtok, self.pt, axis=0),
                        self.pf, axis=1) / (self.pt * self.pf)
        return dxp[:T, :F]


__all__ = ["SelfAttention", "PatchAttention"]

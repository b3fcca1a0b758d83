"""Task network definitions.

Every net exposes ``forward_logits(x)`` / ``backward(dlogits)`` and a
``layers`` dict used for parameter naming, counting and checkpoints.
Composite layers expose ``children`` so traversal stays recursive.
"""
from __future__ import annotations

import numpy as np

from ..nn import (
    AvgPool2, BinProject, BiLSTM, Conv2D, Dense, PatchAttention, PoolBins,
    ReLU, ResBlock, SelfAttention, Tanh, Upsample2, sigmoid, softmax,
)


def iter_named_params(layer, prefix: str):
    for k in sorted(layer.p):
        yield f"{prefix}.{k}", layer, k
    for i, child in enumerate(getattr(layer, "children", [])):
        yield from iter_named_params(child, f"{prefix}.{i}")


class Net:
    head = "sigmoid"

    def __init__(self):
        self.layers: dict[str, object] = {}

    def named_params(self):
        for name, layer in self.layers.items():
            yield from iter_named_params(layer, name)

    def zero_grad(self):
        for layer in self.layers.values():
            layer.zero_grad()

    def count_params(self) -> int:
        return sum(layer.p[k].size for _, layer, k in self.named_params())

    def forward_logits(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dy: np.ndarray) -> None:
        raise NotImplementedError

    def activate(self, logits: np.ndarray) -> np.ndarray:
        return softmax(logits) if self.head == "softmax" else sigmoid(logits)


class PitchedUNet(Net):
    """Conv encoder-decoder with a skip connection and an attention bottleneck.

    Input (T, in_bins, in_channels); output logits (T, pitch_bins, out).
    The bin axis is first projected onto the pitch-bin grid so the skip
    connection and the output head share one geometry.
    """

    def __init__(self, in_bins, in_channels, pitch_bins, out_channels,
                 width, rng):
        super().__init__()
        c = width
        self.binproj = BinProject(in_bins, pitch_bins, rng)
        self.conv_in = Conv2D(3, 3, in_channels, c, rng)
        self.relu_in = ReLU()
        self.enc1 = ResBlock(c, rng)
        self.pool = AvgPool2()
        self.enc2 = ResBlock(c, rng)
        self.attn = PatchAttention(c, rng, pt=4, pf=4)
        self.dec1 = ResBlock(c, rng)
        self.up = Upsample2()
        self.dec2 = ResBlock(c, rng)
        self.head_conv = Conv2D(1, 1, c, out_channels, rng)
        self.layers = {
            "binproj": self.binproj, "conv_in": self.conv_in,
            "enc1": self.enc1, "enc2": self.enc2, "attn": self.attn,
            "dec1": self.dec1, "dec2": self.dec2, "head": self.head_conv,
        }

    def forward_logits(self, x):
        h = self.binproj.forward(x)
        h = self.relu_in.forward(self.conv_in.forward(h))
        e1 = self.enc1.forward(h)
        e2 = self.enc2.forward(self.pool.forward(e1))
        b = e2 + self.attn.forward(e2)
        d1 = self.dec1.forward(b)
        u = self.up.forward(d1)
        self._e1_shape = e1.shape
        self._u_shape = u.shape
        u = u[: e1.shape[0], : e1.shape[1]]
        d2 = self.dec2.forward(u + e1)
        return self.head_conv.forward(d2)

    def backward(self, dy):
        d = self.dec2.backward(self.head_conv.backward(dy))
        du = np.zeros(self._u_shape)
        du[: self._e1_shape[0], : self._e1_shape[1]] = d
        db = self.dec1.backward(self.up.backward(du))
        de2 = db + self.attn.backward(db)
        de1 = self.pool.backward(self.enc2.backward(de2)) + d
        h = self.enc1.backward(de1)
        h = self.conv_in.backward(self.relu_in.backward(h))
        self.binproj.backward(h)


class DrumNet(Net):
    """Five conv layers, one temporal attention layer, three dense layers."""

    def __init__(self, in_bins, in_channels, n_classes, width, rng):
        super().__init__()
        c = width
        self.convs = [
            Conv2D(3, 3, in_channels, c, rng),
            Conv2D(3, 3, c, c, rng),
            Conv2D(3, 3, c, c, rng),
            Conv2D(3, 3, c, c, rng),
            Conv2D(3, 3, c, c, rng),
        ]
        self.relus = [ReLU() for _ in self.convs]
        self.pools = {1: PoolBins(4), 3: PoolBins(4)}
        bins = in_bins
        for _ in range(2):
            bins = (bins + 3) // 4
        self.frame_dim = bins * c
        self.attn = SelfAttention(self.frame_dim, min(16, self.frame_dim), rng)
        self.fc1 = Dense(self.frame_dim, 64, rng)
        self.fc_relu1 = ReLU()
        self.fc2 = Dense(64, 32, rng)
        self.fc_relu2 = ReLU()
        self.fc3 = Dense(32, n_classes, rng)
        self.layers = {f"conv{i}": conv for i, conv in enumerate(self.convs)}
        self.layers.update({"attn": self.attn, "fc1": self.fc1,
                            "fc2": self.fc2, "fc3": self.fc3})

    def forward_logits(self, x):
        h = x
        for i, conv in enumerate(self.convs):
            h = self.relus[i].forward(conv.forward(h))
            if i in self.pools:
                h = self.pools[i].forward(h)
        self._conv_out_shape = h.shape
        T = h.shape[0]
        flat = h.reshape(T, self.frame_dim)
        a = flat + self.attn.forward(flat)
        h1 = self.fc_relu1.forward(self.fc1.forward(a))
        h2 = self.fc_relu2.forward(self.fc2.forward(h1))
        return self.fc3.forward(h2)

    def backward(self, dy):
        d = self.fc3.backward(dy)
        d = self.fc2.backward(self.fc_relu2.backward(d))
        d = self.fc1.backward(self.fc_relu1.backward(d))
        d = d + self.attn.backward(d)
        h = d.reshape(self._conv_out_shape)
        for i in range(len(self.convs) - 1, -1, -1):
            if i in self.pools:
                h = self.pools[i].backward(h)
            h = self.convs[i].backward(self.relus[i].backward(h))


class VocalPitchNet(Net):
    """Small conv net emitting per-frame pitch salience logits (T, bins)."""

    def __init__(self, in_bins, in_channels, pitch_bins, width, rng):
        super().__init__()
        c = width
        self.conv_in = Conv2D(3, 3, in_channels, c, rng)
        self.relu = ReLU()
        self.res = ResBlock(c, rng)
        self.binproj = BinProject(in_bins, pitch_bins, rng)
        self.head_conv = Conv2D(1, 1, c, 1, rng)
        self.layers = {"conv_in": self.conv_in, "res": self.res,
                       "binproj": self.binproj, "head": self.head_conv}

    def forward_logits(self, x):
        h = self.relu.forward(self.conv_in.forward(x))
        h = self.res.forward(h)
        h = self.binproj.forward(h)
        return self.head_conv.forward(h)[:, :, 0]

    def backward(self, dy):
        d = self.head_conv.backward(dy[:, :, None])
        d = self.binproj.backward(d)
        d = self.res.backward(d)
        self.conv_in.backward(self.relu.backward(d))


class VocalSegNet(Net):
    """Conv-residual frame classifier emitting (voicing, onset) logits."""

    def __init__(self, in_bins, in_channels, width, rng):
        super().__init__()
        c = width
        self.conv_in = Conv2D(3, 3, in_channels, c, rng)
        self.relu = ReLU()
        self.res = ResBlock(c, rng)
        self.pool = PoolBins(8)
        bins = (in_bins + 7) // 8
        self.frame_dim = bins * c
        self.fc1 = Dense(self.frame_dim, 32, rng)
        self.fc_relu = ReLU()
        self.fc2 = Dense(32, 2, rng)
        self.layers = {"conv_in": self.conv_in, "res": self.res,
                       "fc1": self.fc1, "fc2": self.fc2}

    def forward_logits(self, x):
        h = self.relu.forward(self.conv_in.forward(x))
        h = self.pool.forward(self.res.forward(h))
        self._shape = h.shape
        flat = h.reshape(h.shape[0], self.frame_dim)
        return self.fc2.forward(self.fc_relu.forward(self.fc1.forward(flat)))

    def backward(self, dy):
        d = self.fc1.backward(self.fc_relu.backward(self.fc2.backward(dy)))
        h = self.res.backward(self.pool.backward(d.reshape(self._shape)))
        self.conv_in.backward(self.relu.backward(h))


class ChordNet(Net):
    """Encoder with a per-frame segmentation head, attention decoder with a
    25-way softmax head."""

    head = "softmax"

    def __init__(self, n_classes, width, rng):
        super().__init__()
        h = width
        self.enc1 = Dense(24, h, rng)
        self.tanh1 = Tanh()
        self.enc2 = Dense(h, h, rng)
        self.tanh2 = Tanh()
        self.seg = Dense(h, 1, rng)
        self.attn = SelfAttention(h, h, rng)
        self.out = Dense(h, n_classes, rng)
        self.layers = {"enc1": self.enc1, "enc2": self.enc2, "seg": self.seg,
                       "attn": self.attn, "out": self.out}

    def forward_logits(self, x):
        e = self.tanh1.forward(self.enc1.forward(x))
        e = self.tanh2.forward(self.enc2.forward(e))
        self._enc = e
        self._seg_logits = self.seg.forward(e)
        d = e + self.attn.forward(e)
        return self.out.forward(d)

    def segmentation_logits(self) -> np.ndarray:
        return self._seg_logits

    def backward(self, dy, dseg=None):
        d = self.out.backward(dy)
        de = d + self.attn.backward(d)
        if dseg is not None:
            de = de + self.seg.backward(dseg)
        de = self.enc2.backward(self.tanh2.backward(de))
        self.enc1.backward(self.tanh1.backward(de))


class BeatNet(Net):
    """Two-layer bidirectional LSTM, optional attention, 2-way sigmoid head."""

    def __init__(self, in_dim, hidden, width_unused, rng, attention=True):
        super().__init__()
        self.blstm1 = BiLSTM(in_dim, hidden, rng)
        self.blstm2 = BiLSTM(2 * hidden, hidden, rng)
        self.attention = attention
        self.layers = {"blstm1": self.blstm1, "blstm2": self.blstm2}
        if attention:
            self.attn = SelfAttention(2 * hidden, hidden, rng)
            self.layers["attn"] = self.attn
        self.fc = Dense(2 * hidden, 2, rng)
        self.layers["fc"] = self.fc

    def forward_logits(self, x):
        h = self.blstm2.forward(self.blstm1.forward(x))
        if self.attention:
            h = h + self.attn.forward(h)
        return self.fc.forward(h)

    def backward(self, dy):
        d = self.fc.backward(dy)
        if self.attention:
            d = d + self.attn.backward(d)
        self.blstm1.backward(self.blstm2.backward(d))


__all__ = [
    "Net", "PitchedUNet", "DrumNet", "VocalPitchNet", "VocalSegNet",
    "ChordNet", "BeatNet", "iter_named_params",
]

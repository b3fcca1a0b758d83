"""Model construction, inference and parameter counting."""
from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from ..features.chroma import ChromaFeature
from ..features.spectral import SpectralFeature
from ..features.symbolic import SymbolicFeature
from ..types import DRUM_CLASSES
from .nets import (
    BeatNet, ChordNet, DrumNet, Net, PitchedUNet, VocalPitchNet, VocalSegNet,
)

TASKS = ("music", "multi_instrument", "drum", "vocal_pitch", "vocal_seg",
         "chord", "beat")

TASK_OUT_CHANNELS = {
    "music": 3,
    "multi_instrument": 11,
    "drum": len(DRUM_CLASSES),
    "vocal_pitch": 352,
    "vocal_seg": 2,
    "chord": 25,
    "beat": 2,
}

TASK_DEFAULT_IN = {
    # (in_bins or in_dim, in_channels)
    "music": (513, 3),
    "multi_instrument": (513, 3),
    "drum": (369, 2),
    "vocal_pitch": (513, 3),
    "vocal_seg": (513, 3),
    "chord": (24, 1),
    "beat": (130, 1),
}


class ConfigError(ValueError):
    pass


class ContractError(ValueError):
    """Feature shape does not match the model contract."""


@dataclass(frozen=True)
class ModelConfig:
    task: str
    width: int = 8
    hidden: int = 25          # recurrent hidden size per direction
    pitch_bins: int = 352     # 88 semitones x 4 bins of 25 cents
    out_channels: int = 0     # 0 = derive from task
    in_bins: int = 0          # 0 = task default
    in_channels: int = 0
    attention: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}")
        if self.width <= 0 or self.hidden <= 0 or self.pitch_bins <= 0:
            raise ConfigError("dimensions must be positive")
        expected = TASK_OUT_CHANNELS[self.task]
        if self.task == "vocal_pitch":
            expected = self.pitch_bins
        if self.out_channels == 0:
            object.__setattr__(self, "out_channels", expected)
        elif self.out_channels != expected:
            raise ConfigError(
                f"task {self.task} requires out_channels={expected}, "
                f"got {self.out_channels}")
        d_bins, d_ch = TASK_DEFAULT_IN[self.task]
        if self.in_bins == 0:
            object.__setattr__(self, "in_bins", d_bins)
        if self.in_channels == 0:
            object.__setattr__(self, "in_channels", d_ch)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**d)


@dataclass
class Model:
    config: ModelConfig
    net: Net
    metadata: dict = field(default_factory=dict)


def build_model(config: ModelConfig) -> Model:
    """Deterministic construction: same config (incl. seed) -> same weights."""
    rng = np.random.default_rng(config.seed)
    c = config
    if c.task in ("music", "multi_instrument"):
        net = PitchedUNet(c.in_bins, c.in_channels, c.pitch_bins,
                          c.out_channels, c.width, rng)
    elif c.task == "drum":
        net = DrumNet(c.in_bins, c.in_channels, c.out_channels, c.width, rng)
    elif c.task == "vocal_pitch":
        net = VocalPitchNet(c.in_bins, c.in_channels, c.pitch_bins, c.width, rng)
    elif c.task == "vocal_seg":
        net = VocalSegNet(c.in_bins, c.in_channels, c.width, rng)
    elif c.task == "chord":
        net = ChordNet(c.out_channels, c.width, rng)
    elif c.task == "beat":
        net = BeatNet(c.in_bins, c.hidden, c.width, rng, attention=c.attention)
    else:  # pragma: no cover
        raise ConfigError(c.task)
    return Model(config, net)


def _feature_array(model: Model, feature) -> np.ndarray:
    c = model.config
    if isinstance(feature, SpectralFeature):
        x = feature.data
    elif isinstance(feature, ChromaFeature):
        x = feature.data
    elif isinstance(feature, SymbolicFeature):
        x = feature.stacked()
    else:
        x = np.asarray(feature, dtype=np.float64)
    if c.task in ("music", "multi_instrument", "drum", "vocal_pitch", "vocal_seg"):
        if x.ndim != 3 or x.shape[1] != c.in_bins or x.shape[2] != c.in_channels:
            raise ContractError(
                f"{c.task} expects (frames, {c.in_bins}, {c.in_channels}), "
                f"got {x.shape}")
    elif c.task == "chord":
        if x.ndim != 2 or x.shape[1] != 24:
            raise ContractError(f"chord expects (frames, 24), got {x.shape}")
    elif c.task == "beat":
        if x.ndim != 2 or x.shape[1] != c.in_bins:
            raise ContractError(
                f"beat expects (frames, {c.in_bins}), got {x.shape}")
    return x


def forward(model: Model, feature) -> np.ndarray:
    """Run inference; sigmoid/softmax head applied, frame count preserved."""
    x = _feature_array(model, feature)
    logits = model.net.forward_logits(x)
    return model.net.activate(logits)


def count_params(model: Model) -> int:
    return model.net.count_params()


__all__ = [
    "Model", "ModelConfig", "ConfigError", "ContractError", "TASKS",
    "TASK_OUT_CHANNELS", "build_model", "forward", "count_params",
]

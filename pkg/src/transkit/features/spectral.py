"""Spectrogram, generalized cepstrum (GC), GC-of-spectrum (GCoS) stack.

GC is the magnitude inverse DFT of the power-compressed magnitude spectrum
(x -> x**gamma) with low-quefrency bins zeroed; GCoS is the magnitude forward
DFT of the power-compressed GC with low-frequency bins zeroed. Both preserve
tensor shape. These definitions, together with the default gamma of 0.6 and
lifter cutoffs (2 ms quefrency / 27.5 Hz), are fixed conventions of this
package.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..audio import AudioClip
from ..types import TimeGrid

STACK_CHANNELS = ("spectrogram", "GC", "GCoS")

DEFAULT_GAMMA = 0.6
LIFTER_QUEFRENCY_S = 0.002
LIFTER_FREQ_HZ = 27.5


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralFeature:
    data: np.ndarray                  # (frames, freq_bins, channels), >= 0
    grid: TimeGrid
    channel_names: tuple[str, ...]
    sample_rate: int
    n_fft: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != 3:
            raise FeatureError("feature tensor must be (frames, bins, channels)")
        if d.shape[0] != self.grid.n_frames:
            raise FeatureError("frame count does not match grid")
        if not np.all(np.isfinite(d)) or d.min() < 0:
            raise FeatureError("feature values must be finite and non-negative")
        object.__setattr__(self, "data", d)


def compute_spectrogram(clip: AudioClip, window_s: float = 0.064,
                        hop_s: float = TimeGrid.HOP_MUSIC) -> SpectralFeature:
    """Magnitude STFT with a Hann window; frames = ceil(n_samples / hop)."""
    if not (window_s >= hop_s > 0):
        raise FeatureError("need window_s >= hop_s > 0")
    sr = clip.sample_rate
    win = int(round(window_s * sr))
    hop = int(round(hop_s * sr))
    x = clip.samples
    if len(x) < win:
        warnings.warn("clip shorter than one window; zero-padding", stacklevel=2)
    n_frames = max(1, int(np.ceil(len(x) / hop)))
    window = np.hanning(win)
    n_bins = win // 2 + 1
    out = np.zeros((n_frames, n_bins), dtype=np.float64)
    padded = np.concatenate([x, np.zeros(win)])
    for k in range(n_frames):
        frame = padded[k * hop: k * hop + win]
        if len(frame) < win:
            frame = np.concatenate([frame, np.zeros(win - len(frame))])
        out[k] = np.abs(np.fft.rfft(frame * window))
    grid = TimeGrid(hop_s, n_frames)
    return SpectralFeature(out[:, :, None], grid, ("spectrogram",), sr, win)


def _lifter_bins_quefrency(sr: int) -> int:
    return int(round(LIFTER_QUEFRENCY_S * sr))


def generalized_cepstrum(spec: SpectralFeature,
                         gamma: float = DEFAULT_GAMMA) -> SpectralFeature:
    """Per frame: |IDFT(spectrum**gamma)| truncated to the input bin count."""
    if gamma <= 0:
        raise FeatureError("gamma must be positive")
    n_bins = spec.data.shape[1]
    n_fft = max(spec.n_fft, 2 * (n_bins - 1))
    cut = _lifter_bins_quefrency(spec.sample_rate)
    channels = []
    for c in range(spec.data.shape[2]):
        compressed = spec.data[:, :, c] ** gamma
        gc = np.abs(np.fft.irfft(compressed, n=n_fft, axis=1))[:, :n_bins]
        gc[:, :cut] = 0.0
        channels.append(gc)
    data = np.stack(channels, axis=2)
    names = tuple(f"GC({n})" for n in spec.channel_names)
    return SpectralFeature(data, spec.grid, names, spec.sample_rate, spec.n_fft)


def _detrend_rows(x: np.ndarray, span: int = 65) -> np.ndarray:
    """Subtract a centered moving-average baseline per row, clip at zero.

    Without this the liftering step edge leaks broadband energy into the
    lowest output bins and buries the fundamental peak.
    """
    half = span // 2
    pad = np.pad(x, ((0, 0), (half, half)), mode="edge")
    kernel = np.ones(span) / span
    base = np.apply_along_axis(
        lambda r: np.convolve(r, kernel, mode="valid"), 1, pad)
    return np.maximum(x - base, 0.0)


def gcos(gc: SpectralFeature, gamma2: float = DEFAULT_GAMMA) -> SpectralFeature:
    """Per frame: |DFT(detrended GC**gamma2)|, low-frequency bins zeroed."""
    if gamma2 <= 0:
        raise FeatureError("gamma must be positive")
    n_bins = gc.data.shape[1]
    n_fft = max(gc.n_fft, 2 * (n_bins - 1))
    hz_per_bin = gc.sample_rate / n_fft
    cut = int(np.ceil(LIFTER_FREQ_HZ / hz_per_bin))
    channels = []
    for c in range(gc.data.shape[2]):
        compressed = _detrend_rows(gc.data[:, :, c] ** gamma2)
        sp = np.abs(np.fft.rfft(compressed, n=n_fft, axis=1))[:, :n_bins]
        sp[:, :cut] = 0.0
        channels.append(sp)
    data = np.stack(channels, axis=2)
    names = tuple(f"GCoS({n})" for n in gc.channel_names)
    return SpectralFeature(data, gc.grid, names, gc.sample_rate, gc.n_fft)


def feature_stack(clip: AudioClip, window_s: float = 0.064,
                  hop_s: float = TimeGrid.HOP_MUSIC,
                  gamma: float = DEFAULT_GAMMA,
                  gamma2: float = DEFAULT_GAMMA) -> SpectralFeature:
    """[spectrogram, GC, GCoS], each channel max-normalized to 1."""
    spec = compute_spectrogram(clip, window_s, hop_s)
    gc = generalized_cepstrum(spec, gamma)
    gs = gcos(gc, gamma2)
    stacked = np.concatenate([spec.data, gc.data, gs.data], axis=2)
    for c in range(3):
        peak = stacked[:, :, c].max()
        if peak > 0:
            stacked[:, :, c] /= peak
    return SpectralFeature(stacked, spec.grid, STACK_CHANNELS,
                           spec.sample_rate, spec.n_fft)


__all__ = [
    "SpectralFeature", "FeatureError", "compute_spectrogram",
    "generalized_cepstrum", "gcos", "feature_stack", "STACK_CHANNELS",
    "DEFAULT_GAMMA", "LIFTER_QUEFRENCY_S", "LIFTER_FREQ_HZ",
]

"""NNLS chromagram: 12 bass + 12 treble pitch classes per 230 ms frame.

Per frame we fit non-negative note activations a over the 88 piano keys so
that D @ a approximates the log-frequency magnitude spectrum s, where D holds
idealized harmonic note profiles (8 partials, geometric decay 0.6). The NNLS
solve is projected gradient descent with a 500-iteration cap and a 1e-6
relative-residual stopping rule. Activations below middle C fold into the
bass half, the rest into the treble half.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..audio import AudioClip
from ..types import N_SEMITONES, PITCH_MIN, TimeGrid
from .spectral import FeatureError

CHORD_HOP_S = TimeGrid.HOP_CHORD

N_PARTIALS = 8
PARTIAL_DECAY = 0.6
MAX_ITERS = 500
REL_TOL = 1e-6
BASS_SPLIT_MIDI = 60  # middle C


@dataclass(frozen=True)
class ChromaFeature:
    data: np.ndarray            # (frames, 24): columns 0-11 bass, 12-23 treble
    grid: TimeGrid
    converged: np.ndarray       # (frames,) bool

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != 2 or d.shape[1] != 24:
            raise FeatureError("chroma must be (frames, 24)")
        if d.min() < 0 or not np.all(np.isfinite(d)):
            raise FeatureError("chroma must be finite and non-negative")
        object.__setattr__(self, "data", d)


def note_frequency(midi: int) -> float:
    return 440.0 * 2.0 ** ((midi - 69) / 12.0)


def harmonic_dictionary() -> np.ndarray:
    """(88, 88) matrix: column j is the semitone profile of piano key j."""
    D = np.zeros((N_SEMITONES, N_SEMITONES))
    for j in range(N_SEMITONES):
        for h in range(1, N_PARTIALS + 1):
            offset = int(round(12 * np.log2(h)))
            row = j + offset
            if row < N_SEMITONES:
                D[row, j] += PARTIAL_DECAY ** (h - 1)
    return D


def log_frequency_spectrum(mag: np.ndarray, sr: int, n_fft: int) -> np.ndarray:
    """Fold an rfft magnitude spectrum onto the 88 semitone bins (A0..C8)."""
    freqs = np.arange(len(mag)) * sr / n_fft
    out = np.zeros(N_SEMITONES)
    for m in range(N_SEMITONES):
        f = note_frequency(PITCH_MIN + m)
        lo, hi = f * 2 ** (-0.5 / 12), f * 2 ** (0.5 / 12)
        mask = (freqs >= lo) & (freqs < hi)
        if mask.any():
            out[m] = mag[mask].sum()
    return out


def nnls_solve(D: np.ndarray, s: np.ndarray,
               max_iters: int = MAX_ITERS, rel_tol: float = REL_TOL):
    """Projected-gradient NNLS: min ||D a - s|| with a >= 0.

    Returns (a, converged). The result never has a larger residual than the
    zero vector since a = 0 is the starting iterate.
    """
    DtD = D.T @ D
    Dts = D.T @ s
    lip = np.linalg.norm(DtD, 2)
    if lip == 0:
        return np.zeros(D.shape[1]), True
    step = 1.0 / lip
    a = np.zeros(D.shape[1])
    prev_res = np.linalg.norm(s)
    if prev_res == 0:
        return a, True
    for _ in range(max_iters):
        a = np.maximum(0.0, a - step * (DtD @ a - Dts))
        res = np.linalg.norm(D @ a - s)
        if abs(prev_res - res) <= rel_tol * max(prev_res, 1e-12):
            return a, True
        prev_res = res
    return a, False


def fold_to_chroma(activations: np.ndarray) -> np.ndarray:
    """88 note activations -> 24-vector (12 bass then 12 treble)."""
    out = np.zeros(24)
    for m in range(N_SEMITONES):
        midi = PITCH_MIN + m
        pc = midi % 12
        half = 0 if midi < BASS_SPLIT_MIDI else 12
        out[half + pc] += activations[m]
    return out


def nnls_chroma(clip: AudioClip, hop_s: float = CHORD_HOP_S) -> ChromaFeature:
    sr = clip.sample_rate
    frame_len = int(round(hop_s * sr))
    if len(clip.samples) < frame_len:
        raise FeatureError("clip shorter than one chord frame")
    n_frames = len(clip.samples) // frame_len
    D = harmonic_dictionary()
    window = np.hanning(frame_len)
    data = np.zeros((n_frames, 24))
    converged = np.zeros(n_frames, dtype=bool)
    for k in range(n_frames):
        frame = clip.samples[k * frame_len: (k + 1) * frame_len]
        mag = np.abs(np.fft.rfft(frame * window))
        s = log_frequency_spectrum(mag, sr, frame_len)
        a, ok = nnls_solve(D, s)
        data[k] = fold_to_chroma(a)
        converged[k] = ok
    return ChromaFeature(data, TimeGrid(hop_s, n_frames), converged)


__all__ = [
    "ChromaFeature", "nnls_chroma", "nnls_solve", "harmonic_dictionary",
    "log_frequency_spectrum", "fold_to_chroma", "note_frequency",
    "CHORD_HOP_S", "BASS_SPLIT_MIDI",
]

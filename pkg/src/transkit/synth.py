"""Sonification: render symbolic objects back to audio for auditioning.

Pitched notes become 4-partial harmonic tones with exponential decay at their
equal-tempered frequency; drums become filtered noise bursts. Output is
peak-normalized.
"""
from __future__ import annotations

import numpy as np

from .audio import AudioClip
from .types import DrumEvent, MidiDocument, NoteEvent

SYNTH_SAMPLE_RATE = 16000
N_PARTIALS = 4
PARTIAL_AMP = 0.5       # geometric partial rolloff
DECAY_RATE = 3.0        # exponential amplitude decay, 1/s
DRUM_BURST_S = 0.050


def pitch_to_hz(pitch: int | float) -> float:
    return 440.0 * 2.0 ** ((pitch - 69) / 12.0)


def render_note(note: NoteEvent, sr: int) -> np.ndarray:
    n = max(1, int(round((note.offset_s - note.onset_s) * sr)))
    t = np.arange(n) / sr
    f0 = pitch_to_hz(note.pitch)
    env = np.exp(-DECAY_RATE * t)
    x = np.zeros(n)
    for h in range(1, N_PARTIALS + 1):
        if h * f0 < sr / 2:
            x += PARTIAL_AMP ** (h - 1) * np.sin(2 * np.pi * h * f0 * t)
    return x * env * (note.velocity / 127.0)


def _drum_burst(drum_class: str, sr: int, rng: np.random.Generator) -> np.ndarray:
    n = int(DRUM_BURST_S * sr)
    noise = rng.standard_normal(n)
    env = np.exp(-40.0 * np.arange(n) / sr)
    if drum_class == "kick":
        # heavy low-pass: cumulative moving average
        k = max(1, sr // 400)
        noise = np.convolve(noise, np.ones(k) / k, mode="same")
    elif drum_class == "hihat":
        noise = np.diff(noise, prepend=0.0)  # emphasize highs
    else:  # snare: light band-pass
        k = max(1, sr // 4000)
        noise = np.convolve(noise, np.ones(k) / k, mode="same")
        noise = np.diff(noise, prepend=0.0)
    peak = np.abs(noise).max()
    return noise / peak * env if peak > 0 else noise


def sonify(doc: MidiDocument, sr: int = SYNTH_SAMPLE_RATE,
           pad_s: float = 0.05) -> AudioClip:
    """Additive-synthesis rendering of a document; silent if empty."""
    dur = doc.duration_s() + pad_s
    n = max(1, int(round(dur * sr)))
    out = np.zeros(n)
    for note in doc.all_notes():
        start = int(round(note.onset_s * sr))
        tone = render_note(note, sr)
        end = min(n, start + len(tone))
        out[start:end] += tone[: end - start]
    peak = np.abs(out).max()
    if peak > 0:
        out = out / peak * 0.9
    return AudioClip(out, sr)


def sonify_drums(events: list[DrumEvent], duration_s: float,
                 sr: int = SYNTH_SAMPLE_RATE, seed: int = 0) -> AudioClip:
    rng = np.random.default_rng(seed)
    n = max(1, int(round(duration_s * sr)))
    out = np.zeros(n)
    for e in sorted(events, key=lambda e: e.onset_s):
        burst = _drum_burst(e.drum_class, sr, rng)
        start = int(round(e.onset_s * sr))
        end = min(n, start + len(burst))
        out[start:end] += burst[: end - start]
    peak = np.abs(out).max()
    if peak > 0:
        out = out / peak * 0.9
    return AudioClip(out, sr)


def render_click_track(bpm: float, duration_s: float,
                       sr: int = SYNTH_SAMPLE_RATE) -> AudioClip:
    """Short decaying clicks on the beat grid; handy test fixture."""
    n = int(round(duration_s * sr))
    out = np.zeros(n)
    period = 60.0 / bpm
    t = 0.0
    burst_n = int(0.01 * sr)
    burst = np.sin(2 * np.pi * 1000.0 * np.arange(burst_n) / sr) * \
        np.exp(-200.0 * np.arange(burst_n) / sr)
    while t < duration_s:
        start = int(round(t * sr))
        end = min(n, start + burst_n)
        out[start:end] += burst[: end - start]
        t += period
    return AudioClip(out * 0.9, sr)


__all__ = [
    "sonify", "sonify_drums", "render_note", "render_click_track",
    "pitch_to_hz", "SYNTH_SAMPLE_RATE",
]

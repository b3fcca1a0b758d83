"""Beat-informed spectrogram preprocessing for the drum pipeline.

Appends a beat-phase channel in [0, 1): tempo from the autocorrelation of the
onset-strength envelope, beat placement by dynamic programming, phase = the
elapsed fraction of the current inter-beat interval.
"""
from __future__ import annotations

import numpy as np

from .spectral import SpectralFeature

MIN_BPM = 40.0
MAX_BPM = 240.0
DP_TIGHTNESS = 100.0


def onset_strength(spec_data: np.ndarray) -> np.ndarray:
    """Positive spectral flux of channel 0, per frame."""
    x = spec_data[:, :, 0]
    env = np.zeros(x.shape[0])
    env[1:] = np.maximum(x[1:] - x[:-1], 0.0).sum(axis=1)
    return env


def estimate_tempo_lag(env: np.ndarray, hop_s: float) -> int | None:
    """Autocorrelation peak lag (frames), or None when the envelope is flat."""
    if env.std() < 1e-12:
        return None
    e = env - env.mean()
    ac = np.correlate(e, e, mode="full")[len(e) - 1:]
    lo = max(1, int(round(60.0 / (MAX_BPM * hop_s))))
    hi = min(len(ac) - 1, int(round(60.0 / (MIN_BPM * hop_s))))
    if hi <= lo:
        return None
    lag = lo + int(np.argmax(ac[lo:hi + 1]))
    if ac[lag] <= 0:
        return None
    return lag


def dp_beat_track(env: np.ndarray, period: int) -> list[int]:
    """Dynamic-programming beat placement at roughly the given frame period."""
    n = len(env)
    score = env.copy()
    backlink = np.full(n, -1, dtype=np.int64)
    window = np.arange(max(1, period // 2), 2 * period + 1)
    for k in range(n):
        prev = k - window
        valid = prev >= 0
        if not valid.any():
            continue
        txcost = -DP_TIGHTNESS * np.log(window[valid] / period) ** 2
        cand = score[prev[valid]] + txcost
        best = int(np.argmax(cand))
        if cand[best] > 0:
            score[k] += cand[best]
            backlink[k] = prev[valid][best]
    beats = [int(np.argmax(score))]
    while backlink[beats[-1]] >= 0:
        beats.append(int(backlink[beats[-1]]))
    return sorted(beats)


def beat_informed_preprocess(spec: SpectralFeature) -> SpectralFeature:
    """Return spec with one extra channel of beat phase (zeros on failure)."""
    n_frames, n_bins, _ = spec.data.shape
    env = onset_strength(spec.data)
    lag = estimate_tempo_lag(env, spec.grid.hop_s)
    phase = np.zeros(n_frames)
    meta = dict(spec.meta)
    if lag is None or n_frames < 2 * lag:
        meta["beat_tracking_failed"] = True
    else:
        beats = dp_beat_track(env, lag)
        meta["beat_tracking_failed"] = False
        meta["tempo_bpm"] = 60.0 / (lag * spec.grid.hop_s)
        meta["beat_frames"] = beats
        for i, b in enumerate(beats):
            nxt = beats[i + 1] if i + 1 < len(beats) else b + lag
            span = max(nxt - b, 1)
            for k in range(b, min(nxt, n_frames)):
                phase[k] = (k - b) / span
        # before the first beat, count down toward it with the same period
        first = beats[0]
        for k in range(first):
            phase[k] = ((k - first) % lag) / lag
    data = np.concatenate(
        [spec.data, np.repeat(phase[:, None, None], n_bins, axis=1)], axis=2)
    return SpectralFeature(data, spec.grid,
                           spec.channel_names + ("beat_phase",),
                           spec.sample_rate, spec.n_fft, meta)


__all__ = ["beat_informed_preprocess", "onset_strength",
           "estimate_tempo_lag", "dp_beat_track"]

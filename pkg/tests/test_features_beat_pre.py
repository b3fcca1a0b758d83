import numpy as np
import pytest

from transkit.data import click_track_document
from transkit.features.beat_pre import (
    beat_informed_preprocess, dp_beat_track, estimate_tempo_lag,
    onset_strength,
)
from transkit.features.spectral import compute_spectrogram
from transkit.synth import sonify

SR = 16000
HOP = 0.010


def _click_spec(bpm=120.0, n_beats=8):
    clip = sonify(click_track_document(bpm, n_beats), SR)
    return compute_spectrogram(clip, 0.046, HOP)


def test_onset_strength_nonnegative_and_peaky():
    spec = _click_spec()
    env = onset_strength(spec.data)
    assert (env >= 0).all()
    # energy arrives in bursts around the click onsets (every 50 frames)
    assert env[:3].max() > np.median(env) * 5


def test_tempo_lag_recovers_click_period():
    spec = _click_spec(bpm=120.0)
    lag = estimate_tempo_lag(onset_strength(spec.data), HOP)
    assert lag is not None
    assert abs(lag - 50) <= 2  # 0.5 s period at 10 ms hop


def test_tempo_lag_none_on_flat_envelope():
    assert estimate_tempo_lag(np.zeros(500), HOP) is None


def test_dp_beat_track_period_spacing():
    env = np.zeros(400)
    env[::50] = 1.0
    beats = dp_beat_track(env, 50)
    gaps = np.diff(beats)
    assert len(beats) >= 6
    assert (np.abs(gaps - 50) <= 2).all()


def test_preprocess_appends_phase_channel():
    spec = _click_spec()
    out = beat_informed_preprocess(spec)
    assert out.data.shape[2] == spec.data.shape[2] + 1
    assert out.channel_names[-1] == "beat_phase"
    assert out.meta["beat_tracking_failed"] is False
    assert out.meta["tempo_bpm"] == pytest.approx(120.0, rel=0.05)
    phase = out.data[:, 0, -1]
    assert phase.min() >= 0.0 and phase.max() < 1.0 + 1e-12


def test_preprocess_flags_failure_on_silence():
    from transkit.audio import AudioClip
    spec = compute_spectrogram(AudioClip(np.zeros(SR), SR), 0.046, HOP)
    out = beat_informed_preprocess(spec)
    assert out.meta["beat_tracking_failed"] is True
    assert (out.data[:, :, -1] == 0).all()

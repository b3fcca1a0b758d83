import numpy as np
import pytest

from transkit.synth import (
    SYNTH_SAMPLE_RATE, pitch_to_hz, render_click_track, render_note, sonify,
    sonify_drums,
)
from transkit.types import DrumEvent, MidiDocument, NoteEvent, NoteStream


def _peak_hz(x, sr):
    mag = np.abs(np.fft.rfft(x * np.hanning(len(x))))
    return mag.argmax() * sr / len(x)


def test_pitch_to_hz():
    assert pitch_to_hz(69) == pytest.approx(440.0)
    assert pitch_to_hz(81) == pytest.approx(880.0)


def test_render_note_fundamental_dominates():
    note = NoteEvent(0.0, 0.5, 69)
    x = render_note(note, SYNTH_SAMPLE_RATE)
    assert len(x) == 8000
    assert _peak_hz(x, SYNTH_SAMPLE_RATE) == pytest.approx(440.0, abs=4.0)


def test_sonify_places_note_in_time():
    doc = MidiDocument((NoteStream("piano", (NoteEvent(0.5, 1.0, 60),)),))
    clip = sonify(doc, SYNTH_SAMPLE_RATE)
    sr = SYNTH_SAMPLE_RATE
    assert np.abs(clip.samples[: int(0.45 * sr)]).max() == 0.0
    assert np.abs(clip.samples[int(0.55 * sr): int(0.9 * sr)]).max() > 0.1
    assert np.abs(clip.samples).max() <= 0.9 + 1e-9


def test_sonify_empty_document():
    clip = sonify(MidiDocument(()), SYNTH_SAMPLE_RATE)
    assert (clip.samples == 0).all()


def test_sonify_drums_bursts_at_onsets():
    clip = sonify_drums([DrumEvent(0.2, "kick"), DrumEvent(0.6, "snare")],
                        1.0, SYNTH_SAMPLE_RATE)
    sr = SYNTH_SAMPLE_RATE
    assert np.abs(clip.samples[: int(0.15 * sr)]).max() == 0.0
    assert np.abs(clip.samples[int(0.2 * sr): int(0.26 * sr)]).max() > 0.01
    assert len(clip.samples) == sr


def test_click_track_beat_spacing():
    clip = render_click_track(120.0, 2.0, SYNTH_SAMPLE_RATE)
    env = np.abs(clip.samples)
    sr = SYNTH_SAMPLE_RATE
    # clicks at 0, 0.5, 1.0, 1.5
    for k in range(4):
        assert env[int(k * 0.5 * sr): int(k * 0.5 * sr) + 200].max() > 0.05

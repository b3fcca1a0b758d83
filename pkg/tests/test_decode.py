"""Activation decoders: worked examples, round trips, monotonicity."""
import numpy as np
import pytest

from transkit.data import random_music_document
from transkit.decode import (
    DecodeError, DecodeParams, decode_beats, decode_chords, decode_drums,
    decode_multi_instrument, decode_piano_notes, decode_vocal,
)
from transkit.metrics import note_f1
from transkit.pianoroll import render_note_targets
from transkit.types import CHORD_LABELS, INSTRUMENTS, TimeGrid

HOP = 0.020


def _act_for_note(t0, t1, pitch, frames=50, bins=352):
    """Ideal 3-channel activation for one note on the 20 ms grid."""
    a = np.zeros((frames, bins, 3))
    b = (pitch - 21) * 4
    k0, k1 = int(round(t0 / HOP)), int(round(t1 / HOP)) - 1
    a[k0:k1 + 1, b:b + 4, 0] = 1.0
    a[k0, b:b + 4, 1] = 1.0
    a[k1, b:b + 4, 2] = 1.0
    return a


def test_single_note_round_trip():
    act = _act_for_note(0.10, 0.30, 60)
    notes = decode_piano_notes(act)
    assert len(notes) == 1
    n = notes[0]
    assert n.pitch == 60
    assert n.onset_s == pytest.approx(0.10)
    assert n.offset_s == pytest.approx(0.30)


def test_params_validation():
    with pytest.raises(DecodeError):
        DecodeParams(act_threshold=1.5)
    with pytest.raises(DecodeError):
        DecodeParams(min_note_s=-1)
    with pytest.raises(DecodeError):
        decode_piano_notes(np.zeros((5, 352, 2)))


def test_short_blip_dropped():
    act = _act_for_note(0.10, 0.12, 60)  # one frame, below min_note_s=0.05
    assert decode_piano_notes(act) == []


def test_merge_gap_bridges_dip():
    act = _act_for_note(0.10, 0.40, 60)
    b = (60 - 21) * 4
    act[10, b:b + 4, 0] = 0.0  # one-frame dip == merge_gap_s / hop
    notes = decode_piano_notes(act)
    assert len(notes) == 1
    assert notes[0].offset_s == pytest.approx(0.40)


def test_long_gap_truncates_note():
    act = _act_for_note(0.10, 0.40, 60)
    act[:, :, 2] = 0.0  # no offset cue; rely on sustain
    b = (60 - 21) * 4
    act[9:12, b:b + 4, 0] = 0.0  # three-frame gap > merge gap
    notes = decode_piano_notes(act)
    assert len(notes) == 1
    assert notes[0].offset_s == pytest.approx(0.18)


def test_second_onset_splits_sustain():
    act = np.zeros((40, 352, 3))
    b = (70 - 21) * 4
    act[5:25, b:b + 4, 0] = 1.0
    act[5, b:b + 4, 1] = 1.0
    act[15, b:b + 4, 1] = 1.0
    notes = decode_piano_notes(act)
    assert [n.onset_s for n in notes] == pytest.approx([0.10, 0.30])


def test_round_trip_random_documents():
    rng = np.random.default_rng(8)
    for _ in range(20):
        doc = random_music_document(rng)
        grid = TimeGrid(HOP, 110)
        act = render_note_targets(doc, grid)
        got = decode_piano_notes(act)
        rep = note_f1(doc.all_notes(), got, onset_tol_s=HOP + 1e-9)
        assert rep.f1 == 1.0


def test_multi_instrument_streams():
    act = np.zeros((50, 352, 11))
    pi, vi = INSTRUMENTS.index("piano"), INSTRUMENTS.index("violin")
    b = (60 - 21) * 4
    act[5:15, b:b + 4, pi] = 1.0
    act[20:30, b + 40:b + 44, vi] = 1.0
    streams = decode_multi_instrument(act)
    got = {s.instrument: s.notes for s in streams}
    assert set(got) == {"piano", "violin"}
    assert got["piano"][0].pitch == 60
    assert got["violin"][0].pitch == 70
    assert got["piano"][0].onset_s == pytest.approx(0.10)


def test_drum_peaks_and_separation():
    act = np.zeros((100, 3))
    act[10, 0] = 0.9
    act[12, 0] = 0.8   # within 50 ms of the stronger peak at 10: dropped
    act[30, 1] = 0.7
    events = decode_drums(act, hop_s=0.010)
    assert [(e.onset_s, e.drum_class) for e in events] == [
        (pytest.approx(0.10), "kick"), (pytest.approx(0.30), "snare")]


def test_drum_plateau_takes_first_frame():
    act = np.zeros((50, 3))
    act[20:23, 2] = 0.8
    events = decode_drums(act, hop_s=0.010)
    assert len(events) == 1
    assert events[0].onset_s == pytest.approx(0.20)


def test_vocal_segments_and_pitch_median():
    frames = 60
    sal = np.zeros((frames, 352))
    seg = np.zeros((frames, 2))
    b = (65 - 21) * 4
    sal[5:25, b] = 1.0
    seg[5:25, 0] = 1.0
    seg[5, 1] = 1.0
    notes = decode_vocal(sal, seg)
    assert len(notes) == 1
    assert notes[0].pitch == 65
    assert notes[0].onset_s == pytest.approx(0.10)


def test_vocal_onset_peak_splits_run():
    frames = 40
    sal = np.zeros((frames, 352))
    seg = np.zeros((frames, 2))
    sal[5:35, (60 - 21) * 4] = 1.0
    seg[5:35, 0] = 1.0
    seg[5, 1] = 1.0
    seg[20, 1] = 1.0
    notes = decode_vocal(sal, seg)
    assert len(notes) == 2


def test_chords_merge_and_partition():
    probs = np.zeros((6, 25))
    probs[:3, 0] = 1.0   # C:maj
    probs[3:, 24] = 1.0  # N
    segs = decode_chords(probs)
    assert len(segs) == 2
    assert segs[0].label == "C:maj" and segs[1].label == "N"
    assert segs[0].start_s == 0.0
    assert segs[0].end_s == pytest.approx(segs[1].start_s)
    assert segs[1].end_s == pytest.approx(6 * 0.230)


def test_chords_tie_breaks_to_lower_index():
    probs = np.full((2, 25), 1.0 / 25)
    segs = decode_chords(probs)
    assert segs[0].label == CHORD_LABELS[0]


def test_chords_reject_unnormalized():
    with pytest.raises(DecodeError):
        decode_chords(np.ones((3, 25)))


def test_beats_peaks_and_downbeats():
    probs = np.zeros((200, 2))
    for k in (10, 60, 110, 160):
        probs[k, 0] = 0.9
    probs[10, 1] = 0.8
    ann = decode_beats(probs, hop_s=0.010)
    assert ann.beats_s == pytest.approx((0.10, 0.60, 1.10, 1.60))
    assert ann.downbeats_s == pytest.approx((0.10,))


def test_beats_min_separation():
    probs = np.zeros((100, 2))
    probs[10, 0] = 0.9
    probs[15, 0] = 0.8  # 50 ms later: below the 200 ms separation floor
    ann = decode_beats(probs, hop_s=0.010)
    assert len(ann.beats_s) == 1


def test_activation_threshold_monotonicity_piano():
    # with onsets fixed and no offset cue, raising act_threshold can only
    # shorten or drop notes, never create them
    rng = np.random.default_rng(3)
    for _ in range(10):
        act = rng.uniform(0, 1, (40, 352, 3)) ** 2
        act[:, :, 2] = 0.0
        counts = [len(decode_piano_notes(act, DecodeParams(act_threshold=t)))
                  for t in (0.3, 0.5, 0.7, 0.9)]
        assert counts == sorted(counts, reverse=True)


def test_threshold_monotonicity_drums_and_beats():
    rng = np.random.default_rng(4)
    for _ in range(10):
        drum = rng.uniform(0, 1, (80, 3))
        beat = rng.uniform(0, 1, (80, 2))
        d_counts = [len(decode_drums(drum, DecodeParams(act_threshold=t)))
                    for t in (0.3, 0.5, 0.7, 0.9)]
        b_counts = [len(decode_beats(beat, DecodeParams(act_threshold=t)).beats_s)
                    for t in (0.3, 0.5, 0.7, 0.9)]
        assert d_counts == sorted(d_counts, reverse=True)
        assert b_counts == sorted(b_counts, reverse=True)

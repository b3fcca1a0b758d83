"""SMF reader/writer: hand-built byte fixtures plus a round-trip property."""
import struct

import numpy as np
import pytest

from transkit.data import random_music_document
from transkit.midi_io import MidiParseError, read_midi, write_midi
from transkit.types import MidiDocument, NoteEvent, NoteStream

TPQ = 480
TICK_S = 0.5 / TPQ  # at the default 120 BPM


def _track(events: bytes) -> bytes:
    body = events + b"\x00\xff\x2f\x00"
    return b"MTrk" + struct.pack(">I", len(body)) + body


def _file(tracks: list[bytes], fmt: int = 1) -> bytes:
    return (b"MThd" + struct.pack(">IHHH", 6, fmt, len(tracks), TPQ)
            + b"".join(tracks))


def test_read_single_note():
    # note on ch0 pitch 60 vel 80 at t=0, note off after 480 ticks
    ev = b"\x00\x90\x3c\x50" + b"\x83\x60\x80\x3c\x00"
    doc = read_midi(_file([_track(ev)]))
    notes = doc.all_notes()
    assert len(notes) == 1
    n = notes[0]
    assert n.pitch == 60 and n.velocity == 80
    assert n.onset_s == pytest.approx(0.0)
    assert n.offset_s == pytest.approx(0.5)


def test_note_on_velocity_zero_is_note_off():
    ev = b"\x00\x90\x3c\x50" + b"\x83\x60\x90\x3c\x00"
    doc = read_midi(_file([_track(ev)]))
    assert doc.all_notes()[0].offset_s == pytest.approx(0.5)


def test_running_status():
    ev = (b"\x00\x90\x3c\x50"      # on 60
          b"\x00\x40\x50"          # running status: on 64
          b"\x83\x60\x3c\x00"      # off 60
          b"\x00\x40\x00")         # off 64
    notes = read_midi(_file([_track(ev)])).all_notes()
    assert sorted(n.pitch for n in notes) == [60, 64]


def test_tempo_change_scales_later_notes():
    # 480 ticks at 120 BPM, then tempo 60 BPM, then 480 more ticks
    ev = (b"\x00\xff\x51\x03" + (500000).to_bytes(3, "big")
          + b"\x00\x90\x3c\x50"
          + b"\x83\x60\xff\x51\x03" + (1000000).to_bytes(3, "big")
          + b"\x00\x80\x3c\x00"
          + b"\x00\x90\x3e\x50" + b"\x83\x60\x80\x3e\x00")
    notes = read_midi(_file([_track(ev)])).all_notes()
    by_pitch = {n.pitch: n for n in notes}
    assert by_pitch[60].offset_s == pytest.approx(0.5)
    assert by_pitch[62].onset_s == pytest.approx(0.5)
    assert by_pitch[62].offset_s == pytest.approx(1.5)


def test_unclosed_note_ends_at_track_end():
    ev = b"\x00\x90\x3c\x50" + b"\x83\x60\x90\x3e\x50" + b"\x83\x60\x80\x3e\x00"
    notes = read_midi(_file([_track(ev)])).all_notes()
    by_pitch = {n.pitch: n for n in notes}
    assert by_pitch[60].offset_s == pytest.approx(1.0)


def test_channel_10_maps_to_drums():
    ev = b"\x00\x99\x24\x50" + b"\x83\x60\x89\x24\x00"
    doc = read_midi(_file([_track(ev)]))
    assert doc.streams[0].instrument == "drums"


def test_bad_header_raises_with_offset():
    with pytest.raises(MidiParseError) as e:
        read_midi(b"RIFF" + b"\x00" * 20)
    assert e.value.offset == 0


def test_truncated_track_raises():
    data = _file([_track(b"\x00\x90\x3c\x50\x83\x60\x80\x3c\x00")])
    with pytest.raises(MidiParseError):
        read_midi(data[:-3])


def test_write_read_one_note_exact_on_grid():
    doc = MidiDocument((NoteStream("piano",
                                   (NoteEvent(0.25, 0.75, 72, velocity=99),)),))
    got = read_midi(write_midi(doc)).all_notes()[0]
    assert got.pitch == 72 and got.velocity == 99
    assert got.onset_s == pytest.approx(0.25, abs=TICK_S)
    assert got.offset_s == pytest.approx(0.75, abs=TICK_S)


def test_round_trip_property_100_documents():
    rng = np.random.default_rng(0)
    for _ in range(100):
        doc = random_music_document(rng, n_notes=int(rng.integers(1, 9)))
        back = read_midi(write_midi(doc))
        ref, got = doc.all_notes(), back.all_notes()
        assert len(ref) == len(got)
        for a, b in zip(ref, got):
            assert a.pitch == b.pitch
            assert abs(a.onset_s - b.onset_s) <= TICK_S
            assert abs(a.offset_s - b.offset_s) <= TICK_S


def test_round_trip_preserves_instruments():
    doc = MidiDocument((
        NoteStream("violin", (NoteEvent(0.0, 0.5, 70),)),
        NoteStream("drums", (NoteEvent(0.0, 0.1, 36),)),
    ))
    back = read_midi(write_midi(doc))
    assert {s.instrument for s in back.streams} == {"violin", "drums"}

"""Domain type invariants."""
import pytest

from transkit.types import (
    BeatAnnotation, CHORD_LABELS, ChordSegment, DRUM_CLASSES, DrumEvent,
    INSTRUMENTS, InvalidEventError, MidiDocument, NoteEvent, NoteStream,
    PITCH_MAX, PITCH_MIN, TimeGrid, chord_label_index,
)


def test_note_event_accepts_piano_range_extremes():
    NoteEvent(0.0, 0.1, PITCH_MIN)
    NoteEvent(0.0, 0.1, PITCH_MAX)


@pytest.mark.parametrize("kwargs", [
    dict(onset_s=-0.1, offset_s=0.1, pitch=60),
    dict(onset_s=0.2, offset_s=0.2, pitch=60),
    dict(onset_s=0.2, offset_s=0.1, pitch=60),
    dict(onset_s=0.0, offset_s=0.1, pitch=PITCH_MIN - 1),
    dict(onset_s=0.0, offset_s=0.1, pitch=PITCH_MAX + 1),
    dict(onset_s=0.0, offset_s=0.1, pitch=60, velocity=0),
    dict(onset_s=0.0, offset_s=0.1, pitch=60, velocity=128),
    dict(onset_s=0.0, offset_s=0.1, pitch=60, confidence=1.5),
])
def test_note_event_rejects_invalid(kwargs):
    with pytest.raises(InvalidEventError):
        NoteEvent(**kwargs)


def test_note_stream_sorts_notes():
    a = NoteEvent(0.5, 0.7, 60)
    b = NoteEvent(0.1, 0.3, 64)
    s = NoteStream("piano", (a, b))
    assert [n.onset_s for n in s.notes] == [0.1, 0.5]


def test_note_stream_rejects_same_pitch_overlap():
    with pytest.raises(InvalidEventError):
        NoteStream("piano", (NoteEvent(0.0, 1.0, 60),
                             NoteEvent(0.5, 1.5, 60)))


def test_note_stream_allows_cross_pitch_overlap():
    NoteStream("piano", (NoteEvent(0.0, 1.0, 60), NoteEvent(0.5, 1.5, 61)))


def test_document_all_notes_sorted_and_duration():
    doc = MidiDocument((
        NoteStream("piano", (NoteEvent(0.5, 0.9, 60),)),
        NoteStream("violin", (NoteEvent(0.1, 1.2, 70),)),
    ))
    assert [n.pitch for n in doc.all_notes()] == [70, 60]
    assert doc.duration_s() == 1.2
    assert MidiDocument(()).duration_s() == 0.0


def test_drum_event_rejects_unknown_class():
    DrumEvent(0.1, "kick")
    with pytest.raises(InvalidEventError):
        DrumEvent(0.1, "tambourine")


def test_chord_segment_rejects_bad_label_and_order():
    ChordSegment(0.0, 1.0, "C:maj")
    with pytest.raises(InvalidEventError):
        ChordSegment(0.0, 1.0, "C:dom7")
    with pytest.raises(InvalidEventError):
        ChordSegment(1.0, 1.0, "N")


def test_beat_annotation_downbeats_must_be_beats():
    BeatAnnotation((0.0, 0.5, 1.0), (0.0, 1.0))
    with pytest.raises(InvalidEventError):
        BeatAnnotation((0.0, 0.5), (0.25,))


def test_time_grid_frame_mapping():
    g = TimeGrid(0.020, 100)
    assert g.frame_of(0.0) == 0
    assert g.frame_of(0.020) == 1  # boundary belongs to the later frame
    assert g.frame_of(0.0399) == 1
    assert g.duration_s() == pytest.approx(2.0)
    with pytest.raises(InvalidEventError):
        TimeGrid(0.0, 10)


def test_vocabularies():
    assert len(INSTRUMENTS) == 11
    assert len(CHORD_LABELS) == 25
    assert CHORD_LABELS[-1] == "N"
    assert chord_label_index("C:maj") == 0
    assert chord_label_index("N") == 24
    assert len(DRUM_CLASSES) == 3

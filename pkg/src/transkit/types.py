"""Canonical data model shared by every task: notes, streams, drums, chords, beats.

All types are frozen dataclasses; operations elsewhere treat them as values.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

PITCH_MIN = 21   # A0
PITCH_MAX = 108  # C8
N_SEMITONES = PITCH_MAX - PITCH_MIN + 1  # 88 piano keys

DEFAULT_VELOCITY = 80

# Channel order of the multi-instrument model output.
INSTRUMENTS = (
    "piano", "violin", "viola", "cello", "flute", "horn",
    "bassoon", "clarinet", "harpsichord", "contrabass", "oboe",
)

# General MIDI program used when writing each instrument to file.
INSTRUMENT_PROGRAMS = {
    "piano": 0, "violin": 40, "viola": 41, "cello": 42, "flute": 73,
    "horn": 60, "bassoon": 70, "clarinet": 71, "harpsichord": 6,
    "contrabass": 43, "oboe": 68,
}
PROGRAM_INSTRUMENTS = {v: k for k, v in INSTRUMENT_PROGRAMS.items()}

DRUM_CLASSES = ("kick", "snare", "hihat")
DRUM_NOTES = {"kick": 36, "snare": 38, "hihat": 42}

PITCH_CLASSES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")
# 12 major, 12 minor, then no-chord; index order is the model's class order.
CHORD_LABELS = tuple(f"{pc}:maj" for pc in PITCH_CLASSES) + \
    tuple(f"{pc}:min" for pc in PITCH_CLASSES) + ("N",)


class InvalidEventError(ValueError):
    """A domain object violates its invariants."""


@dataclass(frozen=True)
class NoteEvent:
    """One transcribed note; the universal output unit."""

    onset_s: float
    offset_s: float
    pitch: int
    velocity: int = DEFAULT_VELOCITY
    instrument: str = "piano"
    confidence: float = 1.0

    def __post_init__(self):
        if self.onset_s < 0:
            raise InvalidEventError(f"onset {self.onset_s} < 0")
        if self.offset_s <= self.onset_s:
            raise InvalidEventError(
                f"offset {self.offset_s} must exceed onset {self.onset_s}")
        if not (PITCH_MIN <= self.pitch <= PITCH_MAX):
            raise InvalidEventError(f"pitch {self.pitch} outside {PITCH_MIN}..{PITCH_MAX}")
        if not (1 <= self.velocity <= 127):
            raise InvalidEventError(f"velocity {self.velocity} outside 1..127")
        if not (0.0 <= self.confidence <= 1.0):
            raise InvalidEventError(f"confidence {self.confidence} outside [0,1]")


@dataclass(frozen=True)
class NoteStream:
    """Notes of one instrument, sorted by onset, no same-pitch overlap."""

    instrument: str
    notes: tuple[NoteEvent, ...]

    def __post_init__(self):
        notes = tuple(sorted(self.notes, key=lambda n: (n.onset_s, n.pitch)))
        object.__setattr__(self, "notes", notes)
        last_off: dict[int, float] = {}
        for n in notes:
            if n.pitch in last_off and n.onset_s < last_off[n.pitch] - 1e-9:
                raise InvalidEventError(
                    f"same-pitch overlap at pitch {n.pitch}, onset {n.onset_s}")
            last_off[n.pitch] = max(last_off.get(n.pitch, 0.0), n.offset_s)


@dataclass(frozen=True)
class MidiDocument:
    streams: tuple[NoteStream, ...]
    tempo_bpm: float = 120.0
    ticks_per_quarter: int = 480

    def __post_init__(self):
        if self.tempo_bpm <= 0:
            raise InvalidEventError(f"tempo {self.tempo_bpm} must be positive")
        if self.ticks_per_quarter <= 0:
            raise InvalidEventError("ticks_per_quarter must be positive")

    def all_notes(self) -> list[NoteEvent]:
        out: list[NoteEvent] = []
        for s in self.streams:
            out.extend(s.notes)
        out.sort(key=lambda n: (n.onset_s, n.pitch))
        return out

    def duration_s(self) -> float:
        notes = self.all_notes()
        return max((n.offset_s for n in notes), default=0.0)


@dataclass(frozen=True)
class DrumEvent:
    onset_s: float
    drum_class: str
    confidence: float = 1.0

    def __post_init__(self):
        if self.onset_s < 0:
            raise InvalidEventError("drum onset < 0")
        if self.drum_class not in DRUM_CLASSES:
            raise InvalidEventError(f"unknown drum class {self.drum_class!r}")


@dataclass(frozen=True)
class ChordSegment:
    start_s: float
    end_s: float
    label: str

    def __post_init__(self):
        if self.end_s <= self.start_s:
            raise InvalidEventError("chord segment must have positive length")
        if self.label not in CHORD_LABELS:
            raise InvalidEventError(f"unknown chord label {self.label!r}")


@dataclass(frozen=True)
class BeatAnnotation:
    beats_s: tuple[float, ...]
    downbeats_s: tuple[float, ...] = ()

    def __post_init__(self):
        beats = tuple(self.beats_s)
        downs = tuple(self.downbeats_s)
        object.__setattr__(self, "beats_s", beats)
        object.__setattr__(self, "downbeats_s", downs)
        for seq, name in ((beats, "beats"), (downs, "downbeats")):
            if any(b >= a for a, b in zip(seq[1:], seq)):
                raise InvalidEventError(f"{name} must be strictly increasing")
        for d in downs:
            if not any(abs(d - b) <= 1e-6 for b in beats):
                raise InvalidEventError(f"downbeat {d} is not a beat")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform frame grid; frame k spans [k*hop_s, (k+1)*hop_s)."""

    hop_s: float
    n_frames: int

    HOP_MUSIC = 0.020
    HOP_DRUM = 0.010
    HOP_BEAT = 0.010
    HOP_CHORD = 0.230

    def __post_init__(self):
        if self.hop_s <= 0:
            raise InvalidEventError("hop must be positive")
        if self.n_frames <= 0:
            raise InvalidEventError("n_frames must be positive")

    def frame_of(self, t_s: float) -> int:
        return int(t_s / self.hop_s + 1e-9)

    def duration_s(self) -> float:
        return self.hop_s * self.n_frames


def chord_label_index(label: str) -> int:
    return CHORD_LABELS.index(label)


__all__ = [
    "NoteEvent", "NoteStream", "MidiDocument", "DrumEvent", "ChordSegment",
    "BeatAnnotation", "TimeGrid", "InvalidEventError",
    "PITCH_MIN", "PITCH_MAX", "N_SEMITONES", "INSTRUMENTS",
    "INSTRUMENT_PROGRAMS", "PROGRAM_INSTRUMENTS", "DRUM_CLASSES",
    "DRUM_NOTES", "CHORD_LABELS", "chord_label_index", "replace", "field",
]

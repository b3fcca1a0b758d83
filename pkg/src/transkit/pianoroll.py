"""Piano-roll rendering: MidiDocument -> binary activation tensors.

Frame membership is half-open: a note occupies frame k iff its
[onset, offset) interval intersects [k*hop, (k+1)*hop) with positive length.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import MidiDocument, NoteEvent, PITCH_MIN, PITCH_MAX, TimeGrid

_EPS = 1e-9


@dataclass(frozen=True)
class PitchAxis:
    """Pitch-bin layout of a roll tensor."""

    low: int = PITCH_MIN
    high: int = PITCH_MAX
    bins_per_semitone: int = 1

    @property
    def n_bins(self) -> int:
        return (self.high - self.low + 1) * self.bins_per_semitone

    def bins_of(self, pitch: int) -> range:
        s = (pitch - self.low) * self.bins_per_semitone
        return range(s, s + self.bins_per_semitone)

    @classmethod
    def midi128(cls) -> "PitchAxis":
        return cls(low=0, high=127, bins_per_semitone=1)

    @classmethod
    def quarter_tone(cls) -> "PitchAxis":
        # 88 semitones x 4 bins of 25 cents = 352
        return cls(bins_per_semitone=4)


def note_frame_span(note: NoteEvent, grid: TimeGrid) -> tuple[int, int]:
    """Inclusive frame range [k_on, k_last] a note occupies on the grid."""
    k_on = int(note.onset_s / grid.hop_s + _EPS)
    k_last = int(np.ceil(note.offset_s / grid.hop_s - _EPS)) - 1
    return k_on, max(k_last, k_on)


def midi_to_pianoroll(doc: MidiDocument, grid: TimeGrid,
                      axis: PitchAxis | None = None) -> np.ndarray:
    """Render a binary (frames, bins, 2) tensor: channel 0 sounding, 1 onset.

    Notes outside the axis range are dropped; use
    :func:`midi_to_pianoroll_counted` to get the dropped count.
    """
    roll, _ = midi_to_pianoroll_counted(doc, grid, axis)
    return roll


def midi_to_pianoroll_counted(doc: MidiDocument, grid: TimeGrid,
                              axis: PitchAxis | None = None):
    axis = axis or PitchAxis()
    roll = np.zeros((grid.n_frames, axis.n_bins, 2), dtype=np.float64)
    dropped = 0
    for note in doc.all_notes():
        if not (axis.low <= note.pitch <= axis.high):
            dropped += 1
            continue
        k_on, k_last = note_frame_span(note, grid)
        if k_on >= grid.n_frames:
            dropped += 1
            continue
        k_last = min(k_last, grid.n_frames - 1)
        for b in axis.bins_of(note.pitch):
            roll[k_on:k_last + 1, b, 0] = 1.0
            roll[k_on, b, 1] = 1.0
    return roll, dropped


def render_note_targets(doc: MidiDocument, grid: TimeGrid,
                        axis: PitchAxis | None = None) -> np.ndarray:
    """Ideal 3-channel target [activation, onset, offset] for pitched models."""
    axis = axis or PitchAxis.quarter_tone()
    target = np.zeros((grid.n_frames, axis.n_bins, 3), dtype=np.float64)
    for note in doc.all_notes():
        if not (axis.low <= note.pitch <= axis.high):
            continue
        k_on, k_last = note_frame_span(note, grid)
        if k_on >= grid.n_frames:
            continue
        k_last = min(k_last, grid.n_frames - 1)
        for b in axis.bins_of(note.pitch):
            target[k_on:k_last + 1, b, 0] = 1.0
            target[k_on, b, 1] = 1.0
            target[k_last, b, 2] = 1.0
    return target


def render_multi_targets(doc: MidiDocument, grid: TimeGrid,
                         instruments: tuple[str, ...]) -> np.ndarray:
    """Ideal (frames, 352, n_instruments) activation rolls, one channel each."""
    axis = PitchAxis.quarter_tone()
    target = np.zeros((grid.n_frames, axis.n_bins, len(instruments)), dtype=np.float64)
    for stream in doc.streams:
        if stream.instrument not in instruments:
            continue
        ch = instruments.index(stream.instrument)
        for note in stream.notes:
            if not (axis.low <= note.pitch <= axis.high):
                continue
            k_on, k_last = note_frame_span(note, grid)
            if k_on >= grid.n_frames:
                continue
            k_last = min(k_last, grid.n_frames - 1)
            for b in axis.bins_of(note.pitch):
                target[k_on:k_last + 1, b, ch] = 1.0
    return target


__all__ = [
    "PitchAxis", "midi_to_pianoroll", "midi_to_pianoroll_counted",
    "render_note_targets", "render_multi_targets", "note_frame_span",
]

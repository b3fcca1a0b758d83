"""Decoders: activation tensors -> notes, streams, drum events, chords, beats.

All thresholds, minimum durations and tie-breaks here are package
conventions; the models only fix resolutions and channel semantics.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import (
    BeatAnnotation, CHORD_LABELS, ChordSegment, DRUM_CLASSES, DrumEvent,
    INSTRUMENTS, NoteEvent, NoteStream, PITCH_MIN, TimeGrid,
)

DRUM_MIN_SEPARATION_S = 0.050
BEAT_MIN_SEPARATION_S = 0.200


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class DecodeParams:
    act_threshold: float = 0.5
    onset_threshold: float = 0.5
    min_note_s: float = 0.05
    merge_gap_s: float = 0.02

    def __post_init__(self):
        if not (0 < self.act_threshold < 1 and 0 < self.onset_threshold < 1):
            raise DecodeError("thresholds must lie in (0,1)")
        if self.min_note_s < 0 or self.merge_gap_s < 0:
            raise DecodeError("durations must be non-negative")


def _semitone_reduce(act: np.ndarray) -> np.ndarray:
    """(frames, 352) quarter-tone bins -> (frames, 88) by intra-semitone max."""
    T, B = act.shape
    if B % 4 != 0:
        raise DecodeError(f"pitch bins {B} not a multiple of 4")
    return act.reshape(T, B // 4, 4).max(axis=2)


def _sustain_end(act_row: np.ndarray, start: int, thr: float,
                 max_gap: int) -> int:
    """Last frame (inclusive) of the note starting at `start`.

    Sub-threshold dips no longer than `max_gap` frames are bridged.
    """
    t = start
    last_good = start
    n = len(act_row)
    while t < n:
        if act_row[t] >= thr:
            last_good = t
            t += 1
        else:
            run = 0
            while t + run < n and act_row[t + run] < thr:
                run += 1
            if run > max_gap:
                break
            t += run
    return last_good


def _decode_pitch_channel(act: np.ndarray, onset: np.ndarray,
                          offset: np.ndarray | None, hop_s: float,
                          p: DecodeParams, instrument: str) -> list[NoteEvent]:
    """Shared note decoding for one (frames, 88) semitone activation map."""
    T, S = act.shape
    max_gap = int(round(p.merge_gap_s / hop_s))
    min_frames = max(1, int(round(p.min_note_s / hop_s)))
    notes: list[NoteEvent] = []
    for s in range(S):
        onset_frames = [t for t in range(T) if onset[t, s] >= p.onset_threshold
                        and (t == 0 or onset[t - 1, s] < p.onset_threshold)]
        for i, t0 in enumerate(onset_frames):
            if act[t0, s] < p.act_threshold:
                continue
            limit = onset_frames[i + 1] if i + 1 < len(onset_frames) else T
            end = _sustain_end(act[:limit, s], t0, p.act_threshold, max_gap)
            if offset is not None:
                # end at the first offset-channel local max >= threshold
                for t in range(t0, end + 1):
                    v = offset[t, s]
                    if v >= p.act_threshold and \
                            (t + 1 > end or v >= offset[t + 1, s]) and \
                            (t == t0 or v > offset[t - 1, s]):
                        end = t
                        break
            n_frames = end - t0 + 1
            if n_frames < min_frames:
                continue
            conf = float(np.clip(act[t0:end + 1, s].mean(), 0.0, 1.0))
            notes.append(NoteEvent(t0 * hop_s, (end + 1) * hop_s,
                                   PITCH_MIN + s, instrument=instrument,
                                   confidence=conf))
    notes.sort(key=lambda n: (n.onset_s, n.pitch))
    return notes


def decode_piano_notes(act: np.ndarray, p: DecodeParams = DecodeParams(),
                       hop_s: float = TimeGrid.HOP_MUSIC,
                       instrument: str = "piano") -> list[NoteEvent]:
    """(frames, 352, 3) [activation, onset, offset] -> note list."""
    act = np.asarray(act, dtype=np.float64)
    if act.ndim != 3 or act.shape[2] != 3:
        raise DecodeError(f"expected (frames, bins, 3), got {act.shape}")
    a = _semitone_reduce(act[:, :, 0])
    on = _semitone_reduce(act[:, :, 1])
    off = _semitone_reduce(act[:, :, 2])
    return _decode_pitch_channel(a, on, off, hop_s, p, instrument)


def decode_multi_instrument(act: np.ndarray,
                            p: DecodeParams = DecodeParams(),
                            hop_s: float = TimeGrid.HOP_MUSIC) -> list[NoteStream]:
    """(frames, 352, 11) piano rolls -> per-instrument note streams.

    Onsets come from rising edges of the activation crossing act_threshold.
    """
    act = np.asarray(act, dtype=np.float64)
    if act.ndim != 3 or act.shape[2] != len(INSTRUMENTS):
        raise DecodeError(
            f"expected (frames, bins, {len(INSTRUMENTS)}), got {act.shape}")
    streams = []
    for ch, inst in enumerate(INSTRUMENTS):
        a = _semitone_reduce(act[:, :, ch])
        rising = np.zeros_like(a)
        above = a >= p.act_threshold
        rising[0] = above[0]
        rising[1:] = above[1:] & ~above[:-1]
        notes = _decode_pitch_channel(a, rising.astype(float), None,
                                      hop_s, p, inst)
        if notes:
            streams.append(NoteStream(inst, tuple(notes)))
    return streams


def _peaks(x: np.ndarray, thr: float, min_sep: int) -> list[int]:
    """Strict local maxima >= thr, left-to-right, >= min_sep frames apart.

    A plateau counts once, at its first frame.
    """
    cand = []
    n = len(x)
    for t in range(n):
        if x[t] < thr:
            continue
        if t > 0 and x[t - 1] >= x[t] and x[t - 1] >= thr:
            continue  # not the start of its plateau / rising flank
        if t > 0 and x[t - 1] > x[t]:
            continue
        # find plateau end; must drop after it (or hit the boundary)
        u = t
        while u + 1 < n and x[u + 1] == x[t]:
            u += 1
        if u + 1 < n and x[u + 1] > x[t]:
            continue
        cand.append(t)
    kept: list[int] = []
    for t in cand:
        if not kept or t - kept[-1] >= min_sep:
            kept.append(t)
    return kept


def decode_drums(act: np.ndarray, p: DecodeParams = DecodeParams(),
                 hop_s: float = TimeGrid.HOP_DRUM) -> list[DrumEvent]:
    """(frames, classes) onset activations -> drum events on the 10 ms grid."""
    act = np.asarray(act, dtype=np.float64)
    if act.ndim != 2 or act.shape[1] != len(DRUM_CLASSES):
        raise DecodeError(
            f"expected (frames, {len(DRUM_CLASSES)}), got {act.shape}")
    min_sep = max(1, int(round(DRUM_MIN_SEPARATION_S / hop_s)))
    events = []
    for c, name in enumerate(DRUM_CLASSES):
        for t in _peaks(act[:, c], p.act_threshold, min_sep):
            events.append(DrumEvent(t * hop_s, name, float(min(act[t, c], 1.0))))
    events.sort(key=lambda e: (e.onset_s, e.drum_class))
    return events


def decode_vocal(pitch_salience: np.ndarray, seg: np.ndarray,
                 p: DecodeParams = DecodeParams(),
                 hop_s: float = TimeGrid.HOP_MUSIC,
                 instrument: str = "piano") -> list[NoteEvent]:
    """Salience (frames, bins) + segmentation (frames, 2 [voicing, onset])."""
    sal = np.asarray(pitch_salience, dtype=np.float64)
    seg = np.asarray(seg, dtype=np.float64)
    if sal.shape[0] != seg.shape[0]:
        raise DecodeError(
            f"frame mismatch: salience {sal.shape[0]} vs seg {seg.shape[0]}")
    if seg.ndim != 2 or seg.shape[1] != 2:
        raise DecodeError(f"expected seg (frames, 2), got {seg.shape}")
    T = sal.shape[0]
    bins_per_semi = sal.shape[1] // 88 if sal.shape[1] % 88 == 0 else 1
    voiced = seg[:, 0] >= p.act_threshold
    onset_peaks = set(_peaks(seg[:, 1], p.onset_threshold, 1))
    min_frames = max(1, int(round(p.min_note_s / hop_s)))

    notes = []
    t = 0
    while t < T:
        if not voiced[t]:
            t += 1
            continue
        start = t
        t += 1
        while t < T and voiced[t] and t not in onset_peaks:
            t += 1
        end = t  # exclusive
        if end - start >= min_frames:
            bins = sal[start:end].argmax(axis=1)
            semis = np.round(np.median(bins) / bins_per_semi).astype(int)
            pitch = int(PITCH_MIN + min(semis, 87))
            conf = float(np.clip(seg[start:end, 0].mean(), 0.0, 1.0))
            notes.append(NoteEvent(start * hop_s, end * hop_s, pitch,
                                   instrument=instrument, confidence=conf))
    return notes


def decode_chords(probs: np.ndarray,
                  grid: TimeGrid | None = None) -> list[ChordSegment]:
    """(frames, 25) row-normalized distributions -> merged chord segments.

    Per-frame argmax (ties -> lower class index), equal consecutive labels
    merged; the segments exactly partition [0, frames * hop].
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2 or probs.shape[1] != len(CHORD_LABELS):
        raise DecodeError(
            f"expected (frames, {len(CHORD_LABELS)}), got {probs.shape}")
    if np.abs(probs.sum(axis=1) - 1.0).max() > 1e-4:
        raise DecodeError("rows are not normalized distributions")
    grid = grid or TimeGrid(TimeGrid.HOP_CHORD, probs.shape[0])
    if grid.n_frames != probs.shape[0]:
        raise DecodeError("grid frame count mismatch")
    labels = probs.argmax(axis=1)  # argmax takes the lowest index on ties
    segments = []
    start = 0
    for k in range(1, len(labels) + 1):
        if k == len(labels) or labels[k] != labels[start]:
            segments.append(ChordSegment(start * grid.hop_s, k * grid.hop_s,
                                         CHORD_LABELS[labels[start]]))
            start = k
    return segments


def decode_beats(probs: np.ndarray, p: DecodeParams = DecodeParams(),
                 hop_s: float = TimeGrid.HOP_BEAT) -> BeatAnnotation:
    """(frames, 2 [beat, downbeat]) -> beat/downbeat times in seconds."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2 or probs.shape[1] != 2:
        raise DecodeError(f"expected (frames, 2), got {probs.shape}")
    min_sep = max(1, int(round(BEAT_MIN_SEPARATION_S / hop_s)))
    beat_frames = _peaks(probs[:, 0], p.act_threshold, min_sep)
    beats = tuple(t * hop_s for t in beat_frames)
    downs = tuple(t * hop_s for t in beat_frames
                  if probs[t, 1] >= p.act_threshold)
    return BeatAnnotation(beats, downs)


__all__ = [
    "DecodeParams", "DecodeError", "decode_piano_notes",
    "decode_multi_instrument", "decode_drums", "decode_vocal",
    "decode_chords", "decode_beats",
]

"""Symbolic features for beat tracking: piano roll, spectral flux, IOI."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..pianoroll import PitchAxis, midi_to_pianoroll
from ..types import MidiDocument, TimeGrid
from .spectral import FeatureError

BEAT_HOP_S = TimeGrid.HOP_BEAT
IOI_CLIP_S = 4.0


@dataclass(frozen=True)
class SymbolicFeature:
    pianoroll: np.ndarray      # (frames, 128) binary
    spectral_flux: np.ndarray  # (frames, 1) >= 0
    ioi: np.ndarray            # (frames, 1) seconds since last onset, <= 4 s
    grid: TimeGrid

    def __post_init__(self):
        n = self.grid.n_frames
        if not (self.pianoroll.shape == (n, 128)
                and self.spectral_flux.shape == (n, 1)
                and self.ioi.shape == (n, 1)):
            raise FeatureError("component frame counts disagree")

    def stacked(self) -> np.ndarray:
        """(frames, 130) network input."""
        return np.concatenate(
            [self.pianoroll, self.spectral_flux, self.ioi], axis=1)


def midi_symbolic_features(doc: MidiDocument,
                           hop_s: float = BEAT_HOP_S) -> SymbolicFeature:
    notes = doc.all_notes()
    if not notes:
        raise FeatureError("no notes")
    n_frames = max(1, int(np.ceil(doc.duration_s() / hop_s)))
    grid = TimeGrid(hop_s, n_frames)
    roll2 = midi_to_pianoroll(doc, grid, PitchAxis.midi128())
    roll = roll2[:, :, 0]

    flux = np.zeros((n_frames, 1))
    flux[0, 0] = roll[0].sum()
    diff = roll[1:] - roll[:-1]
    flux[1:, 0] = np.maximum(diff, 0.0).sum(axis=1)

    onsets = np.array(sorted({n.onset_s for n in notes}))
    ioi = np.full((n_frames, 1), IOI_CLIP_S)
    times = np.arange(n_frames) * hop_s
    idx = np.searchsorted(onsets, times + 1e-9) - 1
    has_prev = idx >= 0
    ioi[has_prev, 0] = np.minimum(
        times[has_prev] - onsets[idx[has_prev]], IOI_CLIP_S)
    return SymbolicFeature(roll, flux, ioi, grid)


__all__ = ["SymbolicFeature", "midi_symbolic_features", "BEAT_HOP_S", "IOI_CLIP_S"]

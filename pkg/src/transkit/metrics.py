"""Note-, frame-, chord- and beat-level evaluation metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import BeatAnnotation, ChordSegment, NoteEvent

NOTE_ONSET_TOL_S = 0.050
BEAT_TOL_S = 0.070


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricReport:
    precision: float
    recall: float
    f1: float
    n_ref: int
    n_est: int
    n_match: int

    def to_record(self) -> str:
        """Flat key=value text record, one metric per line."""
        return "\n".join(f"{k}={getattr(self, k)}" for k in
                         ("precision", "recall", "f1",
                          "n_ref", "n_est", "n_match"))


def _report(n_ref: int, n_est: int, n_match: int) -> MetricReport:
    p = n_match / n_est if n_est else 0.0
    r = n_match / n_ref if n_ref else 0.0
    f1 = 2 * p * r / (p + r) if (p + r) > 0 else 0.0
    return MetricReport(p, r, f1, n_ref, n_est, n_match)


def frame_f1(ref: np.ndarray, est: np.ndarray) -> MetricReport:
    """Cell-wise precision/recall over two binary tensors of equal shape."""
    ref = np.asarray(ref)
    est = np.asarray(est)
    if ref.shape != est.shape:
        raise MetricError(f"shape mismatch {ref.shape} vs {est.shape}")
    r = ref > 0.5
    e = est > 0.5
    return _report(int(r.sum()), int(e.sum()), int((r & e).sum()))


def _max_bipartite(n_ref: int, adj: list[list[int]]) -> int:
    """Maximum one-to-one matching size via augmenting paths."""
    match_e: dict[int, int] = {}

    def augment(i: int, seen: set[int]) -> bool:
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in match_e or augment(match_e[j], seen):
                match_e[j] = i
                return True
        return False

    n = 0
    for i in range(n_ref):
        if augment(i, set()):
            n += 1
    return n


def note_f1(ref: list[NoteEvent], est: list[NoteEvent],
            onset_tol_s: float = NOTE_ONSET_TOL_S) -> MetricReport:
    """Maximum one-to-one matching; pitch must be exact,
    |onset difference| <= tolerance; offsets ignored."""
    adj = [[j for j, e in enumerate(est)
            if r.pitch == e.pitch and abs(r.onset_s - e.onset_s) <= onset_tol_s]
           for r in ref]
    return _report(len(ref), len(est), _max_bipartite(len(ref), adj))


def chord_accuracy(ref: list[ChordSegment], est: list[ChordSegment]) -> float:
    """Duration-weighted fraction of time both partitions carry one label."""
    if not ref or not est:
        raise MetricError("empty segmentation")
    dur_r = max(s.end_s for s in ref)
    dur_e = max(s.end_s for s in est)
    if abs(dur_r - dur_e) > 1e-3:
        raise MetricError(f"duration mismatch: {dur_r} vs {dur_e}")
    bounds = sorted({s.start_s for s in ref} | {s.end_s for s in ref}
                    | {s.start_s for s in est} | {s.end_s for s in est})

    def label_at(segs, t):
        for s in segs:
            if s.start_s <= t < s.end_s:
                return s.label
        return None

    agree = 0.0
    for a, b in zip(bounds, bounds[1:]):
        mid = (a + b) / 2
        if label_at(ref, mid) == label_at(est, mid):
            agree += b - a
    return agree / dur_r


def _match_times(ref, est, tol):
    adj = [[j for j, e in enumerate(est) if abs(r - e) <= tol] for r in ref]
    return _max_bipartite(len(ref), adj)


def beat_f_measure(ref: BeatAnnotation, est: BeatAnnotation,
                   tol_s: float = BEAT_TOL_S) -> tuple[MetricReport, MetricReport]:
    """(beat report, downbeat report); one-to-one matching within +-tol."""
    beat = _report(len(ref.beats_s), len(est.beats_s),
                   _match_times(ref.beats_s, est.beats_s, tol_s))
    down = _report(len(ref.downbeats_s), len(est.downbeats_s),
                   _match_times(ref.downbeats_s, est.downbeats_s, tol_s))
    return beat, down


__all__ = [
    "MetricReport", "MetricError", "frame_f1", "note_f1", "chord_accuracy",
    "beat_f_measure", "NOTE_ONSET_TOL_S", "BEAT_TOL_S",
]

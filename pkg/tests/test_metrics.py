"""Metric identities, symmetry, and an exhaustive matching oracle."""
import itertools

import numpy as np
import pytest

from transkit.metrics import (
    MetricError, beat_f_measure, chord_accuracy, frame_f1, note_f1,
)
from transkit.types import BeatAnnotation, ChordSegment, NoteEvent


def _note(onset, pitch):
    return NoteEvent(onset, onset + 0.2, pitch)


# identity: every metric is exactly 1 on identical inputs

def test_frame_f1_identity():
    rng = np.random.default_rng(0)
    x = (rng.uniform(size=(30, 88)) > 0.7).astype(float)
    assert frame_f1(x, x).f1 == 1.0


def test_note_f1_identity():
    notes = [_note(0.1 * i, 60 + i) for i in range(5)]
    assert note_f1(notes, notes).f1 == 1.0


def test_chord_accuracy_identity():
    segs = [ChordSegment(0.0, 1.0, "C:maj"), ChordSegment(1.0, 2.0, "N")]
    assert chord_accuracy(segs, segs) == 1.0


def test_beat_f_measure_identity():
    ann = BeatAnnotation((0.0, 0.5, 1.0), (0.0,))
    b, d = beat_f_measure(ann, ann)
    assert b.f1 == 1.0 and d.f1 == 1.0


# worked examples

def test_frame_f1_counts():
    ref = np.array([[1, 1, 0, 0]], dtype=float)
    est = np.array([[1, 0, 1, 0]], dtype=float)
    r = frame_f1(ref, est)
    assert (r.n_ref, r.n_est, r.n_match) == (2, 2, 1)
    assert r.f1 == pytest.approx(0.5)
    with pytest.raises(MetricError):
        frame_f1(np.zeros((2, 3)), np.zeros((3, 2)))


def test_note_f1_onset_tolerance_boundary():
    ref = [_note(1.000, 60)]
    assert note_f1(ref, [_note(1.049, 60)]).f1 == 1.0
    assert note_f1(ref, [_note(1.051, 60)]).f1 == 0.0
    assert note_f1(ref, [_note(1.000, 61)]).f1 == 0.0


def test_note_f1_one_to_one_matching():
    ref = [_note(1.0, 60)]
    est = [_note(0.99, 60), _note(1.01, 60)]
    r = note_f1(ref, est)
    assert r.n_match == 1
    assert r.precision == pytest.approx(0.5)
    assert r.recall == 1.0


def test_note_f1_empty_lists():
    r = note_f1([], [_note(0.0, 60)])
    assert r.f1 == 0.0 and r.recall == 0.0
    assert note_f1([], []).f1 == 0.0


def test_chord_accuracy_partial_overlap():
    ref = [ChordSegment(0.0, 2.0, "C:maj")]
    est = [ChordSegment(0.0, 1.0, "C:maj"), ChordSegment(1.0, 2.0, "D:maj")]
    assert chord_accuracy(ref, est) == pytest.approx(0.5)


def test_chord_accuracy_duration_mismatch():
    with pytest.raises(MetricError):
        chord_accuracy([ChordSegment(0.0, 2.0, "N")],
                       [ChordSegment(0.0, 1.0, "N")])


def test_beat_tolerance_70ms():
    ref = BeatAnnotation((1.0, 2.0))
    est = BeatAnnotation((1.069, 2.071))
    b, _ = beat_f_measure(ref, est)
    assert b.n_match == 1


# ref/est swap leaves F1 unchanged

def test_note_f1_swap_symmetry_100_cases():
    rng = np.random.default_rng(9)
    for _ in range(100):
        ref = [_note(float(rng.uniform(0, 3)), int(rng.integers(55, 70)))
               for _ in range(rng.integers(0, 6))]
        est = [_note(float(rng.uniform(0, 3)), int(rng.integers(55, 70)))
               for _ in range(rng.integers(0, 6))]
        assert note_f1(ref, est).f1 == pytest.approx(note_f1(est, ref).f1)


def test_frame_f1_swap_symmetry_100_cases():
    rng = np.random.default_rng(10)
    for _ in range(100):
        a = (rng.uniform(size=(6, 8)) > 0.5).astype(float)
        b = (rng.uniform(size=(6, 8)) > 0.5).astype(float)
        assert frame_f1(a, b).f1 == pytest.approx(frame_f1(b, a).f1)


# exhaustive matching oracle

def _max_matching(ref, est, tol):
    """Best one-to-one match count by trying every injective assignment."""
    feasible = {(i, j) for i, r in enumerate(ref) for j, e in enumerate(est)
                if r.pitch == e.pitch and abs(r.onset_s - e.onset_s) <= tol}
    best = 0
    idx_e = range(len(est))
    for k in range(min(len(ref), len(est)), 0, -1):
        for ris in itertools.combinations(range(len(ref)), k):
            for ejs in itertools.permutations(idx_e, k):
                if all((i, j) in feasible for i, j in zip(ris, ejs)):
                    return k
    return best


def test_note_f1_matches_exhaustive_oracle():
    rng = np.random.default_rng(12)
    for _ in range(60):
        n_r, n_e = int(rng.integers(0, 5)), int(rng.integers(0, 5))
        ref = [_note(float(rng.uniform(0, 0.4)), int(rng.integers(60, 63)))
               for _ in range(n_r)]
        est = [_note(float(rng.uniform(0, 0.4)), int(rng.integers(60, 63)))
               for _ in range(n_e)]
        got = note_f1(ref, est, onset_tol_s=0.05)
        assert got.n_match == _max_matching(ref, est, 0.05)

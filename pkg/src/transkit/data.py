"""Synthetic dataset generation, dataset manifests, and downloading.

Synthetic clips pair rendered audio (or MIDI for the beat task) with ideal
target tensors, closing the generate -> train -> transcribe loop without any
external corpus. Generation is deterministic per seed.
"""
from __future__ import annotations

import hashlib
import os
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np

from .audio import AudioClip, save_tensor, write_wav
from .config import PipelineConfig
from .pianoroll import render_note_targets
from .synth import sonify, sonify_drums, render_note
from .types import (
    CHORD_LABELS, PITCH_CLASSES, DRUM_CLASSES, DrumEvent, MidiDocument, NoteEvent,
    NoteStream, TimeGrid, chord_label_index,
)
from .midi_io import write_midi


class DataError(ValueError):
    pass


class ManifestError(ValueError):
    pass


class ChecksumError(ValueError):
    pass


class NetworkError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# synthetic data

def n_feature_frames(n_samples: int, sr: int, hop_s: float) -> int:
    """Frame count contract shared with compute_spectrogram."""
    hop = int(round(hop_s * sr))
    return max(1, int(np.ceil(n_samples / hop)))


def random_music_document(rng: np.random.Generator, duration_s: float = 2.0,
                          n_notes: int = 5, pitch_lo: int = 40,
                          pitch_hi: int = 90,
                          min_gap_s: float = 0.08) -> MidiDocument:
    """Random piano document guaranteed decodable: no same-pitch overlap,
    same-pitch gaps above the decoder's merge window, notes >= 0.15 s."""
    notes: list[NoteEvent] = []
    spans: dict[int, list[tuple[float, float]]] = {}
    tries = 0
    while len(notes) < n_notes and tries < 200:
        tries += 1
        onset = float(rng.uniform(0.05, duration_s - 0.7))
        dur = float(rng.uniform(0.15, 0.5))
        pitch = int(rng.integers(pitch_lo, pitch_hi + 1))
        clash = any(onset < e + min_gap_s and o < offset + min_gap_s
                    for (o, e) in spans.get(pitch, [])
                    for offset in [onset + dur])
        if clash:
            continue
        notes.append(NoteEvent(onset, onset + dur, pitch))
        spans.setdefault(pitch, []).append((onset, onset + dur))
    return MidiDocument((NoteStream("piano", tuple(notes)),))


def _music_clip(rng, sr, hop_s, duration_s=2.0):
    doc = random_music_document(rng, duration_s)
    clip = sonify(doc, sr)
    frames = n_feature_frames(len(clip.samples), sr, hop_s)
    target = render_note_targets(doc, TimeGrid(hop_s, frames))
    return doc, clip, target


def _drum_clip(rng, sr, hop_s, duration_s=2.0):
    events = []
    t = 0.1
    while t < duration_s - 0.2:
        cls = DRUM_CLASSES[int(rng.integers(0, len(DRUM_CLASSES)))]
        # keep onsets on the 10 ms grid of the drum pipeline
        t_q = round(t / hop_s) * hop_s
        events.append(DrumEvent(t_q, cls))
        t += float(rng.uniform(0.15, 0.4))
    clip = sonify_drums(events, duration_s, sr, seed=int(rng.integers(1 << 31)))
    frames = n_feature_frames(len(clip.samples), sr, hop_s)
    target = np.zeros((frames, len(DRUM_CLASSES)))
    for e in events:
        k = int(e.onset_s / hop_s + 1e-9)
        if k < frames:
            target[k, DRUM_CLASSES.index(e.drum_class)] = 1.0
    return events, clip, target


_TRIADS = {f"{pc}:maj": (i, (i + 4) % 12, (i + 7) % 12)
           for i, pc in enumerate(PITCH_CLASSES)}
_TRIADS.update({f"{pc}:min": (i, (i + 3) % 12, (i + 7) % 12)
                for i, pc in enumerate(PITCH_CLASSES)})


def _chord_clip(rng, sr, hop_s, n_segments=4):
    labels = []
    samples = []
    frame_len = int(round(hop_s * sr))
    for _ in range(n_segments):
        lab = CHORD_LABELS[int(rng.integers(0, 24))]
        frames = int(rng.integers(2, 5))
        labels.extend([lab] * frames)
        root_pc, third, fifth = _TRIADS[lab]
        seg = np.zeros(frames * frame_len)
        for pc in (root_pc, third, fifth):
            midi = 60 + ((pc - 0) % 12)
            f = 440.0 * 2 ** ((midi - 69) / 12)
            t = np.arange(len(seg)) / sr
            seg += np.sin(2 * np.pi * f * t)
        samples.append(seg / 3.0)
    x = np.concatenate(samples)
    clip = AudioClip(x * 0.9, sr)
    target = np.zeros((len(labels), len(CHORD_LABELS)))
    for k, lab in enumerate(labels):
        target[k, chord_label_index(lab)] = 1.0
    return labels, clip, target


def click_track_document(bpm: float = 120.0, n_beats: int = 16,
                         beats_per_bar: int = 4) -> MidiDocument:
    period = 60.0 / bpm
    notes = [NoteEvent(i * period, i * period + 0.1,
                       48 if i % beats_per_bar == 0 else 60)
             for i in range(n_beats)]
    return MidiDocument((NoteStream("piano", tuple(notes)),))


def beat_targets(doc: MidiDocument, hop_s: float,
                 beats_per_bar: int = 4) -> np.ndarray:
    onsets = sorted({n.onset_s for n in doc.all_notes()})
    frames = max(1, int(np.ceil(doc.duration_s() / hop_s)))
    target = np.zeros((frames, 2))
    for i, t in enumerate(onsets):
        k = int(t / hop_s + 1e-9)
        if k < frames:
            target[k, 0] = 1.0
            if i % beats_per_bar == 0:
                target[k, 1] = 1.0
    return target


def _beat_clip(rng, hop_s):
    bpm = float(rng.choice([90.0, 100.0, 120.0, 140.0]))
    doc = click_track_document(bpm, n_beats=int(rng.integers(8, 17)))
    return doc, beat_targets(doc, hop_s)


def _vocal_clip(rng, sr, hop_s, duration_s=2.0):
    """Monophonic line: sequential notes, salience + (voicing, onset) targets."""
    t = 0.1
    notes = []
    while t < duration_s - 0.4:
        dur = float(rng.uniform(0.2, 0.45))
        pitch = int(rng.integers(55, 76))
        notes.append(NoteEvent(t, t + dur, pitch))
        t += dur + float(rng.uniform(0.05, 0.2))
    doc = MidiDocument((NoteStream("piano", tuple(notes)),))
    clip = sonify(doc, sr)
    frames = n_feature_frames(len(clip.samples), sr, hop_s)
    grid = TimeGrid(hop_s, frames)
    tgt3 = render_note_targets(doc, grid)
    salience = tgt3[:, :, 0]
    seg = np.zeros((frames, 2))
    seg[:, 0] = salience.max(axis=1)
    seg[:, 1] = tgt3[:, :, 1].max(axis=1)
    return doc, clip, salience, seg


def generate_synthetic_dataset(task: str, n_clips: int, seed: int,
                               out_dir, config: PipelineConfig | None = None) -> Path:
    """Write n_clips of (input, ideal target) pairs; deterministic per seed."""
    if n_clips < 1:
        raise DataError("n_clips must be >= 1")
    cfg = config or PipelineConfig()
    sr = int(cfg["io.sample_rate"])
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(n_clips):
        rng = np.random.default_rng(seed * 100003 + i)
        stem = out / f"clip_{i:03d}"
        if task in ("music", "multi_instrument"):
            doc, clip, target = _music_clip(rng, sr, cfg["music.hop_s"])
            write_wav(f"{stem}.wav", clip)
            Path(f"{stem}.mid").write_bytes(write_midi(doc))
            save_tensor(f"{stem}_target.ten", target)
        elif task == "drum":
            events, clip, target = _drum_clip(rng, sr, cfg["drum.hop_s"])
            write_wav(f"{stem}.wav", clip)
            save_tensor(f"{stem}_target.ten", target)
            lines = [f"{e.onset_s:.6f}\t{e.drum_class}" for e in events]
            Path(f"{stem}_ref.txt").write_text("\n".join(lines) + "\n")
        elif task == "chord":
            labels, clip, target = _chord_clip(rng, sr, cfg["chord.hop_s"])
            write_wav(f"{stem}.wav", clip)
            save_tensor(f"{stem}_target.ten", target)
            hop = cfg["chord.hop_s"]
            lines = [f"{k * hop:.6f}\t{(k + 1) * hop:.6f}\t{lab}"
                     for k, lab in enumerate(labels)]
            Path(f"{stem}_ref.txt").write_text("\n".join(lines) + "\n")
        elif task == "beat":
            doc, target = _beat_clip(rng, cfg["beat.hop_s"])
            Path(f"{stem}.mid").write_bytes(write_midi(doc))
            save_tensor(f"{stem}_target.ten", target)
        elif task == "vocal":
            doc, clip, salience, seg = _vocal_clip(rng, sr, cfg["vocal.hop_s"])
            write_wav(f"{stem}.wav", clip)
            Path(f"{stem}.mid").write_bytes(write_midi(doc))
            save_tensor(f"{stem}_target_pitch.ten", salience)
            save_tensor(f"{stem}_target_seg.ten", seg)
        else:
            raise DataError(f"unknown task {task!r}")
    return out


# --------------------------------------------------------------------------
# dataset manifests and downloading

# Metadata stubs for the corpora the reference tasks were trained on.
# Checksums are recorded only where the upstream archive is stable; entries
# without one are fetched with a warning and no verification.
DATASET_MANIFESTS: dict[str, dict] = {
    "maestro-v3": {
        "url": "https://storage.googleapis.com/magentadata/datasets/maestro/v3.0.0/maestro-v3.0.0-midi.zip",
        "sha256": None,
        "license": "CC BY-NC-SA 4.0",
        "layout": "zip of year/*.midi",
    },
    "musicnet": {
        "url": "https://zenodo.org/record/5120004/files/musicnet.tar.gz",
        "sha256": None,
        "license": "CC BY 4.0",
        "layout": "tar.gz of train/test wav + csv labels",
    },
    "mdb-drums": {
        "url": "https://github.com/CarlSouthall/MDBDrums/archive/refs/heads/master.zip",
        "sha256": None,
        "license": "MIT (annotations)",
        "layout": "zip of audio + annotations",
    },
}


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def download_dataset(name: str, out_dir, manifests: dict | None = None) -> Path:
    """Fetch + checksum-verify a manifest entry; idempotent; resumes partials."""
    manifests = manifests if manifests is not None else DATASET_MANIFESTS
    if name not in manifests:
        raise ManifestError(
            f"unknown manifest {name!r}; available: {sorted(manifests)}")
    entry = manifests[name]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fname = entry["url"].rsplit("/", 1)[-1]
    final = out / fname
    part = out / (fname + ".part")
    sha = entry.get("sha256")

    if final.exists():
        if sha is None or _sha256(final) == sha:
            return final
        final.rename(final.with_suffix(final.suffix + ".quarantine"))
        raise ChecksumError(f"existing file failed checksum: {final}")

    offset = part.stat().st_size if part.exists() else 0
    req = urllib.request.Request(entry["url"])
    if offset:
        req.add_header("Range", f"bytes={offset}-")
    try:
        with urllib.request.urlopen(req, timeout=60) as resp:
            mode = "ab" if offset and resp.status == 206 else "wb"
            with open(part, mode) as f:
                while True:
                    chunk = resp.read(1 << 20)
                    if not chunk:
                        break
                    f.write(chunk)
    except (urllib.error.URLError, OSError, TimeoutError) as e:
        raise NetworkError(f"download failed ({e}); partial kept for resume") from e

    if sha is not None and _sha256(part) != sha:
        part.rename(out / (fname + ".quarantine"))
        raise ChecksumError(f"checksum mismatch for {name}; file quarantined")
    part.rename(final)
    return final


__all__ = [
    "generate_synthetic_dataset", "download_dataset", "DATASET_MANIFESTS",
    "DataError", "ManifestError", "ChecksumError", "NetworkError",
    "random_music_document", "click_track_document", "beat_targets",
    "n_feature_frames",
]

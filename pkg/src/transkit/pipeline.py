"""End-to-end orchestration: transcribe / train / evaluate for every task."""
from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .audio import AudioClip, load_tensor, read_wav, write_wav
from .config import PipelineConfig
from .data import DataError
from .decode import (
    DecodeParams, decode_beats, decode_chords, decode_drums,
    decode_multi_instrument, decode_piano_notes, decode_vocal,
)
from .features import (
    beat_informed_preprocess, compute_spectrogram, feature_stack,
    midi_symbolic_features, nnls_chroma,
)
from .metrics import beat_f_measure, chord_accuracy, note_f1
from .midi_io import read_midi, write_midi
from .models import Model, ModelConfig, build_model, forward
from .models.checkpoint import (
    CheckpointError, load_checkpoint_file, save_checkpoint_file,
)
from .models.train import TrainConfig, train
from .synth import sonify
from .types import (
    BeatAnnotation, CHORD_LABELS, ChordSegment, DRUM_NOTES, MidiDocument,
    NoteEvent, NoteStream,
)

TASKS = ("music", "drum", "vocal", "chord", "beat")

EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_DATA = 3
EXIT_NETWORK = 4


class PipelineError(RuntimeError):
    """Machine-parseable pipeline failure: `code` is E_*, exit_code 1..4."""

    def __init__(self, code: str, message: str, exit_code: int):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.exit_code = exit_code


def _input_error(msg: str) -> PipelineError:
    return PipelineError("E_INPUT", msg, EXIT_INPUT)


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode())


def _load_clip(path, cfg: PipelineConfig) -> AudioClip:
    if not Path(path).exists():
        raise _input_error(f"no such input file: {path}")
    try:
        clip = read_wav(path)
    except Exception as e:
        raise _input_error(f"unreadable WAV {path}: {e}") from e
    want_sr = int(cfg["io.sample_rate"])
    if clip.sample_rate != want_sr:
        raise _input_error(
            f"{path}: sample rate {clip.sample_rate} != configured {want_sr} "
            "(resampling is out of scope; render inputs at the configured rate)")
    return clip


def _load_midi_doc(path) -> MidiDocument:
    if not Path(path).exists():
        raise _input_error(f"no such input file: {path}")
    try:
        return read_midi(Path(path).read_bytes())
    except Exception as e:
        raise _input_error(f"unreadable MIDI {path}: {e}") from e


def load_model_checked(path) -> Model:
    if not path or not Path(path).exists():
        raise _input_error(f"missing checkpoint: {path}")
    try:
        return load_checkpoint_file(path)
    except CheckpointError as e:
        raise PipelineError("E_DATA", f"bad checkpoint {path}: {e}", EXIT_DATA) from e


def decode_params_from(cfg: PipelineConfig,
                       threshold: float | None = None) -> DecodeParams:
    thr = threshold if threshold is not None else cfg["decode.act_threshold"]
    onset_thr = threshold if threshold is not None else cfg["decode.onset_threshold"]
    return DecodeParams(act_threshold=float(thr),
                        onset_threshold=float(onset_thr),
                        min_note_s=float(cfg["decode.min_note_s"]),
                        merge_gap_s=float(cfg["decode.merge_gap_s"]))


def write_chord_file(path, segments: list[ChordSegment]) -> None:
    lines = [f"{s.start_s:.6f}\t{s.end_s:.6f}\t{s.label}" for s in segments]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_chord_file(path) -> list[ChordSegment]:
    segs = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        a, b, lab = line.split("\t")
        segs.append(ChordSegment(float(a), float(b), lab))
    return segs


def write_beat_file(path, ann: BeatAnnotation) -> None:
    downs = set(ann.downbeats_s)
    lines = [f"{b:.6f}\t{1 if b in downs else 0}" for b in ann.beats_s]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_beat_file(path) -> BeatAnnotation:
    beats, downs = [], []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        t, is_down = line.split("\t")
        beats.append(float(t))
        if int(is_down):
            downs.append(float(t))
    return BeatAnnotation(tuple(beats), tuple(downs))


def _drum_events_to_doc(events) -> MidiDocument:
    notes = tuple(
        NoteEvent(e.onset_s, e.onset_s + 0.05, DRUM_NOTES[e.drum_class],
                  instrument="drums", confidence=e.confidence)
        for e in events)
    streams = (NoteStream("drums", notes),) if notes else ()
    return MidiDocument(streams)


def transcribe(task: str, input_path, cfg: PipelineConfig, model_path,
               output_path=None, seg_model_path=None,
               threshold: float | None = None) -> dict[str, Path]:
    """Feature extraction -> model forward -> decoder -> writer. Returns the
    written output paths keyed by kind (midi / chords / beats)."""
    if task not in TASKS:
        raise _input_error(f"unknown task {task!r}; expected one of {TASKS}")
    input_path = Path(input_path)
    params = decode_params_from(cfg, threshold)
    outputs: dict[str, Path] = {}

    if task == "music":
        clip = _load_clip(input_path, cfg)
        model = load_model_checked(model_path)
        feat = feature_stack(clip, cfg["music.window_s"], cfg["music.hop_s"],
                             cfg["music.gamma"], cfg["music.gamma"])
        act = _forward_checked(model, feat)
        hop = float(cfg["music.hop_s"])
        if model.config.task == "multi_instrument":
            streams = tuple(decode_multi_instrument(act, params, hop))
        else:
            notes = decode_piano_notes(act, params, hop)
            streams = (NoteStream("piano", tuple(notes)),) if notes else ()
        out = Path(output_path or input_path.with_name(input_path.stem + ".transcribed.mid"))
        atomic_write_bytes(out, write_midi(MidiDocument(streams)))
        outputs["midi"] = out

    elif task == "drum":
        clip = _load_clip(input_path, cfg)
        model = load_model_checked(model_path)
        spec = compute_spectrogram(clip, cfg["drum.window_s"], cfg["drum.hop_s"])
        feat = beat_informed_preprocess(spec)
        act = _forward_checked(model, feat)
        events = decode_drums(act, params, float(cfg["drum.hop_s"]))
        out = Path(output_path or input_path.with_name(input_path.stem + ".transcribed.mid"))
        atomic_write_bytes(out, write_midi(_drum_events_to_doc(events)))
        outputs["midi"] = out

    elif task == "vocal":
        clip = _load_clip(input_path, cfg)
        pitch_model = load_model_checked(model_path)
        seg_path = seg_model_path or (str(model_path) + ".seg")
        seg_model = load_model_checked(seg_path)
        feat = feature_stack(clip, cfg["vocal.window_s"], cfg["vocal.hop_s"],
                             cfg["music.gamma"], cfg["music.gamma"])
        salience = _forward_checked(pitch_model, feat)
        seg = _forward_checked(seg_model, feat)
        notes = decode_vocal(salience, seg, params, float(cfg["vocal.hop_s"]))
        streams = (NoteStream("piano", tuple(notes)),) if notes else ()
        out = Path(output_path or input_path.with_name(input_path.stem + ".transcribed.mid"))
        atomic_write_bytes(out, write_midi(MidiDocument(streams)))
        outputs["midi"] = out

    elif task == "chord":
        clip = _load_clip(input_path, cfg)
        model = load_model_checked(model_path)
        feat = nnls_chroma(clip, cfg["chord.hop_s"])
        probs = _forward_checked(model, feat)
        segments = decode_chords(probs, feat.grid)
        out = Path(output_path or input_path.with_name(input_path.stem + ".chords.txt"))
        write_chord_file(out, segments)
        outputs["chords"] = out

    elif task == "beat":
        doc = _load_midi_doc(input_path)
        model = load_model_checked(model_path)
        try:
            feat = midi_symbolic_features(doc, cfg["beat.hop_s"])
        except ValueError as e:
            raise _input_error(f"{input_path}: {e}") from e
        probs = _forward_checked(model, feat)
        ann = decode_beats(probs, params, float(cfg["beat.hop_s"]))
        out = Path(output_path or input_path.with_name(input_path.stem + ".beats.txt"))
        write_beat_file(out, ann)
        outputs["beats"] = out

    return outputs


def _forward_checked(model: Model, feat) -> np.ndarray:
    from .models import ContractError
    try:
        return forward(model, feat)
    except ContractError as e:
        raise PipelineError("E_DATA", str(e), EXIT_DATA) from e


# --------------------------------------------------------------------------
# training

def _dataset_pairs(task: str, dataset_dir: Path, cfg: PipelineConfig):
    """Load (feature, target) pairs following the synthetic-dataset layout."""
    if task in ("music", "vocal_pitch", "vocal_seg", "vocal"):
        pattern, hop, win = "*.wav", cfg["music.hop_s"], cfg["music.window_s"]
    elif task == "drum":
        pattern, hop, win = "*.wav", cfg["drum.hop_s"], cfg["drum.window_s"]
    elif task == "chord":
        pattern, hop, win = "*.wav", cfg["chord.hop_s"], None
    elif task == "beat":
        pattern, hop, win = "*.mid", cfg["beat.hop_s"], None
    else:
        raise PipelineError("E_DATA", f"unknown training task {task}", EXIT_DATA)

    inputs = sorted(Path(dataset_dir).glob(pattern))
    target_suffix = {
        "vocal_pitch": "_target_pitch.ten", "vocal_seg": "_target_seg.ten",
    }.get(task, "_target.ten")
    pairs = []
    for path in inputs:
        tpath = path.with_name(path.stem + target_suffix)
        if not tpath.exists():
            continue
        try:
            target = load_tensor(tpath)
        except Exception as e:
            raise PipelineError("E_DATA", f"corrupt feature file {tpath}: {e}",
                                EXIT_DATA) from e
        if task == "beat":
            doc = _load_midi_doc(path)
            x = midi_symbolic_features(doc, hop).stacked()
        else:
            clip = _load_clip(path, cfg)
            if task == "chord":
                x = nnls_chroma(clip, hop).data
            elif task == "drum":
                x = beat_informed_preprocess(
                    compute_spectrogram(clip, win, hop)).data
            else:
                x = feature_stack(clip, win, hop,
                                  cfg["music.gamma"], cfg["music.gamma"]).data
        n = min(len(x), len(target))
        pairs.append((x[:n], target[:n]))
    if not pairs:
        raise PipelineError("E_DATA", f"no training pairs in {dataset_dir}",
                            EXIT_DATA)
    return pairs


def _train_config(cfg: PipelineConfig, epochs=None, lr=None) -> TrainConfig:
    return TrainConfig(
        epochs=int(epochs if epochs is not None else cfg["train.epochs"]),
        batch_size=int(cfg["train.batch_size"]),
        learning_rate=float(lr if lr is not None else cfg["train.learning_rate"]),
        mtl_weights=(float(cfg["train.beat_weight"]),
                     float(cfg["train.downbeat_weight"])),
        pos_weight=float(cfg["train.pos_weight"]),
        seed=int(cfg["train.seed"]),
    )


def _model_config_for(task: str, cfg: PipelineConfig, in_bins: int,
                      in_channels: int) -> ModelConfig:
    return ModelConfig(task=task, width=int(cfg["model.width"]),
                       hidden=int(cfg["model.hidden"]), in_bins=in_bins,
                       in_channels=in_channels, seed=int(cfg["model.seed"]))


def train_cli(task: str, dataset_dir, cfg: PipelineConfig, out_path=None,
              epochs=None, lr=None) -> Path:
    """Train a fresh model on a dataset directory; writes checkpoint(s)."""
    dataset_dir = Path(dataset_dir)
    if not dataset_dir.is_dir():
        raise PipelineError("E_DATA", f"not a dataset directory: {dataset_dir}",
                            EXIT_DATA)
    tc = _train_config(cfg, epochs, lr)

    subtasks = ["vocal_pitch", "vocal_seg"] if task == "vocal" else [task]
    out = Path(out_path or dataset_dir / f"{task}.ckpt")
    written = None
    for sub in subtasks:
        pairs = _dataset_pairs(sub, dataset_dir, cfg)
        x0 = pairs[0][0]
        in_bins = x0.shape[1]
        in_channels = x0.shape[2] if x0.ndim == 3 else 1
        model = build_model(_model_config_for(sub, cfg, in_bins, in_channels))
        from .models.train import TrainingError
        try:
            model, history = train(model, pairs, tc)
        except TrainingError as e:
            raise PipelineError("E_DATA", str(e), EXIT_DATA) from e
        path = out if sub != "vocal_seg" else Path(str(out) + ".seg")
        from .models.checkpoint import save_checkpoint
        atomic_write_bytes(path, save_checkpoint(model))
        loss_path = Path(str(path) + ".loss.txt")
        atomic_write_text(loss_path, "\n".join(f"{v:.8f}" for v in history) + "\n")
        written = written or path
    return written


# --------------------------------------------------------------------------
# evaluation

def evaluate(task: str, ref_path, est_path, cfg: PipelineConfig) -> str:
    """Compare two output files of the same kind; returns a text record."""
    if task in ("music", "vocal", "drum"):
        ref = _load_midi_doc(ref_path).all_notes()
        est = _load_midi_doc(est_path).all_notes()
        report = note_f1(ref, est)
        return report.to_record()
    if task == "chord":
        try:
            acc = chord_accuracy(read_chord_file(ref_path),
                                 read_chord_file(est_path))
        except ValueError as e:
            raise _input_error(str(e)) from e
        return f"accuracy={acc}"
    if task == "beat":
        beat, down = beat_f_measure(read_beat_file(ref_path),
                                    read_beat_file(est_path))
        return ("[beats]\n" + beat.to_record()
                + "\n[downbeats]\n" + down.to_record())
    raise _input_error(f"unknown task {task!r}")


def sonify_cli(midi_path, out_wav, cfg: PipelineConfig) -> Path:
    doc = _load_midi_doc(midi_path)
    clip = sonify(doc, int(cfg["io.sample_rate"]))
    if not doc.all_notes():
        import warnings
        warnings.warn("empty MIDI document; writing silence")
    out = Path(out_wav)
    write_wav(out, clip)
    return out


__all__ = [
    "PipelineError", "transcribe", "train_cli", "evaluate", "sonify_cli",
    "write_chord_file", "read_chord_file", "write_beat_file", "read_beat_file",
    "atomic_write_bytes", "atomic_write_text", "decode_params_from",
    "EXIT_INTERNAL", "EXIT_INPUT", "EXIT_DATA", "EXIT_NETWORK", "TASKS",
]

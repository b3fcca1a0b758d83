"""Shared fixtures: toy checkpoints and short audio/MIDI files."""
import numpy as np
import pytest

from transkit.config import PipelineConfig
from transkit.data import click_track_document, random_music_document
from transkit.midi_io import write_midi
from transkit.models import ModelConfig, TASK_DEFAULT_IN, build_model
from transkit.models.checkpoint import save_checkpoint_file
from transkit.synth import sonify
from transkit.audio import write_wav


@pytest.fixture(scope="session")
def cfg():
    return PipelineConfig()


@pytest.fixture(scope="session")
def checkpoint_dir(tmp_path_factory):
    """One tiny random-init checkpoint per task, named <task>.ckpt."""
    d = tmp_path_factory.mktemp("ckpts")
    for task in ("music", "multi_instrument", "drum", "vocal_pitch",
                 "vocal_seg", "chord", "beat"):
        bins, ch = TASK_DEFAULT_IN[task]
        model = build_model(ModelConfig(task=task, width=4, hidden=8,
                                        in_bins=bins, in_channels=ch, seed=0))
        save_checkpoint_file(d / f"{task}.ckpt", model)
    # the vocal CLI loads <model>.ckpt plus <model>.ckpt.seg
    (d / "vocal.ckpt").write_bytes((d / "vocal_pitch.ckpt").read_bytes())
    (d / "vocal.ckpt.seg").write_bytes((d / "vocal_seg.ckpt").read_bytes())
    return d


@pytest.fixture(scope="session")
def fixtures_dir(tmp_path_factory, cfg):
    """A 2 s WAV at the pipeline sample rate and a short MIDI file."""
    d = tmp_path_factory.mktemp("fixtures")
    rng = np.random.default_rng(7)
    doc = random_music_document(rng, duration_s=2.0, n_notes=5)
    sr = int(cfg["io.sample_rate"])
    write_wav(d / "clip.wav", sonify(doc, sr))
    (d / "clip.mid").write_bytes(write_midi(doc))
    (d / "click.mid").write_bytes(write_midi(click_track_document(120.0, 8)))
    return d

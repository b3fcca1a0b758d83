"""Command-line interface: ``transkit <task> <verb> [OPTIONS] INPUT``.

Tasks: music, drum, vocal, chord, beat. Verbs: transcribe, train, evaluate.
Extra utilities: ``sonify``, ``dataset generate``, ``dataset download``,
``config init``. Exit codes: 0 ok, 1 internal, 2 input, 3 data, 4 network;
failures print one machine-parseable ``E_CODE: message`` line to stderr.
"""
from __future__ import annotations

import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import pipeline
from .config import ConfigFileError, PipelineConfig, write_default_config
from .data import (
    ChecksumError, DataError, ManifestError, NetworkError,
    download_dataset, generate_synthetic_dataset,
)

CHECKPOINT_DIR_ENV = "TRANSKIT_CHECKPOINT_DIR"


def _load_config(path) -> PipelineConfig:
    try:
        return PipelineConfig.from_file(path) if path else PipelineConfig()
    except ConfigFileError as e:
        _fail("E_INPUT", str(e), pipeline.EXIT_INPUT)


def _fail(code: str, message: str, exit_code: int):
    click.echo(f"{code}: {message}", err=True)
    sys.exit(exit_code)


def _run(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except pipeline.PipelineError as e:
        _fail(e.code, str(e).split(": ", 1)[-1], e.exit_code)
    except ManifestError as e:
        _fail("E_MANIFEST", str(e), pipeline.EXIT_INPUT)
    except ChecksumError as e:
        _fail("E_CHECKSUM", str(e), pipeline.EXIT_DATA)
    except NetworkError as e:
        _fail("E_NET", str(e), pipeline.EXIT_NETWORK)
    except DataError as e:
        _fail("E_DATA", str(e), pipeline.EXIT_DATA)
    except Exception as e:  # anything unplanned is an internal error
        _fail("E_INTERNAL", f"{type(e).__name__}: {e}", pipeline.EXIT_INTERNAL)


def _default_model_path(task: str) -> str | None:
    root = os.environ.get(CHECKPOINT_DIR_ENV)
    return str(Path(root) / f"{task}.ckpt") if root else None


@click.group()
def main():
    """Desk-scale music transcription workbench."""


def _transcribe_one(task, input_path, cfg, model_path, output, seg_model, threshold):
    outs = pipeline.transcribe(task, input_path, cfg, model_path,
                               output_path=output, seg_model_path=seg_model,
                               threshold=threshold)
    for kind, path in outs.items():
        click.echo(f"{kind}: {path}")


def _make_task_group(task: str) -> click.Group:
    @click.group(name=task)
    def group():
        pass

    @group.command("transcribe")
    @click.argument("inputs", nargs=-1, required=True,
                    type=click.Path(path_type=Path))
    @click.option("--model-path", default=None, help="checkpoint file "
                  f"(default: ${CHECKPOINT_DIR_ENV}/{task}.ckpt)")
    @click.option("--seg-model-path", default=None,
                  help="vocal only: segmentation checkpoint")
    @click.option("--output", default=None, type=click.Path(path_type=Path),
                  help="output path (single input only)")
    @click.option("--config", "config_path", default=None,
                  type=click.Path(path_type=Path))
    @click.option("--threshold", default=None, type=float,
                  help="override both decode thresholds")
    @click.option("--seed", default=None, type=int, help="reserved; recorded")
    @click.option("--workers", default=1, type=int,
                  help="parallel workers for batch transcription")
    def transcribe(inputs, model_path, seg_model_path, output, config_path,
                   threshold, seed, workers):
        cfg = _load_config(config_path)
        model_path = model_path or _default_model_path(task)
        if output is not None and len(inputs) > 1:
            _fail("E_INPUT", "--output only applies to a single input",
                  pipeline.EXIT_INPUT)
        if workers > 1 and len(inputs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futs = [pool.submit(pipeline.transcribe, task, p, cfg,
                                    model_path, None, seg_model_path, threshold)
                        for p in inputs]
                for f in futs:
                    _run(f.result)
        else:
            for p in inputs:
                _run(_transcribe_one, task, p, cfg, model_path, output,
                     seg_model_path, threshold)

    @group.command("train")
    @click.argument("dataset_dir", type=click.Path(path_type=Path))
    @click.option("--output", default=None, type=click.Path(path_type=Path),
                  help="checkpoint output path")
    @click.option("--config", "config_path", default=None,
                  type=click.Path(path_type=Path))
    @click.option("--epochs", default=None, type=int)
    @click.option("--learning-rate", default=None, type=float)
    def train(dataset_dir, output, config_path, epochs, learning_rate):
        cfg = _load_config(config_path)
        path = _run(pipeline.train_cli, task, dataset_dir, cfg,
                    out_path=output, epochs=epochs, lr=learning_rate)
        click.echo(f"checkpoint: {path}")

    @group.command("evaluate")
    @click.argument("reference", type=click.Path(path_type=Path))
    @click.argument("estimate", type=click.Path(path_type=Path))
    @click.option("--config", "config_path", default=None,
                  type=click.Path(path_type=Path))
    def evaluate(reference, estimate, config_path):
        cfg = _load_config(config_path)
        click.echo(_run(pipeline.evaluate, task, reference, estimate, cfg))

    return group


for _task in pipeline.TASKS:
    main.add_command(_make_task_group(_task))


@main.command("sonify")
@click.argument("midi_path", type=click.Path(path_type=Path))
@click.argument("out_wav", type=click.Path(path_type=Path))
@click.option("--config", "config_path", default=None,
              type=click.Path(path_type=Path))
def sonify_cmd(midi_path, out_wav, config_path):
    """Render a MIDI file to audio."""
    cfg = _load_config(config_path)
    path = _run(pipeline.sonify_cli, midi_path, out_wav, cfg)
    click.echo(f"wav: {path}")


@main.group("dataset")
def dataset_group():
    """Synthetic dataset generation and corpus downloads."""


@dataset_group.command("generate")
@click.argument("task", type=click.Choice(
    ["music", "multi_instrument", "drum", "vocal", "chord", "beat"]))
@click.option("--n-clips", default=8, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path))
@click.option("--config", "config_path", default=None,
              type=click.Path(path_type=Path))
def dataset_generate(task, n_clips, seed, out_dir, config_path):
    cfg = _load_config(config_path)
    path = _run(generate_synthetic_dataset, task, n_clips, seed, out_dir, cfg)
    click.echo(f"dataset: {path}")


@dataset_group.command("download")
@click.argument("name")
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path))
def dataset_download(name, out_dir):
    path = _run(download_dataset, name, out_dir)
    click.echo(f"file: {path}")


@main.group("config")
def config_group():
    """Configuration utilities."""


@config_group.command("init")
@click.argument("path", type=click.Path(path_type=Path))
def config_init(path):
    """Write the full default configuration to PATH."""
    write_default_config(path)
    click.echo(f"config: {path}")


if __name__ == "__main__":
    main()

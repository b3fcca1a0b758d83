"""Pipeline configuration: a flat ``key = value`` text format.

Every tunable constant (window sizes, thresholds, gamma, ...) lives here
so runs are reproducible from one file.
``DEFAULTS`` is the full schema; unknown keys are rejected on load.
"""
from __future__ import annotations

from pathlib import Path

DEFAULTS: dict[str, object] = {
    # audio
    "io.sample_rate": 16000,
    # pitched feature stack
    "music.window_s": 0.064,
    "music.hop_s": 0.020,
    "music.gamma": 0.6,
    # drum pipeline
    "drum.window_s": 0.046,
    "drum.hop_s": 0.010,
    # vocal pipeline (shares the pitched stack geometry)
    "vocal.window_s": 0.064,
    "vocal.hop_s": 0.020,
    # chord pipeline
    "chord.hop_s": 0.230,
    # beat pipeline
    "beat.hop_s": 0.010,
    # decoding
    "decode.act_threshold": 0.5,
    "decode.onset_threshold": 0.5,
    "decode.min_note_s": 0.05,
    "decode.merge_gap_s": 0.02,
    # model scale
    "model.width": 8,
    "model.hidden": 25,
    "model.seed": 0,
    # training
    "train.epochs": 50,
    "train.batch_size": 1,
    "train.learning_rate": 0.2,
    "train.pos_weight": 20.0,
    "train.beat_weight": 1.0,
    "train.downbeat_weight": 1.0,
    "train.seed": 0,
}


class ConfigFileError(ValueError):
    pass


def _parse_value(raw: str):
    raw = raw.strip()
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


class PipelineConfig:
    """Defaults overlaid with values from an optional config file."""

    def __init__(self, overrides: dict[str, object] | None = None):
        self.values = dict(DEFAULTS)
        for k, v in (overrides or {}).items():
            if k not in DEFAULTS:
                raise ConfigFileError(f"unknown config key {k!r}")
            self.values[k] = v

    def __getitem__(self, key: str):
        return self.values[key]

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        overrides: dict[str, object] = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigFileError(f"{path}:{lineno}: expected key = value")
            key, raw = line.split("=", 1)
            overrides[key.strip()] = _parse_value(raw)
        return cls(overrides)

    def write(self, path) -> None:
        lines = [f"{k} = {self.values[k]}" for k in sorted(self.values)]
        Path(path).write_text("\n".join(lines) + "\n")


def write_default_config(path) -> None:
    PipelineConfig().write(path)


__all__ = ["PipelineConfig", "ConfigFileError", "DEFAULTS",
           "write_default_config"]

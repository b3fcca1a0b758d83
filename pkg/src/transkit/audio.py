"""WAV audio I/O and the binary tensor container used for fixtures.

WAV support covers PCM 16-bit and IEEE float32, mono or downmixed stereo.
The tensor container is: magic ``TKTEN001``, uint32 ndim, uint32 dims...,
then float64 values in row-major order (little-endian throughout).
"""
from __future__ import annotations

import io
import struct
import wave
from dataclasses import dataclass

import numpy as np

DEFAULT_SAMPLE_RATE = 44100

_TEN_MAGIC = b"TKTEN001"


class AudioError(ValueError):
    pass


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray          # float64 in [-1, 1]
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1 or s.size == 0:
            raise AudioError("clip must be a non-empty 1-D signal")
        if not np.all(np.isfinite(s)):
            raise AudioError("clip contains non-finite samples")
        object.__setattr__(self, "samples", s)
        if self.sample_rate <= 0:
            raise AudioError("sample rate must be positive")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


def read_wav(path_or_bytes) -> AudioClip:
    if isinstance(path_or_bytes, (bytes, bytearray)):
        fh = io.BytesIO(path_or_bytes)
    else:
        fh = open(path_or_bytes, "rb")
    with fh:
        data = fh.read()

    # stdlib wave rejects float WAVs; sniff the format tag first.
    if len(data) < 44 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioError("not a RIFF/WAVE file")
    pos = 12
    fmt = None
    raw = None
    while pos + 8 <= len(data):
        cid = data[pos:pos + 4]
        size = struct.unpack("<I", data[pos + 4:pos + 8])[0]
        body = data[pos + 8:pos + 8 + size]
        if cid == b"fmt ":
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif cid == b"data":
            raw = body
        pos += 8 + size + (size & 1)
    if fmt is None or raw is None:
        raise AudioError("missing fmt or data chunk")
    tag, n_ch, rate, _, _, bits = fmt
    if tag == 1 and bits == 16:
        x = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    elif tag == 3 and bits == 32:
        x = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    else:
        raise AudioError(f"unsupported WAV format tag={tag} bits={bits}")
    if n_ch > 1:
        x = x[: (len(x) // n_ch) * n_ch].reshape(-1, n_ch).mean(axis=1)
    return AudioClip(x, rate)


def write_wav(path, clip: AudioClip) -> None:
    """Write PCM 16-bit mono."""
    x = np.clip(clip.samples, -1.0, 1.0)
    pcm = (x * 32767.0).round().astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(clip.sample_rate)
        w.writeframes(pcm.tobytes())


def tensor_to_bytes(arr: np.ndarray) -> bytes:
    a = np.ascontiguousarray(arr, dtype=np.float64)
    header = _TEN_MAGIC + struct.pack("<I", a.ndim)
    header += struct.pack(f"<{a.ndim}I", *a.shape)
    return header + a.astype("<f8").tobytes()


def tensor_from_bytes(data: bytes) -> np.ndarray:
    if data[:8] != _TEN_MAGIC:
        raise AudioError("bad tensor container magic")
    (ndim,) = struct.unpack("<I", data[8:12])
    dims = struct.unpack(f"<{ndim}I", data[12:12 + 4 * ndim])
    body = data[12 + 4 * ndim:]
    n = int(np.prod(dims)) if dims else 1
    if len(body) != 8 * n:
        raise AudioError("tensor container payload size mismatch")
    return np.frombuffer(body, dtype="<f8").reshape(dims).copy()


def save_tensor(path, arr: np.ndarray) -> None:
    with open(path, "wb") as f:
        f.write(tensor_to_bytes(arr))


def load_tensor(path) -> np.ndarray:
    with open(path, "rb") as f:
        return tensor_from_bytes(f.read())


__all__ = [
    "AudioClip", "AudioError", "read_wav", "write_wav",
    "tensor_to_bytes", "tensor_from_bytes", "save_tensor", "load_tensor",
    "DEFAULT_SAMPLE_RATE",
]

"""Versioned binary checkpoint container.

Layout (little-endian):
  bytes 0..7   magic ``TKCP0001``
  bytes 8..11  uint32 JSON header length
  header       JSON: {"config": ..., "metadata": ...,
                      "tensors": [{"name", "shape", "offset", "size"}]}
  payload      float64 tensor values, row-major, at the stated offsets
"""
from __future__ import annotations

import json
import struct

import numpy as np

from . import Model, ModelConfig, build_model

MAGIC = b"TKCP0001"


class CheckpointError(ValueError):
    pass


def save_checkpoint(model: Model) -> bytes:
    tensors = []
    blobs = []
    offset = 0
    for name, layer, k in model.net.named_params():
        arr = np.ascontiguousarray(layer.p[k], dtype="<f8")
        tensors.append({"name": name, "shape": list(arr.shape),
                        "offset": offset, "size": arr.size})
        blobs.append(arr.tobytes())
        offset += arr.nbytes
    header = json.dumps({
        "config": model.config.to_dict(),
        "metadata": model.metadata,
        "tensors": tensors,
    }).encode()
    return MAGIC + struct.pack("<I", len(header)) + header + b"".join(blobs)


def load_checkpoint(data: bytes) -> Model:
    if data[:8] != MAGIC:
        raise CheckpointError("bad checkpoint magic or version")
    if len(data) < 12:
        raise CheckpointError("truncated checkpoint header")
    (hlen,) = struct.unpack("<I", data[8:12])
    try:
        header = json.loads(data[12:12 + hlen])
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"corrupt header: {e}") from e
    payload = data[12 + hlen:]
    config = ModelConfig.from_dict(header["config"])
    model = build_model(config)
    model.metadata = dict(header.get("metadata", {}))
    table = {t["name"]: t for t in header["tensors"]}
    for name, layer, k in model.net.named_params():
        if name not in table:
            raise CheckpointError(f"missing tensor {name}")
        t = table[name]
        start, nbytes = t["offset"], t["size"] * 8
        if start + nbytes > len(payload):
            raise CheckpointError(f"truncated payload at tensor {name}")
        arr = np.frombuffer(payload[start:start + nbytes], dtype="<f8")
        if list(layer.p[k].shape) != t["shape"]:
            raise CheckpointError(f"shape mismatch for {name}")
        layer.p[k] = arr.reshape(t["shape"]).copy()
    return model


def save_checkpoint_file(path, model: Model) -> None:
    with open(path, "wb") as f:
        f.write(save_checkpoint(model))


def load_checkpoint_file(path) -> Model:
    with open(path, "rb") as f:
        return load_checkpoint(f.read())


__all__ = ["save_checkpoint", "load_checkpoint", "save_checkpoint_file",
           "load_checkpoint_file", "CheckpointError", "MAGIC"]

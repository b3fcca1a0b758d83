"""Stochastic-gradient training with per-task losses."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nn import sigmoid_bce_with_logits, softmax_ce_with_logits
from . import Model


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    batch_size: int = 1
    learning_rate: float = 0.1
    # MTL weights: for beat this is (beat, downbeat); for chord the second
    # entry weights the encoder's segmentation-boundary BCE.
    mtl_weights: tuple[float, float] = (1.0, 1.0)
    # positive-class BCE weight, scalar or per-output-channel sequence
    pos_weight: tuple[float, ...] | float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0 or self.batch_size <= 0 or self.learning_rate < 0:
            raise ValueError("training hyperparameters must be positive")


def _boundary_target(target: np.ndarray) -> np.ndarray:
    """Chord segmentation target: 1 where the frame label changes."""
    labels = target.argmax(axis=1)
    b = np.zeros((len(labels), 1))
    b[0, 0] = 1.0
    b[1:, 0] = (labels[1:] != labels[:-1]).astype(float)
    return b


def _loss_and_backward(model: Model, x: np.ndarray, target: np.ndarray,
                       tc: TrainConfig) -> float:
    net = model.net
    task = model.config.task
    logits = net.forward_logits(np.asarray(x, dtype=np.float64))
    if logits.shape != target.shape:
        raise TrainingError(
            f"target shape {target.shape} != output shape {logits.shape}")
    if task == "chord":
        loss, dlogits = softmax_ce_with_logits(logits, target)
        seg_logits = net.segmentation_logits()
        seg_t = _boundary_target(target)
        w_seg = tc.mtl_weights[1]
        seg_loss, dseg = sigmoid_bce_with_logits(seg_logits, seg_t)
        loss = loss + w_seg * seg_loss
        net.backward(dlogits, dseg=w_seg * dseg)
    else:
        pw = tc.pos_weight
        if not np.isscalar(pw):
            pw = np.asarray(pw, dtype=np.float64)
        if task == "beat":
            cw = np.asarray(tc.mtl_weights, dtype=np.float64)
            loss_b, db = sigmoid_bce_with_logits(logits[:, :1], target[:, :1], pw)
            loss_d, dd = sigmoid_bce_with_logits(logits[:, 1:], target[:, 1:], pw)
            loss = (cw[0] * loss_b + cw[1] * loss_d) / cw.sum()
            dlogits = np.concatenate(
                [cw[0] * db, cw[1] * dd], axis=1) / cw.sum()
        else:
            loss, dlogits = sigmoid_bce_with_logits(logits, target, pw)
        net.backward(dlogits)
    return float(loss)


def train(model: Model, dataset, tc: TrainConfig):
    """SGD over (feature_array, target) pairs; returns (model, loss_history).

    History is the per-epoch mean loss; with a fixed seed and dataset the
    run is bit-reproducible.
    """
    if not dataset:
        raise TrainingError("empty dataset")
    net = model.net
    params = list(net.named_params())
    history: list[float] = []
    n = len(dataset)
    for epoch in range(tc.epochs):
        total = 0.0
        i = 0
        while i < n:
            batch = dataset[i: i + tc.batch_size]
            net.zero_grad()
            for x, t in batch:
                loss = _loss_and_backward(model, x, t, tc)
                if not np.isfinite(loss):
                    raise TrainingError(
                        f"non-finite loss at epoch {epoch}, batch {i}")
                total += loss
            scale = tc.learning_rate / len(batch)
            for _, layer, k in params:
                layer.p[k] -= scale * layer.g[k]
            i += tc.batch_size
        history.append(total / n)
    model.metadata.setdefault("loss_history", [])
    model.metadata["loss_history"] = list(
        model.metadata.get("loss_history", [])) + history
    model.metadata["epochs_trained"] = (
        model.metadata.get("epochs_trained", 0) + tc.epochs)
    return model, history


__all__ = ["TrainConfig", "TrainingError", "train"]

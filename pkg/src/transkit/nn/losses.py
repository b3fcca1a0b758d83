"""Loss functions paired with their logit gradients."""
from __future__ import annotations

import numpy as np

from .layers import sigmoid, softmax


def _softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def sigmoid_bce_with_logits(logits: np.ndarray, targets: np.ndarray,
                            pos_weight=1.0):
    """Mean binary cross-entropy on sigmoid logits.

    ``pos_weight`` scales the positive-target term; a scalar or an array
    broadcastable over the logits (e.g. per-channel weights).
    """
    w = np.asarray(pos_weight, dtype=np.float64)
    loss_el = w * targets * _softplus(-logits) + (1.0 - targets) * _softplus(logits)
    n = logits.size
    loss = loss_el.sum() / n
    dlogits = ((1.0 - targets) * sigmoid(logits)
               - w * targets * sigmoid(-logits)) / n
    return loss, dlogits


def softmax_ce_with_logits(logits: np.ndarray, target_probs: np.ndarray):
    """Mean categorical cross-entropy over rows; targets are distributions."""
    z = logits - logits.max(axis=-1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=-1, keepdims=True))
    n_rows = int(np.prod(logits.shape[:-1]))
    loss = -(target_probs * logp).sum() / n_rows
    dlogits = (softmax(logits, axis=-1) - target_probs) / n_rows
    return loss, dlogits


__all__ = ["sigmoid_bce_with_logits", "softmax_ce_with_logits"]

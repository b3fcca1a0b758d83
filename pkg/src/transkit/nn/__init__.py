from .layers import (
    Layer, Dense, BinProject, Conv2D, ReLU, Tanh, AvgPool2, Upsample2,
    PoolBins, ResBlock, sigmoid, softmax,
)
from .attention import SelfAttention, PatchAttention
from .lstm import LSTM, BiLSTM
from .losses import sigmoid_bce_with_logits, softmax_ce_with_logits

__all__ = [
    "Layer", "Dense", "BinProject", "Conv2D", "ReLU", "Tanh", "AvgPool2",
    "Upsample2", "PoolBins", "ResBlock", "sigmoid", "softmax",
    "SelfAttention", "PatchAttention", "LSTM", "BiLSTM",
    "sigmoid_bce_with_logits", "softmax_ce_with_logits",
]

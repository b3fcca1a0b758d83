from .spectral import (
    SpectralFeature, FeatureError, compute_spectrogram, generalized_cepstrum,
    gcos, feature_stack, STACK_CHANNELS,
)
from .chroma import ChromaFeature, nnls_chroma
from .symbolic import SymbolicFeature, midi_symbolic_features
from .beat_pre import beat_informed_preprocess

__all__ = [
    "SpectralFeature", "FeatureError", "compute_spectrogram",
    "generalized_cepstrum", "gcos", "feature_stack", "STACK_CHANNELS",
    "ChromaFeature", "nnls_chroma", "SymbolicFeature",
    "midi_symbolic_features", "beat_informed_preprocess",
]

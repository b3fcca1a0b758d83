"""Hot numeric kernels with two interchangeable backends.

The numba backend is the default; set ``TRANSKIT_NO_NUMBA=1`` (or any
non-empty value) before import to force the pure-numpy path, e.g. on
machines where numba is unavailable or JIT warm-up is unwanted.
``benchmarks/bench_kernels.py`` compares the two.
"""
from __future__ import annotations

import os

from . import _numpy

USE_NUMBA = not os.environ.get("TRANSKIT_NO_NUMBA")

if USE_NUMBA:
    try:
        from . import _numba as _backend
    except ImportError:  # numba missing: degrade silently to numpy
        _backend = _numpy
        USE_NUMBA = False
else:
    _backend = _numpy

conv2d_forward = _backend.conv2d_forward
conv2d_backward_input = _backend.conv2d_backward_input
conv2d_backward_kernel = _backend.conv2d_backward_kernel

numpy_backend = _numpy

__all__ = [
    "conv2d_forward", "conv2d_backward_input", "conv2d_backward_kernel",
    "USE_NUMBA", "numpy_backend",
]

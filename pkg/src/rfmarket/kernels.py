"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is used when it is
missing or when the ``RFMARKET_PURE_PYTHON`` environment variable is set to a
non-empty value other than ``0``.
"""

import os

import numpy as np

from . import _kernels_py as python_backend

try:
    from . import _kernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("RFMARKET_PURE_PYTHON", "") in ("", "0"):
    _active = compiled_backend
    BACKEND = "cython"
else:
    _active = python_backend
    BACKEND = "python"


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def logquad_eval(phi, B, A, x, w2):
    """(value, gradient) of sum_c phi_c (w2 ln(1 + B_c.x) - A_c.x^2)."""
    return _active.logquad_eval(_c(phi), _c(B), _c(A), _c(x), float(w2))


def logquad_hess(phi, B, A, x, w2):
    return _active.logquad_hess(_c(phi), _c(B), _c(A), _c(x), float(w2))


def reciprocal_sum(phi, s, offset, scale):
    """sum_c phi_c / (offset + scale * s_c)."""
    return _active.reciprocal_sum(_c(phi), _c(s), float(offset), float(scale))

"""Pure numpy implementation of the composition-sum kernels.

Mirrors ``_kernels.pyx`` argument for argument; used when the extension is
not built or when ``RFMARKET_PURE_PYTHON`` is set.
"""

import math

import numpy as np


def logquad_eval(phi, B, A, x, w2):
    t = B @ x
    if np.any(t <= -1.0):
        return math.nan, np.full(B.shape[1], math.nan)
    value = math.fsum(phi * (w2 * np.log1p(t) - (A * (x * x)).sum(axis=1)))
    terms = phi[:, None] * (B * (w2 / (1.0 + t))[:, None] - 2.0 * A * x)
    grad = np.array([math.fsum(col) for col in terms.T])
    return value, grad


def logquad_hess(phi, B, A, x, w2):
    t = B @ x
    s = phi * w2 / (1.0 + t) ** 2
    return -(B.T * s) @ B - 2.0 * np.diag(phi @ A)


def reciprocal_sum(phi, s, offset, scale):
    return math.fsum(phi / (offset + scale * s))

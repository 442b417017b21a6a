"""Composition-weighted log-plus-quadratic objectives.

All mechanisms in the package maximize something of the form

    F(x) = sum_c phi_c * (W * log2(1 + B_c . x) - A_c . x**2)

over x >= 0, where rows c range over compositions (or a single realization).
``B`` and ``A`` are nonnegative, so F is concave on the nonnegative orthant.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .combinatorics import DEFAULT_CAP, composition_table
from .model import LOG2E


class LogQuadObjective:
    def __init__(self, phi, B, A, bandwidth_w=1.0):
        self.phi = np.ascontiguousarray(phi, dtype=np.float64)
        self.B = np.ascontiguousarray(np.atleast_2d(B), dtype=np.float64)
        self.A = np.ascontiguousarray(np.atleast_2d(A), dtype=np.float64)
        self.bandwidth_w = float(bandwidth_w)
        if self.B.shape != self.A.shape or self.B.shape[0] != self.phi.shape[0]:
            raise ValueError("phi, B and A have inconsistent shapes")
        if np.any(self.B < 0) or np.any(self.A < 0):
            raise ValueError("coefficients must be nonnegative for concavity")
        self._w2 = self.bandwidth_w * LOG2E

    @property
    def dim(self) -> int:
        return self.B.shape[1]

    def _x(self, x):
        return np.ascontiguousarray(x, dtype=np.float64).reshape(self.dim)

    def value_grad(self, x):
        return kernels.logquad_eval(self.phi, self.B, self.A, self._x(x), self._w2)

    def value(self, x) -> float:
        return self.value_grad(x)[0]

    def grad(self, x):
        return self.value_grad(x)[1]

    def hess(self, x):
        return kernels.logquad_hess(self.phi, self.B, self.A, self._x(x), self._w2)

    def natural_scale(self) -> float:
        """Variable scale at which the throughput argument B.x is of order one."""
        mass = float(self.phi @ self.B.sum(axis=1))
        return self.dim / mass if mass > 0 else 1.0

    def scaled(self, s: float) -> "LogQuadObjective":
        """Objective in u with x = s*u, divided by W (same functional form)."""
        return LogQuadObjective(self.phi, self.B * s, self.A * (s * s / self.bandwidth_w), 1.0)


def expected_welfare_objective(market, cap=None) -> LogQuadObjective:
    """Expected social welfare as a function of per-type received powers.

    With IR binding for every type this is also the centralized DAP's objective.
    """
    counts, probs = composition_table(market.n_eaps, market.n_types, cap or DEFAULT_CAP)
    n = counts.astype(float)
    return LogQuadObjective(probs, market.gamma * n, n / market.thetas, market.bandwidth_w)

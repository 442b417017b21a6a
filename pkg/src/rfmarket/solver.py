"""Concave maximization over the nonnegative orthant, bisection, gradient audit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BracketError, ConvergenceError, DomainError


@dataclass(frozen=True)
class SolveOptions:
    grad_tol: float = 1e-9
    max_iters: int = 10_000
    fd_check: bool = False
    x_init: float = 1e-3
    armijo: float = 1e-4

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise DomainError("grad_tol must be positive")
        if self.max_iters < 1:
            raise DomainError("max_iters must be at least 1")


@dataclass
class SolveReport:
    x_star: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool
    fd_deviation: Optional[float] = None


def projected_residual(x, g) -> float:
    """max_i |x_i - max(0, x_i + g_i)|; zero exactly at a KKT point of max f s.t. x >= 0."""
    return float(np.max(np.abs(x - np.maximum(0.0, x + g)))) if len(x) else 0.0


def _finite(v, g):
    if not (math.isfinite(v) and np.all(np.isfinite(g))):
        raise ConvergenceError("non-finite objective or gradient encountered")


def maximize_concave_nonneg(
    fun: Callable,
    grad: Callable,
    x0=None,
    opts: Optional[SolveOptions] = None,
    hess: Optional[Callable] = None,
    dim: Optional[int] = None,
) -> SolveReport:
    """Maximize a smooth concave ``fun`` subject to x >= 0.

    Projected gradient ascent with Armijo backtracking along the projection
    arc.  When ``hess`` is supplied, free coordinates take a Newton step on the
    reduced Hessian (coordinates pinned at zero with a negative slope are
    excluded), which gives fast local convergence to tight tolerances.
    The returned report is not raised on; check ``converged``.
    """
    opts = opts or SolveOptions()
    if x0 is None:
        if dim is None:
            raise DomainError("either x0 or dim is required")
        x = np.full(dim, opts.x_init)
    else:
        x = np.maximum(np.array(x0, dtype=float), 0.0)
    f = fun(x)
    g = np.asarray(grad(x), dtype=float)
    _finite(f, g)
    fd_dev = check_gradient(fun, grad, x) if opts.fd_check else None
    step = 1.0
    it = 0
    res = projected_residual(x, g)
    while res > opts.grad_tol and it < opts.max_iters:
        it += 1
        eps = min(1e-12 + res, 1e-6)
        active = (x <= eps) & (g < 0)
        d = g.copy()
        newton = False
        if hess is not None:
            free = ~active
            if free.any():
                H = np.asarray(hess(x), dtype=float)[np.ix_(free, free)]
                try:
                    dn = -np.linalg.solve(H, g[free])
                except np.linalg.LinAlgError:
                    dn = None
                if dn is not None and np.all(np.isfinite(dn)) and g[free] @ dn > 0:
                    d[free] = dn
                    newton = True
        # Near the optimum true gains drop below the resolution of f; there a
        # step is accepted if f did not measurably fall and the slope along the
        # step is still nonnegative at its end (ascent certificate for concave f).
        slack = 8 * np.finfo(float).eps * max(1.0, abs(f))
        accepted = False
        gn = None
        for use_newton in ((True, False) if newton else (False,)):
            dd = d if use_newton else g
            alpha = 1.0 if use_newton else step
            for _ in range(80):
                xn = np.maximum(0.0, x + alpha * dd)
                if use_newton:
                    xn[active] = 0.0
                fn = fun(xn)
                if math.isfinite(fn):
                    gain = fn - f
                    if gain >= opts.armijo * (g @ (xn - x)):
                        accepted = True
                    elif gain >= -slack:
                        gn = np.asarray(grad(xn), dtype=float)
                        accepted = bool(gn @ (xn - x) >= 0)
                    if accepted:
                        break
                    gn = None
                alpha *= 0.5
            if accepted:
                if not use_newton:
                    step = min(alpha * 2.0, 1e12)
                break
        if not accepted:
            break
        x, f = xn, fn
        g = gn if gn is not None else np.asarray(grad(x), dtype=float)
        _finite(f, g)
        res = projected_residual(x, g)
    return SolveReport(x, float(f), res, it, res <= opts.grad_tol, fd_dev)


def bisect_root(g: Callable[[float], float], lo: float, hi: float, tol: float = 1e-14) -> float:
    """Root of a continuous monotone ``g`` on [lo, hi], bracketed to width ``tol``."""
    glo, ghi = g(lo), g(hi)
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    if glo * ghi > 0:
        raise BracketError(f"g({lo})={glo} and g({hi})={ghi} have the same sign")
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            return mid
        gm = g(mid)
        if gm == 0:
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def check_gradient(fun, grad, x, h: float = 1e-6) -> float:
    """Max deviation of central differences from ``grad``, relative to the gradient's max norm."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(grad(x), dtype=float)
    fd = np.empty_like(x)
    for i in range(len(x)):
        hi = h * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += hi
        xm[i] -= hi
        fd[i] = (fun(xp) - fun(xm)) / (2 * hi)
    if not (np.all(np.isfinite(fd)) and np.all(np.isfinite(g))):
        raise DomainError("non-finite function or gradient evaluation")
    scale = max(float(np.max(np.abs(g))), float(np.max(np.abs(fd))), 1e-300)
    return float(np.max(np.abs(fd - g)) / scale)


def maximize_objective(obj, opts: Optional[SolveOptions] = None, x0=None, transform=None) -> SolveReport:
    """Solve a :class:`LogQuadObjective` in its natural scale; report is in original units.

    With ``transform`` (a matrix T), the search runs over u >= 0 with
    x = s * T @ u, e.g. T lower-triangular ones to keep x nondecreasing.
    ``kkt_residual`` is measured on the rescaled problem (values divided by W,
    variables divided by the natural scale), which is what ``grad_tol`` bounds.
    """
    s = obj.natural_scale()
    scaled = obj.scaled(s)
    T = np.eye(obj.dim) if transform is None else np.asarray(transform, dtype=float)
    fun = lambda u: scaled.value(T @ u)
    grad = lambda u: T.T @ scaled.grad(T @ u)
    hess = lambda u: T.T @ scaled.hess(T @ u) @ T
    u0 = None
    if x0 is not None:
        u0 = np.linalg.solve(T, np.asarray(x0, dtype=float) / s)
    rep = maximize_concave_nonneg(fun, grad, u0, opts, hess=hess, dim=T.shape[1])
    x = s * (T @ rep.x_star)
    return SolveReport(x, obj.value(x), rep.kkt_residual, rep.iterations, rep.converged, rep.fd_deviation)


def require_converged(rep: SolveReport, what: str) -> SolveReport:
    if not rep.converged:
        raise ConvergenceError(
            f"{what}: no convergence after {rep.iterations} iterations "
            f"(KKT residual {rep.kkt_residual:.3e})",
            rep,
        )
    return rep

"""Optimal contract under asymmetric information and the centralized benchmark."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .combinatorics import DEFAULT_CAP, composition_table
from .errors import DomainError, FeasibilityError, MonotonicityError
from .model import LOG2E, ContractMenu, Market, _theta_value
from .objective import LogQuadObjective, expected_welfare_objective
from .solver import SolveOptions, SolveReport, maximize_objective, require_converged

FEASIBILITY_TOL = 1e-8


@dataclass(frozen=True)
class FeasibilityReport:
    ir_ok: bool
    ir_worst_type: int
    ir_margin: float
    ic_ok: bool
    ic_worst_pair: Optional[tuple]
    ic_margin: float
    monotone_ok: bool

    @property
    def feasible(self) -> bool:
        return self.ir_ok and self.ic_ok


@dataclass(frozen=True)
class ContractSolution:
    menu: ContractMenu
    expected_dap_utility: float
    expected_welfare: float
    solve: SolveReport
    feasibility: FeasibilityReport
    pooled: bool = False


def _thetas(market_or_thetas):
    if isinstance(market_or_thetas, Market):
        return market_or_thetas.thetas
    th = np.asarray(market_or_thetas, dtype=float)
    if np.any(th <= 0):
        raise DomainError("types must be positive")
    return th


def utility_matrix(menu: ContractMenu, thetas) -> np.ndarray:
    """U[k, j]: utility of a type-k EAP taking item j."""
    q = np.asarray(menu.q)
    pi = np.asarray(menu.pi)
    return pi[None, :] - (q * q)[None, :] / np.asarray(thetas, dtype=float)[:, None]


def check_feasibility(menu: ContractMenu, market, tol: float = FEASIBILITY_TOL) -> FeasibilityReport:
    """Audit all K IR and K(K-1) IC constraints explicitly."""
    th = _thetas(market)
    if len(menu) != len(th):
        raise DomainError(f"menu has {len(menu)} items for {len(th)} types")
    U = utility_matrix(menu, th)
    own = np.diag(U)
    ir_worst = int(np.argmin(own))
    ir_margin = float(own[ir_worst])
    gap = own[:, None] - U
    np.fill_diagonal(gap, np.inf)
    if len(th) > 1:
        k, j = np.unravel_index(int(np.argmin(gap)), gap.shape)
        ic_pair, ic_margin = (int(k), int(j)), float(gap[k, j])
    else:
        ic_pair, ic_margin = None, math.inf
    monotone = bool(np.all(np.diff(np.asarray(menu.pi)) >= -tol))
    return FeasibilityReport(
        ir_margin >= -tol, ir_worst, ir_margin, ic_margin >= -tol, ic_pair, ic_margin, monotone
    )


def _ceil_float(x: Fraction) -> float:
    """Smallest float >= x."""
    f = float(x)
    return math.nextafter(f, math.inf) if Fraction(f) < x else f


def recover_rewards(q, thetas) -> np.ndarray:
    """Rewards making the lowest type's IR and every local downward IC bind.

    pi_1 = q_1^2/theta_1 and pi_k = pi_{k-1} + (q_k^2 - q_{k-1}^2)/theta_k, which
    expands to q_k^2/theta_k plus the accumulated information rent.  Each step is
    evaluated exactly on the stored floats and rounded up, so the binding
    constraints hold exactly (never violated by roundoff) for the returned values.
    """
    q = np.asarray(q, dtype=float)
    th = np.asarray(thetas, dtype=float)
    if q.shape != th.shape:
        raise DomainError("q and thetas must have equal length")
    if np.any(q < 0):
        raise DomainError("q must be nonnegative")
    if np.any(np.diff(th) <= 0):
        raise DomainError("types must be strictly increasing")
    pi = np.empty_like(q)
    prev_pi = Fraction(0)
    prev_q2 = Fraction(0)
    for k, (qk, tk) in enumerate(zip(q, th)):
        q2 = Fraction(qk) ** 2
        pi[k] = _ceil_float(prev_pi + (q2 - prev_q2) / Fraction(tk))
        prev_pi, prev_q2 = Fraction(pi[k]), q2
    return pi


def reduced_coefficients(counts, thetas) -> np.ndarray:
    """Per-composition quadratic weights of the reduced contract objective.

    Row c, column k holds S_k/theta_k - S_{k+1}/theta_{k+1} with S_k the number
    of EAPs of type k or higher (S_{K+1} = 0).
    """
    n = np.atleast_2d(np.asarray(counts, dtype=float))
    th = np.asarray(thetas, dtype=float)
    tail = np.cumsum(n[:, ::-1], axis=1)[:, ::-1]
    w = tail / th
    coef = w.copy()
    coef[:, :-1] -= w[:, 1:]
    # concavity per composition; nonnegative whenever types increase
    assert np.all(coef >= -1e-12 * np.max(w, initial=1.0)), "negative reduced coefficient"
    return np.maximum(coef, 0.0)


def contract_objective(market: Market, cap=None) -> LogQuadObjective:
    """Expected DAP utility with rewards eliminated, as a function of q."""
    counts, probs = composition_table(market.n_eaps, market.n_types, cap or DEFAULT_CAP)
    return LogQuadObjective(
        probs,
        market.gamma * counts.astype(float),
        reduced_coefficients(counts, market.thetas),
        market.bandwidth_w,
    )


def _expectations(market, q, pi, cap):
    counts, probs = composition_table(market.n_eaps, market.n_types, cap or DEFAULT_CAP)
    n = counts.astype(float)
    rate = market.bandwidth_w * np.log1p(market.gamma * (n @ q)) * LOG2E
    dap = math.fsum(probs * (rate - n @ pi))
    welfare = math.fsum(probs * (rate - n @ (q * q / market.thetas)))
    return dap, welfare


def solve_contract(
    market: Market,
    opts: Optional[SolveOptions] = None,
    tol: float = FEASIBILITY_TOL,
    cap=None,
    monotonicity: str = "verify",
) -> ContractSolution:
    """Optimal menu under asymmetric information.

    ``monotonicity="verify"`` maximizes the reduced objective without the
    monotonicity constraint and raises :class:`MonotonicityError` if the result
    violates it.  ``"enforce"`` maximizes over nondecreasing q directly
    (q = cumulative sums of nonnegative increments); adjacent types may then
    share one item.  Both agree whenever the relaxed optimum is monotone.
    """
    obj = contract_objective(market, cap)
    if monotonicity == "verify":
        transform = None
    elif monotonicity == "enforce":
        transform = np.tril(np.ones((market.n_types, market.n_types)))
    else:
        raise DomainError(f"unknown monotonicity mode {monotonicity!r}")
    rep = require_converged(maximize_objective(obj, opts, transform=transform), "contract")
    q = rep.x_star
    pi = recover_rewards(q, market.thetas)
    menu = ContractMenu(tuple(q), tuple(pi))
    report = check_feasibility(menu, market, tol)
    if not report.monotone_ok:
        raise MonotonicityError(f"rewards not monotone in type: {menu.digest()}")
    if not report.feasible:
        raise FeasibilityError(
            f"solved menu infeasible: IR margin {report.ir_margin:.3e}, IC margin {report.ic_margin:.3e}"
        )
    dap, welfare = _expectations(market, q, pi, cap)
    pooled = bool(np.any(np.diff(q) <= 1e-9 * max(1.0, float(q.max(initial=0.0)))))
    return ContractSolution(menu, dap, welfare, rep, report, pooled)


def solve_centralized(market: Market, opts: Optional[SolveOptions] = None, cap=None) -> ContractSolution:
    """Complete-information benchmark: every type held to zero surplus, no IC."""
    obj = expected_welfare_objective(market, cap)
    rep = require_converged(maximize_objective(obj, opts), "centralized")
    q = rep.x_star
    pi = q * q / market.thetas
    menu = ContractMenu(tuple(q), tuple(pi))
    dap, welfare = _expectations(market, q, pi, cap)
    return ContractSolution(menu, dap, welfare, rep, check_feasibility(menu, market))


def ic_profile(menu: ContractMenu, theta, exact: bool = False) -> list:
    """Utility of an EAP of type ``theta`` for each item of the menu.

    With ``exact=True`` the utilities are exact rationals of the stored floats,
    so ties between items are resolved without roundoff.
    """
    th = _theta_value(theta)
    if exact:
        t = Fraction(th)
        return [Fraction(p) - Fraction(q) ** 2 / t for q, p in menu.items]
    return [p - q * q / th for q, p in menu.items]


def own_item_is_optimal(menu: ContractMenu, thetas, k: int) -> bool:
    """Exact check that type ``k`` (0-based) weakly prefers its own item and gets nonnegative utility."""
    prof = ic_profile(menu, np.asarray(thetas, dtype=float)[k], exact=True)
    return prof[k] >= 0 and prof[k] == max(prof)

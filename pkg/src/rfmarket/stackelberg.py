"""Stackelberg pricing under complete and asymmetric information.

The DAP leads with a price per unit received power; each EAP of type theta
best-responds with q = theta * lambda / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .combinatorics import DEFAULT_CAP, composition_table
from .errors import DomainError
from .model import LOG2E, Market, _theta_value
from .objective import LogQuadObjective, expected_welfare_objective
from .solver import bisect_root


@dataclass(frozen=True)
class StackelbergOutcome:
    """Equilibrium of one Stackelberg game.

    ``q_star``/``eap_utilities``/``thetas`` are per EAP for the complete-information
    game and per type for the asymmetric one.  ``dap_utility`` and ``welfare``
    are realized for the former and expectations over compositions for the latter.
    """

    lambda_star: float
    q_star: np.ndarray
    dap_utility: float
    eap_utilities: np.ndarray
    welfare: float
    thetas: np.ndarray
    regime: str


def best_response(lam: float, theta) -> float:
    if lam < 0:
        raise DomainError("price must be nonnegative")
    return _theta_value(theta) * lam / 2.0


def complete_price(theta_sum, gamma: float, bandwidth_w: float):
    """Closed-form equilibrium price for total type mass ``theta_sum``.

    Written as W*log2(e)*gamma / (1 + sqrt(1 + W*log2(e)*gamma^2*Theta)), which
    equals (sqrt(...) - 1) / (gamma*Theta) without cancellation at small Theta.
    Accepts arrays.
    """
    c = bandwidth_w * LOG2E * gamma
    return c / (1.0 + np.sqrt(1.0 + c * gamma * np.asarray(theta_sum, dtype=float)))


def complete_leader_objective(thetas, gamma: float, bandwidth_w: float) -> LogQuadObjective:
    """DAP utility as a function of per-EAP prices, followers at best response."""
    th = np.asarray(thetas, dtype=float)
    return LogQuadObjective([1.0], [gamma * th / 2.0], [th / 2.0], bandwidth_w)


def _outcome(lam, thetas, gamma, w, regime):
    q = thetas * lam / 2.0
    total = math.fsum(q)
    rate = w * math.log1p(gamma * total) * LOG2E
    eap = lam * q - q * q / thetas
    dap = rate - lam * total
    welfare = rate - math.fsum(q * q / thetas)
    return StackelbergOutcome(float(lam), q, dap, eap, welfare, thetas, regime)


def solve_complete(realized_thetas, market: Market) -> StackelbergOutcome:
    """Equilibrium when the DAP observes every EAP's type."""
    th = np.array([_theta_value(t) for t in realized_thetas], dtype=float)
    if th.size == 0:
        raise DomainError("at least one EAP is required")
    lam = float(complete_price(math.fsum(th), market.gamma, market.bandwidth_w))
    return _outcome(lam, th, market.gamma, market.bandwidth_w, "complete")


def thetas_from_counts(counts, market: Market) -> np.ndarray:
    return np.repeat(market.thetas, np.asarray(counts, dtype=int))


def complete_outcomes(counts, market: Market):
    """Vectorized complete-information equilibria for many realized compositions.

    ``counts`` has shape (M, K).  Returns (lambda, dap_utility, welfare) arrays.
    """
    n = np.asarray(counts, dtype=float)
    th = market.thetas
    theta_sum = n @ th
    lam = complete_price(theta_sum, market.gamma, market.bandwidth_w)
    total = lam * theta_sum / 2.0
    rate = market.bandwidth_w * np.log1p(market.gamma * total) * LOG2E
    # sum_k n_k q_k^2 / theta_k with q_k = theta_k lam / 2
    cost = lam * lam * theta_sum / 4.0
    return lam, rate - lam * total, rate - cost


def asymmetric_leader_objective(market: Market, per_type: bool = True, cap=None) -> LogQuadObjective:
    """Expected DAP utility over compositions, followers at best response.

    ``per_type=True`` gives one price per type (K variables); otherwise a
    single price shared by all types.
    """
    counts, probs = composition_table(market.n_eaps, market.n_types, cap or DEFAULT_CAP)
    mass = counts * market.thetas
    if not per_type:
        mass = mass.sum(axis=1, keepdims=True)
    return LogQuadObjective(probs, market.gamma * mass / 2.0, mass / 2.0, market.bandwidth_w)


def omega(lam: float, market: Market, cap=None) -> float:
    """E[1 / (2 + gamma * lam * sum_k n_k theta_k)] over compositions."""
    counts, probs = composition_table(market.n_eaps, market.n_types, cap or DEFAULT_CAP)
    s = np.ascontiguousarray(counts @ market.thetas, dtype=float)
    return kernels.reciprocal_sum(probs, s, 2.0, market.gamma * lam)


def asymmetric_price(market: Market, rule: str = "optimal", tol: float = 1e-14, cap=None) -> float:
    """Single price set without knowledge of the realized composition.

    ``rule="optimal"`` maximizes the expected DAP utility over one common price
    (root of its derivative).  ``rule="omega"`` instead solves
    lam = W*log2(e)*gamma*Omega(lam); that equation drops the n_k*theta_k weights
    from the first-order condition and does not maximize expected utility in
    general, so it is kept only for comparison.  Both roots lie strictly inside
    (0, W*log2(e)*gamma/2).
    """
    hi = market.bandwidth_w * LOG2E * market.gamma / 2.0
    if rule == "optimal":
        obj = asymmetric_leader_objective(market, per_type=False, cap=cap)
        scale = obj.natural_scale()
        g = lambda lam: obj.grad([lam])[0] * scale / market.bandwidth_w
    elif rule == "omega":
        c = 2.0 * hi
        g = lambda lam: c * omega(lam, market, cap) - lam
    else:
        raise DomainError(f"unknown price rule {rule!r}")
    return bisect_root(g, 0.0, hi, tol * hi)


def solve_asymmetric(market: Market, rule: str = "optimal", cap=None) -> StackelbergOutcome:
    """Equilibrium when the DAP knows only N and the (uniform) type distribution.

    Returns per-type best responses; ``dap_utility`` and ``welfare`` are
    expectations over compositions.
    """
    lam = asymmetric_price(market, rule, cap=cap)
    th = market.thetas.copy()
    q = th * lam / 2.0
    dap = asymmetric_leader_objective(market, per_type=False, cap=cap).value([lam])
    welfare = expected_welfare_objective(market, cap).value(q)
    eap = lam * q - q * q / th
    return StackelbergOutcome(lam, q, dap, eap, welfare, th, "asymmetric")


def evaluate_realization(outcome: StackelbergOutcome, counts, market: Market):
    """Realized (DAP utility, welfare) when the fixed price meets composition ``counts``."""
    n = np.asarray(counts, dtype=float)
    if n.shape != (market.n_types,):
        raise DomainError(f"expected {market.n_types} counts, got shape {n.shape}")
    lam = outcome.lambda_star
    q = market.thetas * lam / 2.0
    total = math.fsum(n * q)
    rate = market.bandwidth_w * math.log1p(market.gamma * total) * LOG2E
    return rate - lam * total, rate - math.fsum(n * q * q / market.thetas)

"""Domain types and the utility, welfare and throughput functions.

Units: received power ``q`` in mW, bandwidth in Hz (or MHz when throughput is
read in Mbps), rewards and prices in currency units.  Transmission blocks have
unit duration, so energy and power are interchangeable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError

LOG2E = 1.0 / math.log(2.0)


def _require(cond, message):
    if not cond:
        raise DomainError(message)


@dataclass(frozen=True)
class PhysicalParams:
    eta: float
    bandwidth_w: float
    noise_n0: float
    gain_das: float
    unit_cost_c: float = 1.0

    def __post_init__(self):
        _require(0.0 < self.eta < 1.0, f"eta must lie in (0, 1), got {self.eta}")
        _require(self.bandwidth_w > 0, "bandwidth_w must be positive")
        _require(self.noise_n0 > 0, "noise_n0 must be positive")
        _require(self.gain_das > 0, "gain_das must be positive")
        _require(self.unit_cost_c > 0, "unit_cost_c must be positive")


def derive_gamma(params: PhysicalParams) -> float:
    """Composite SNR coefficient eta * G_as / N0 (per mW)."""
    return params.eta * params.gain_das / params.noise_n0


@dataclass(frozen=True)
class EapType:
    theta: float

    def __post_init__(self):
        _require(self.theta > 0, f"type must be positive, got {self.theta}")


@dataclass(frozen=True)
class EapPhysical:
    """Private physical attributes of one energy access point."""

    cost_coeff_a: float
    gain_gms: float

    def __post_init__(self):
        _require(self.cost_coeff_a > 0, "cost coefficient must be positive")
        _require(self.gain_gms > 0, "channel gain must be positive")

    @property
    def theta(self) -> float:
        return self.gain_gms**2 / self.cost_coeff_a

    def to_type(self) -> EapType:
        return EapType(self.theta)

    def transmit_power(self, q: float) -> float:
        """Transmit power needed to deliver ``q`` at the sensor."""
        return q / self.gain_gms

    def energy_cost(self, q: float) -> float:
        return self.cost_coeff_a * self.transmit_power(q) ** 2


@dataclass(frozen=True)
class Market:
    """DAP-side world model: N EAPs drawn uniformly from K ordered types."""

    n_eaps: int
    types: tuple
    gamma: float
    bandwidth_w: float = 1.0
    params: Optional[PhysicalParams] = None
    _thetas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        types = tuple(float(t.theta if isinstance(t, EapType) else t) for t in self.types)
        object.__setattr__(self, "types", types)
        _require(int(self.n_eaps) == self.n_eaps and self.n_eaps >= 1, "n_eaps must be a positive integer")
        object.__setattr__(self, "n_eaps", int(self.n_eaps))
        _require(len(types) >= 1, "at least one type is required")
        _require(all(t > 0 and math.isfinite(t) for t in types), "types must be positive and finite")
        _require(all(a < b for a, b in zip(types, types[1:])), "types must be strictly increasing")
        _require(self.gamma > 0 and math.isfinite(self.gamma), "gamma must be positive")
        _require(self.bandwidth_w > 0, "bandwidth_w must be positive")
        if self.params is not None:
            expected = derive_gamma(self.params)
            _require(
                math.isclose(self.gamma, expected, rel_tol=1e-12),
                f"gamma {self.gamma} disagrees with physical params ({expected})",
            )
            _require(
                math.isclose(self.bandwidth_w, self.params.bandwidth_w, rel_tol=1e-12),
                "bandwidth_w disagrees with physical params",
            )
        arr = np.array(types, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "_thetas", arr)

    @classmethod
    def from_params(cls, n_eaps, types, params: PhysicalParams):
        return cls(n_eaps, tuple(types), derive_gamma(params), params.bandwidth_w, params)

    @property
    def n_types(self) -> int:
        return len(self.types)

    @property
    def thetas(self) -> np.ndarray:
        return self._thetas

    def with_n_eaps(self, n_eaps: int) -> "Market":
        return Market(n_eaps, self.types, self.gamma, self.bandwidth_w, self.params)

    def with_gamma(self, gamma: float) -> "Market":
        return Market(self.n_eaps, self.types, gamma, self.bandwidth_w)


@dataclass(frozen=True)
class ContractMenu:
    """K energy-reward pairs, item k designed for type k."""

    q: tuple
    pi: tuple

    def __post_init__(self):
        q = tuple(float(v) for v in self.q)
        pi = tuple(float(v) for v in self.pi)
        _require(len(q) == len(pi), "q and pi must have equal length")
        _require(all(v >= 0 for v in q), "received powers must be nonnegative")
        _require(all(v >= 0 for v in pi), "rewards must be nonnegative")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "pi", pi)

    @classmethod
    def from_items(cls, items):
        items = list(items)
        return cls(tuple(i[0] for i in items), tuple(i[1] for i in items))

    @property
    def items(self):
        return list(zip(self.q, self.pi))

    def __len__(self):
        return len(self.q)

    def digest(self) -> str:
        return ";".join(f"{q:.6g}/{p:.6g}" for q, p in self.items)


@dataclass(frozen=True)
class PriceVector:
    lambdas: tuple

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas)
        _require(all(v >= 0 for v in lam), "prices must be nonnegative")
        object.__setattr__(self, "lambdas", lam)


def _theta_value(theta) -> float:
    value = theta.theta if isinstance(theta, EapType) else float(theta)
    _require(value > 0, f"type must be positive, got {value}")
    return value


def throughput(gamma: float, total_q: float, bandwidth_w: float) -> float:
    """Achievable rate W * log2(1 + gamma * total_q)."""
    _require(gamma > 0, "gamma must be positive")
    _require(bandwidth_w > 0, "bandwidth must be positive")
    _require(total_q >= 0, "total received power must be nonnegative")
    return bandwidth_w * math.log1p(gamma * total_q) * LOG2E


def eap_utility_contract(item, theta) -> float:
    q, pi = item
    theta = _theta_value(theta)
    _require(q >= 0, "q must be nonnegative")
    return pi - q * q / theta


def eap_utility_stackelberg(lam: float, q: float, theta) -> float:
    theta = _theta_value(theta)
    _require(lam >= 0, "price must be nonnegative")
    _require(q >= 0, "q must be nonnegative")
    return lam * q - q * q / theta


def _check_lengths(market: Market, *seqs: Sequence):
    k = market.n_types
    for s in seqs:
        if len(s) != k:
            raise DomainError(f"expected length {k}, got {len(s)}")


def social_welfare(counts, q, market: Market) -> float:
    """Throughput value minus total energy cost; transfers cancel."""
    _check_lengths(market, counts, q)
    counts = np.asarray(counts, dtype=float)
    q = np.asarray(q, dtype=float)
    _require(np.all(q >= 0), "q must be nonnegative")
    total = math.fsum(counts * q)
    cost = math.fsum(counts * q * q / market.thetas)
    return throughput(market.gamma, total, market.bandwidth_w) - cost


def dap_utility_contract(counts, menu: ContractMenu, market: Market) -> float:
    _check_lengths(market, counts, menu.q)
    counts = np.asarray(counts, dtype=float)
    total = math.fsum(counts * np.asarray(menu.q))
    paid = math.fsum(counts * np.asarray(menu.pi))
    return throughput(market.gamma, total, market.bandwidth_w) - paid

"""Incentive mechanisms for an RF energy trading market.

A data access point (DAP) buys wireless charging from N energy access points
(EAPs) whose efficiency type is private.  The package solves the optimal
contract, Stackelberg pricing with complete and asymmetric information, and
the centralized welfare benchmark, and compares them by simulation.
"""

from .combinatorics import count_compositions, enumerate_compositions, expect
from .contract import (
    check_feasibility,
    ic_profile,
    recover_rewards,
    solve_centralized,
    solve_contract,
)
from .errors import (
    BracketError,
    ConfigError,
    ConvergenceError,
    DomainError,
    EnumerationCapError,
    FeasibilityError,
    MonotonicityError,
    RFMarketError,
)
from .kernels import BACKEND
from .model import (
    ContractMenu,
    EapPhysical,
    EapType,
    Market,
    PhysicalParams,
    PriceVector,
    derive_gamma,
    dap_utility_contract,
    eap_utility_contract,
    eap_utility_stackelberg,
    social_welfare,
    throughput,
)
from .solver import SolveOptions, SolveReport, bisect_root, check_gradient, maximize_concave_nonneg
from .stackelberg import best_response, evaluate_realization, solve_asymmetric, solve_complete

__version__ = "0.1.0"

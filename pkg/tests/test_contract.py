import math

import numpy as np
import pytest

from rfmarket.combinatorics import composition_table
from rfmarket.contract import (
    check_feasibility,
    contract_objective,
    ic_profile,
    own_item_is_optimal,
    recover_rewards,
    reduced_coefficients,
    solve_centralized,
    solve_contract,
    utility_matrix,
)
from rfmarket.errors import DomainError, MonotonicityError
from rfmarket.model import ContractMenu, Market, dap_utility_contract


def _random_market(rng, n=None, k=None):
    k = k or int(rng.integers(1, 6))
    while True:
        th = np.sort(rng.uniform(0.05, 1.0, k))
        if np.all(np.diff(th) > 0):
            break
    return Market(n or int(rng.integers(1, 5)), tuple(th / th[-1]), float(rng.uniform(0.3, 5)))


def test_ir_binding_menu():
    th = np.array([0.5, 1.0, 2.0])
    q = np.array([0.3, 0.4, 0.9])
    rep = check_feasibility(ContractMenu(tuple(q), tuple(q * q / th)), th)
    assert rep.ir_ok and rep.ir_margin == pytest.approx(0.0, abs=1e-15)


def test_two_type_example():
    menu = ContractMenu.from_items([(1, 1), (2, 2.5)])
    rep = check_feasibility(menu, [1.0, 2.0])
    assert rep.feasible and rep.monotone_ok
    assert rep.ic_margin == 0.0 and rep.ic_worst_pair == (1, 0)


def test_swapped_rewards_violate_ic():
    menu = ContractMenu.from_items([(1, 2.5), (2, 1)])
    rep = check_feasibility(menu, [1.0, 2.0])
    assert not rep.ic_ok and not rep.monotone_ok


def test_feasibility_length_mismatch():
    with pytest.raises(DomainError):
        check_feasibility(ContractMenu.from_items([(1, 1)]), [1.0, 2.0])


def test_utility_matrix():
    menu = ContractMenu.from_items([(1, 1), (2, 2.5)])
    np.testing.assert_allclose(utility_matrix(menu, [1.0, 2.0]), [[0.0, -1.5], [0.5, 0.5]])


def test_recover_rewards_examples():
    np.testing.assert_allclose(recover_rewards([1, 2], [1, 2]), [1, 2.5])
    np.testing.assert_array_equal(recover_rewards(np.zeros(4), [0.1, 0.2, 0.3, 0.4]), np.zeros(4))
    with pytest.raises(DomainError):
        recover_rewards([1, 2], [2, 1])
    with pytest.raises(DomainError):
        recover_rewards([1, -2], [1, 2])


def test_recovered_menus_pass_full_audit():
    rng = np.random.default_rng(0)
    for _ in range(200):
        k = int(rng.integers(1, 8))
        th = np.sort(rng.uniform(0.05, 2.0, k))
        if np.any(np.diff(th) <= 0):
            continue
        q = np.sort(rng.uniform(0, 2, k))
        pi = recover_rewards(q, th)
        rep = check_feasibility(ContractMenu(tuple(q), tuple(pi)), th)
        assert rep.feasible and rep.monotone_ok
        # only the lowest type's IR binds; downward neighbours bind, upward ones are slack
        own = pi - q * q / th
        assert own[0] == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.diff(own) >= -1e-12)
        for j in range(1, k):
            down = pi[j - 1] - q[j - 1] ** 2 / th[j]
            up = pi[j] - q[j] ** 2 / th[j - 1]
            assert own[j] == pytest.approx(down, abs=1e-12)
            assert own[j - 1] >= up - 1e-12


def test_reduced_coefficients_nonnegative():
    counts, _ = composition_table(4, 5)
    coef = reduced_coefficients(counts, [0.1, 0.2, 0.5, 0.7, 1.0])
    assert coef.shape == counts.shape and np.all(coef >= 0)
    np.testing.assert_allclose(coef[:, -1], counts[:, -1] / 1.0)


def test_reduced_objective_equals_expected_dap_utility():
    rng = np.random.default_rng(1)
    for _ in range(20):
        m = _random_market(rng)
        q = np.sort(rng.uniform(0, 1, m.n_types))
        menu = ContractMenu(tuple(q), tuple(recover_rewards(q, m.thetas)))
        counts, probs = composition_table(m.n_eaps, m.n_types)
        direct = math.fsum(p * dap_utility_contract(c, menu, m) for c, p in zip(counts, probs))
        assert contract_objective(m).value(q) == pytest.approx(direct, rel=1e-12, abs=1e-13)


def test_single_type_contract_is_centralized():
    m = Market(3, (0.7,), 2.2)
    c = solve_contract(m)
    z = solve_centralized(m)
    assert c.menu.pi[0] == pytest.approx(c.menu.q[0] ** 2 / 0.7, rel=1e-14)
    assert c.menu.q[0] == pytest.approx(z.menu.q[0], rel=1e-9)
    assert c.expected_welfare == pytest.approx(z.expected_welfare, rel=1e-12)


def _grid_argmax(fn, hi=5.0, step=1e-3):
    g = np.arange(0.0, hi + step / 2, step)
    best, arg = -np.inf, None
    for start in range(0, len(g), 400):
        q1 = g[start : start + 400, None]
        vals = fn(q1, g[None, :])
        i = np.unravel_index(np.argmax(vals), vals.shape)
        if vals[i] > best:
            best, arg = vals[i], (q1[i[0], 0], g[i[1]])
    return np.array(arg)


def _expected_welfare_2x2(q1, q2, th, gamma):
    out = 0.0
    for (n1, n2), p in (((2, 0), 0.25), ((1, 1), 0.5), ((0, 2), 0.25)):
        out = out + p * (np.log2(1 + gamma * (n1 * q1 + n2 * q2)) - n1 * q1**2 / th[0] - n2 * q2**2 / th[1])
    return out


def _reduced_2x2(q1, q2, th, gamma):
    out = 0.0
    for (n1, n2), p in (((2, 0), 0.25), ((1, 1), 0.5), ((0, 2), 0.25)):
        s1, s2 = n1 + n2, n2
        out = out + p * (
            np.log2(1 + gamma * (n1 * q1 + n2 * q2)) - (s1 / th[0] - s2 / th[1]) * q1**2 - s2 / th[1] * q2**2
        )
    return out


@pytest.mark.parametrize("th,gamma", [((0.5, 1.0), 2.0), ((0.3, 1.0), 4.0)])
def test_two_by_two_grid_oracles(th, gamma):
    m = Market(2, th, gamma)
    c = solve_contract(m)
    z = solve_centralized(m)
    assert np.all(np.abs(np.array(c.menu.q) - _grid_argmax(lambda a, b: _reduced_2x2(a, b, th, gamma))) <= 2e-3)
    assert np.all(np.abs(np.array(z.menu.q) - _grid_argmax(lambda a, b: _expected_welfare_2x2(a, b, th, gamma))) <= 2e-3)


def test_random_markets_self_audit():
    rng = np.random.default_rng(2)
    for _ in range(200):
        m = _random_market(rng)
        sol = solve_contract(m, monotonicity="enforce")
        cen = solve_centralized(m)
        rep = check_feasibility(sol.menu, m, 1e-8)
        assert rep.feasible and rep.monotone_ok
        assert sol.solve.converged and sol.solve.kkt_residual <= 1e-9
        q, pi = np.array(sol.menu.q), np.array(sol.menu.pi)
        assert np.all(np.diff(q) >= 0)
        # pi_i > pi_j exactly when q_i > q_j, and higher types never get less
        for i in range(m.n_types):
            for j in range(m.n_types):
                if q[i] > q[j] + 1e-9:
                    assert pi[i] > pi[j]
                if pi[i] > pi[j] + 1e-9:
                    assert q[i] > q[j]
        assert np.all(np.diff(pi) >= -1e-12)
        assert cen.expected_welfare >= sol.expected_welfare - 1e-9
        assert sol.expected_welfare == pytest.approx(sol.expected_dap_utility + _expected_rent(sol, m), rel=1e-9, abs=1e-12)


def _expected_rent(sol, m):
    q, pi = np.array(sol.menu.q), np.array(sol.menu.pi)
    return m.n_eaps / m.n_types * float(np.sum(pi - q * q / m.thetas))


def test_verify_mode_reports_nonmonotone_relaxation():
    rng = np.random.default_rng(3)
    hits = 0
    for _ in range(60):
        m = _random_market(rng, k=int(rng.integers(3, 7)))
        try:
            relaxed = solve_contract(m, monotonicity="verify")
        except MonotonicityError:
            hits += 1
            assert check_feasibility(solve_contract(m, monotonicity="enforce").menu, m).feasible
        else:
            enforced = solve_contract(m, monotonicity="enforce")
            np.testing.assert_allclose(enforced.menu.q, relaxed.menu.q, rtol=1e-6, atol=1e-9)
    assert hits > 0
    with pytest.raises(DomainError):
        solve_contract(Market(1, (1.0,), 1.0), monotonicity="iron")


def test_regular_market_is_strictly_separating():
    m = Market(5, tuple(np.arange(1, 11) / 10), 2.2)
    sol = solve_contract(m, monotonicity="verify")
    assert not sol.pooled
    assert np.all(np.diff(sol.menu.q) > 0)


def test_ic_profile():
    m = Market(5, tuple(np.arange(1, 11) / 10), 2.2)
    sol = solve_contract(m)
    prof = ic_profile(sol.menu, m.thetas[5])
    assert len(prof) == 10
    assert max(prof) - prof[5] <= 1e-15
    assert ic_profile(ContractMenu.from_items([(1, 2)]), 1.0) == [1.0]
    for k in range(m.n_types):
        assert own_item_is_optimal(sol.menu, m.thetas, k)
        exact = ic_profile(sol.menu, m.thetas[k], exact=True)
        # binding downward IC: the item just below ties up to the upward rounding of rewards
        if k > 0:
            assert 0 <= exact[k] - exact[k - 1] <= 1e-15
        assert all(u < exact[k] for j, u in enumerate(exact) if j not in (k - 1, k))


def test_own_item_check_detects_violation():
    menu = ContractMenu.from_items([(1, 2.5), (2, 1)])
    assert not own_item_is_optimal(menu, [1.0, 2.0], 1)


def test_rewards_make_binding_constraints_exact():
    rng = np.random.default_rng(4)
    for _ in range(200):
        k = int(rng.integers(2, 9))
        th = np.sort(rng.uniform(0.05, 2.0, k))
        q = np.sort(rng.uniform(0, 2, k))
        if np.any(np.diff(th) <= 0):
            continue
        pi = recover_rewards(q, th)
        menu = ContractMenu(tuple(q), tuple(pi))
        for j in range(k):
            assert own_item_is_optimal(menu, th, j)

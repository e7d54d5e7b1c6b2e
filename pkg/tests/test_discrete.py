import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robust_reserve.closed_form import NumericError, single_mean_ub
from robust_reserve.core import ParametricSetting
from robust_reserve.discrete import (ConvergenceTable, convergence_study, discrete_lagrangian,
                                     nature_step, residuals, second_order_slack, seller_step,
                                     solve_discrete_single, solve_discrete_two)

from oracles import DISCRETE_K2_LAM, DISCRETE_K2_Q1, DISCRETE_K2_X

S03 = ParametricSetting(2, 0.3, 1.0)


def test_k2_hand_oracle():
    # x1^2 - 2.4 x1 + 0.98 = 0, smaller root
    x1 = (2.4 - math.sqrt(2.4 ** 2 - 4 * 0.98)) / 2
    x2 = math.sqrt(2 * x1 - x1 * x1)
    # q2 = 1, q1 (1 - x1) = lam / 2 and q1 = q2 - (lam / 2 - q2 (1 - x2)) / (r2 x2) * delta
    r2, delta = 0.5, 0.5
    # with r2 = delta: lam / (2 (1 - x1)) = 1 - (lam / 2 - (1 - x2)) / x2
    lam = 2 * (1 + (1 - x2) / x2) / (1 / (1 - x1) + 1 / x2)
    q1 = lam / (2 * (1 - x1))
    assert (x1, x2) == pytest.approx(DISCRETE_K2_X, abs=1e-15)
    assert lam == pytest.approx(DISCRETE_K2_LAM, abs=1e-15)
    assert q1 == pytest.approx(DISCRETE_K2_Q1, abs=1e-15)
    eq = solve_discrete_two(S03, 2)
    assert np.allclose(eq.x, [x1, x2], atol=1e-12)
    assert np.allclose(eq.q, [q1, 1.0], atol=1e-12)
    assert eq.lam == pytest.approx(lam, abs=1e-12)
    assert seller_step(delta, r2, 1.0, x2, lam) == pytest.approx(q1, abs=1e-12)


def test_nature_step_examples():
    assert nature_step(0.1, 0.3, 0.0) == 0.0
    assert nature_step(0.1, 0.3, 1.0) == 1.0
    x1 = DISCRETE_K2_X[0]
    assert nature_step(0.5, 0.0, x1) == pytest.approx(DISCRETE_K2_X[1], abs=1e-12)
    assert nature_step(0.5, 0.0, 0.5218) == pytest.approx(math.sqrt(2 * 0.5218 - 0.5218 ** 2),
                                                          abs=1e-15)
    with pytest.raises(ValueError):
        nature_step(0.1, 0.3, 0.5, n=1)


def test_nature_step_n3_stays_in_unit_interval():
    for x in np.linspace(0.01, 0.99, 20):
        y = nature_step(0.01, 0.4, x, n=3)
        assert x <= y <= 1.0


def test_seller_step_examples():
    q, x, n = 0.7, 0.6, 3
    lam = n * q * (n - 1) * x ** (n - 2) * (1 - x)
    assert seller_step(0.1, 0.5, q, x, lam, n) == pytest.approx(q, abs=1e-15)
    assert seller_step(0.0, 0.5, 0.8, 0.6, 0.9) == 0.8
    assert seller_step(1e-12, 0.5, 0.8, 0.6, 0.9) == pytest.approx(0.8, abs=1e-10)
    with pytest.raises(ValueError):
        seller_step(0.1, 0.0, 0.8, 0.6, 0.9)
    with pytest.raises(ValueError):
        seller_step(0.1, 0.5, 0.8, 0.0, 0.9)


@pytest.mark.parametrize("k", [10, 100, 1000, 10000])
def test_solver_residuals_and_invariants(k):
    eq = solve_discrete_two(S03, k)
    res = residuals(eq)
    assert max(res.values()) < 1e-12, res
    assert eq.q[-1] == 1.0
    assert eq.x[0] >= 0 and eq.x[-1] < 1
    assert np.all(np.diff(eq.log_x) > 0)
    assert eq.q[0] > 0 and np.all(np.diff(eq.q) >= 0)
    assert np.all(second_order_slack(eq) >= -1e-15)
    assert 1.0 / k * math.fsum(1 - eq.x) == pytest.approx(0.3, abs=1e-12)


def test_solver_other_settings():
    for mu, vbar, k in [(0.1, 1.0, 50), (0.9, 1.0, 50), (1.5, 2.0, 300), (0.05, 0.2, 1000)]:
        eq = solve_discrete_two(ParametricSetting(2, mu, vbar), k)
        assert max(residuals(eq).values()) < 1e-12


def test_solver_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_discrete_two(ParametricSetting(3, 0.3, 1.0), 10)
    with pytest.raises(ValueError):
        solve_discrete_two(S03, 1)


def test_discrete_best_response_perturbation():
    k = 20
    eq = solve_discrete_two(S03, k)
    base = discrete_lagrangian(eq.q, eq.x, eq.lam, 1.0)
    worst = 0.0
    for i in range(k):
        j = (i + 1) % k
        for sgn in (1, -1):
            x = eq.x.copy()
            x[i] += sgn * 1e-4
            x[j] -= sgn * 1e-4
            if x.min() < 0 or x.max() > 1:
                continue
            worst = min(worst, discrete_lagrangian(eq.q, x, eq.lam, 1.0) - base)
    assert worst >= -1e-8


def test_single_discrete_examples():
    sol = single_mean_ub(ParametricSetting(1, 0.3, 1.0))
    eq = solve_discrete_single(0.3, 1.0, sol.uv, 4)
    assert np.allclose(eq.q, [0.25, 0.5, 0.75, 1.0])
    alpha = (1.0 / sol.uv) ** 0.25
    assert eq.alpha == pytest.approx(alpha, rel=1e-15)
    assert eq.x[0] == pytest.approx(1 - (0.3 - sol.uv) / (4 * sol.uv * (alpha - 1)), abs=1e-15)
    assert np.all(np.diff(eq.x) >= 0)
    # geometric mean constraint
    mean = sol.uv + (alpha - 1) * math.fsum(eq.grid[:4] * (1 - eq.x))
    assert mean == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(ValueError):
        solve_discrete_single(0.3, 1.0, 0.5, 4)


def test_single_discrete_limit():
    sol = single_mean_ub(ParametricSetting(1, 0.3, 1.0))
    k = 10_000
    eq = solve_discrete_single(0.3, 1.0, sol.uv, k)
    r = math.sqrt(sol.uv)
    i = int(np.argmin(np.abs(eq.grid[:k] - r)))
    limit = 1 - (0.3 - sol.uv) / (eq.grid[i] * math.log(1 / sol.uv))
    assert abs(eq.x[i] - limit) < 1e-3


def test_convergence_study():
    table = convergence_study(S03, [10, 100, 1000])
    assert table.dist_F[0] > table.dist_F[1] > table.dist_F[2]
    assert table.dist_Q[0] > table.dist_Q[1] > table.dist_Q[2]
    assert min(table.improvement) >= 5
    assert table.passed
    assert table.dist_F[-1] < 0.02
    again = convergence_study(S03, [100, 100])
    assert again.dist_F[0] == again.dist_F[1] and again.dist_Q[0] == again.dist_Q[1]
    assert table.to_csv().splitlines()[0] == "k,dist_F,dist_Q"


def test_convergence_table_flags():
    assert not ConvergenceTable((10, 100), (0.1, 0.2), (0.1, 0.01)).passed
    assert not ConvergenceTable((10, 100), (0.1, 0.05), (0.1, 0.01)).passed
    assert ConvergenceTable((10, 100), (0.1, 0.01), (0.1, 0.01)).passed


def test_csv_format():
    text = solve_discrete_two(S03, 2).to_csv().splitlines()
    assert text[0] == "i,r,x,q"
    assert text[2].startswith("2,0.5,")
    assert "np." not in "".join(text)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.02, 0.98), st.integers(2, 400))
def test_solver_property(frac, k):
    try:
        eq = solve_discrete_two(ParametricSetting(2, frac, 1.0), k)
    except NumericError:
        pytest.fail("bracket failure")
    assert max(residuals(eq).values()) < 1e-12
    assert np.all(second_order_slack(eq) >= -1e-15)

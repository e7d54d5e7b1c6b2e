"""Acceptance suite: ten criteria, each reported as one PASS/FAIL line.

Run with pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""
import math
import os
import sys
from fractions import Fraction

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from robust_reserve.closed_form import (equilibrium_n, equilibrium_two, single_two_moment, solve,
                                        solve_uv_n, solve_uv_two, uv_equation_residual,
                                        uv_n_equation_residual)
from robust_reserve.core import ParametricSetting, discrete_distribution
from robust_reserve.discrete import (convergence_study, residuals, second_order_slack,
                                     solve_discrete_two)
from robust_reserve.mechanisms import (FirstPrice, IronedMechanism, SecondPrice, expected_revenue,
                                       truthfulness_check)
from robust_reserve.montecarlo import simulate_auction
from robust_reserve.revenue import rev_fixed_reserve, rev_randomized, robust_revenue_formula
from robust_reserve.verify import (certify_equilibrium, check_pointwise_lagrangian, perturb_atom,
                                   reserve_perturbation_control)

from oracles import DISCRETE_K2_LAM, DISCRETE_K2_Q1, DISCRETE_K2_X, REV_TWO_2E

E = math.e
TITLES = {
    1: "three-bidder example: SPA revenue 0.625 and ironed revenue 3/4",
    2: "three-bidder equilibrium: v0 = 5/9, atom 0.75, no reserve",
    3: "root residuals < 1e-12 and uv = 1/e at mu = 2/e",
    4: "two-bidder seller indifference < 1e-9",
    5: "certification of 20 settings and negative controls",
    6: "discrete game k = 2 oracle, residuals, second-order condition",
    7: "discrete-to-continuous convergence of at least 5x",
    8: "Monte Carlo within 4 standard errors (1e7 trials)",
    9: "two-moment multipliers and revenue guarantee",
    10: "truthfulness of the ironed mechanism, first-price control fails",
}
# criterion -> list of (part, ok, detail)
RESULTS = {}


def record(crit, ok, detail, part=""):
    RESULTS.setdefault(crit, []).append((part, bool(ok), detail))
    assert ok, f"criterion {crit} {part}: {detail}"


def summary_lines():
    lines = []
    for crit in sorted(TITLES):
        parts = RESULTS.get(crit)
        if not parts:
            continue
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{p[0]} {p[2]}".strip() for p in parts)
        lines.append(f"[{'PASS' if ok else 'FAIL'}] criterion {crit}: {TITLES[crit]} ({detail})")
    return lines


def test_criterion_01_example_revenues():
    F = equilibrium_n(ParametricSetting(3, 2 / 3, 1.0)).F_star
    spa = rev_fixed_reserve(F, 0.0, 3)
    support, probs = [Fraction(5, 9), Fraction(1)], [Fraction(3, 4), Fraction(1, 4)]
    spa_exact = expected_revenue(SecondPrice(0), support, probs, 3)
    ironed = expected_revenue(IronedMechanism(), support, probs, 3)
    ok = abs(spa - 0.625) <= 1e-12 and spa_exact == Fraction(5, 8) and \
        abs(float(ironed) - 0.75) <= 1e-12
    record(1, ok, f"spa={spa!r}, spa_exact={spa_exact}, ironed={ironed}")


def test_criterion_02_fig4_equilibrium():
    sol = equilibrium_n(ParametricSetting(3, 2 / 3, 1.0))
    mass = sol.F_star.atom_mass(sol.v0)
    ok = (abs(sol.v0 - 5 / 9) <= 1e-12 and abs(mass - 0.75) <= 1e-12
          and sol.Q_star.atoms == ((0.0, 1.0),) and sol.Q_star.cdf(0.0) == 1.0)
    record(2, ok, f"v0={sol.v0!r}, atom={mass!r}, Q atoms={sol.Q_star.atoms}")


def test_criterion_03_root_correctness():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        n = int(rng.choice([1, 2, 3, 5]))
        vbar = float(rng.uniform(0.2, 5.0))
        if n <= 2:
            mu = float(rng.uniform(0.01, 0.99)) * vbar
            uv = solve_uv_two(ParametricSetting(n, mu, vbar))
            res = abs(uv_equation_residual(uv, mu, vbar))
        else:
            m = n - 1
            mu = float(rng.uniform(0.01, 1.0)) * (n - 1 / m) * vbar / (m * m)
            uv = solve_uv_n(ParametricSetting(n, mu, vbar))
            res = abs(uv_n_equation_residual(uv, n, mu, vbar))
        worst = max(worst, res)
    special = max(abs(solve_uv_two(ParametricSetting(n, 2 / E, 1.0)) - 1 / E) for n in (1, 2))
    record(3, worst < 1e-12 and special <= 1e-14,
           f"max residual={worst:.2e}, |uv - 1/e|={special:.2e}")


def test_criterion_04_seller_indifference():
    sol = equilibrium_two(ParametricSetting(2, 0.3, 1.0))
    c = 2 * sol.uv - sol.uv ** 2
    dev = max(abs(rev_fixed_reserve(sol.F_star, r, 2) - c)
              for r in np.linspace(0.0, 1.0, 1000, endpoint=False))
    record(4, dev < 1e-9, f"max deviation={dev:.2e}")


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_criterion_05_certification(n):
    failed = []
    for frac in (0.1, 0.3, 0.5, 0.7, 0.9):
        rep = certify_equilibrium(solve(ParametricSetting(n, frac, 1.0)), tol=1e-8)
        if not rep.passed:
            failed.append(frac)
    record(5, not failed, f"failed mu={failed}" if failed else "5/5 certified", part=f"n={n}:")


def test_criterion_05_negative_controls():
    s2 = solve(ParametricSetting(2, 0.3, 1.0))
    s3 = solve(ParametricSetting(3, 0.3, 1.0))
    atom_fail = all(not certify_equilibrium(perturb_atom(s), tol=1e-8).passed for s in (s2, s3))
    lam_fail = all(not check_pointwise_lagrangian(s, tol=1e-8, lam=s.lam * f).passed
                   for s in (s2, s3) for f in (0.9, 1.1))
    base, pert = reserve_perturbation_control(s2)
    record(5, atom_fail and lam_fail and pert < base,
           f"perturbed atom fails={atom_fail}, wrong lambda fails={lam_fail}, "
           f"reserve shift {base:.7f} -> {pert:.7f}", part="controls:")


def test_criterion_06_discrete_game():
    setting = ParametricSetting(2, 0.3, 1.0)
    eq = solve_discrete_two(setting, 2)
    k2 = (np.allclose(eq.x, DISCRETE_K2_X, atol=1e-3, rtol=0)
          and np.allclose(eq.q, [DISCRETE_K2_Q1, 1.0], atol=1e-3, rtol=0)
          and abs(eq.lam - DISCRETE_K2_LAM) <= 1e-3)
    worst_res, worst_slack = 0.0, math.inf
    for k in (10, 100, 1000):
        e = solve_discrete_two(setting, k)
        worst_res = max(worst_res, max(residuals(e).values()))
        worst_slack = min(worst_slack, float(np.min(second_order_slack(e))))
    record(6, k2 and worst_res < 1e-12 and worst_slack >= 0,
           f"k=2 x={eq.x.round(4).tolist()}, q={eq.q.round(4).tolist()}, lambda={eq.lam:.4f}; "
           f"max residual={worst_res:.2e}; min second-order slack={worst_slack:.2e}")


def test_criterion_07_convergence():
    t = convergence_study(ParametricSetting(2, 0.3, 1.0), [10, 100, 1000])
    fF, fQ = t.improvement
    record(7, fF >= 5 and fQ >= 5,
           f"dist_F {t.dist_F[0]:.4f} -> {t.dist_F[-1]:.4f} ({fF:.1f}x), "
           f"dist_Q {t.dist_Q[0]:.4f} -> {t.dist_Q[-1]:.4f} ({fQ:.1f}x)")


@pytest.mark.parametrize("n,mu,seed", [(2, 0.3, 1), (3, 2 / 3, 2)])
def test_criterion_08_monte_carlo(n, mu, seed):
    sol = solve(ParametricSetting(n, mu, 1.0))
    ref = robust_revenue_formula(sol)
    rep = simulate_auction(sol.F_star, sol.Q_star, n, 10_000_000, seed, analytic_ref=ref)
    record(8, rep.within(4.0), f"mean={rep.mean_revenue:.6f} ref={ref:.6f} z={rep.z_score:+.2f}",
           part=f"n={n}:")


def _feasible_three_atom(rng, mu, var_max):
    while True:
        x = np.sort(rng.uniform(0.0, 1.8, 3))
        p = rng.dirichlet(np.ones(3))
        x = x + (mu - float(np.dot(p, x)))
        if x[0] <= 0 or len(set(x.tolist())) < 3:
            continue
        if float(np.dot(p, (x - mu) ** 2)) <= var_max:
            return x, p


def test_criterion_09_two_moment_guarantee():
    mu, mu2 = 2 / E, REV_TWO_2E
    sol = single_two_moment(mu, mu2)
    lam_ok = abs(sol.lambda1 - E) <= 1e-12 and abs(sol.lambda2 + E / 2) <= 1e-12
    rng = np.random.default_rng(9)
    worst, above_one, max_mean_err = math.inf, 0, 0.0
    for _ in range(100):
        x, p = _feasible_three_atom(rng, mu, mu2 - mu * mu)
        F = discrete_distribution(x.tolist(), p.tolist())
        max_mean_err = max(max_mean_err, abs(float(np.dot(p, x)) - mu))
        above_one += bool(x[-1] > 1.0)
        worst = min(worst, rev_randomized(F, sol.Q_star, 1) - sol.uv)
    record(9, lam_ok and worst >= -1e-9 and above_one > 0,
           f"lambda1={sol.lambda1!r}, lambda2={sol.lambda2!r}; min Rev - uv={worst:.3e} over 100 "
           f"distributions ({above_one} with an atom above 1, mean error <= {max_mean_err:.1e})")


def test_criterion_10_truthfulness():
    rep = truthfulness_check(IronedMechanism(), [Fraction(5, 9), Fraction(1)], 3)
    tie = bool(rep.binding) and all(b["u_truth"] == b["u_dev"] == Fraction(4, 27)
                                    for b in rep.binding)
    fpa = truthfulness_check(FirstPrice(0), [Fraction(1, 5), Fraction(1, 2), Fraction(1)], 2)
    record(10, rep.passed and tie and not fpa.passed,
           f"ironed violations={len(rep.violations)}, binding ties at 4/27={len(rep.binding)}, "
           f"first-price violations={len(fpa.violations)}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

import numpy as np
import pytest

from robust_reserve.closed_form import equilibrium_n, solve
from robust_reserve.core import ParametricSetting, discrete_distribution, point_mass
from robust_reserve.mechanisms import IronedMechanism, SecondPrice
from robust_reserve.montecarlo import SimReport, simulate_auction, simulate_mechanism
from robust_reserve.revenue import rev_randomized


def test_point_masses():
    rep = simulate_auction(point_mass(0.3, 1.0), point_mass(0.0, 1.0), 2, 1000, 1)
    assert rep.mean_revenue == 0.3 and rep.std_error == 0.0
    strict = simulate_auction(point_mass(0.4, 1.0), point_mass(0.4, 1.0), 2, 1000, 1)
    assert strict.mean_revenue == 0.0
    incl = simulate_auction(point_mass(0.4, 1.0), point_mass(0.4, 1.0), 2, 1000, 1,
                            tie_sale="inclusive")
    assert incl.mean_revenue == pytest.approx(0.4, abs=1e-15)


def test_seed_determinism_and_echo():
    sol = solve(ParametricSetting(2, 0.3, 1.0))
    a = simulate_auction(sol.F_star, sol.Q_star, 2, 50_000, 17, batch_size=8192)
    b = simulate_auction(sol.F_star, sol.Q_star, 2, 50_000, 17, batch_size=8192)
    assert a == b
    assert a.seed == 17 and a.trials == 50_000
    c = simulate_auction(sol.F_star, sol.Q_star, 2, 50_000, 18, batch_size=8192)
    assert c.mean_revenue != a.mean_revenue


def test_std_error_definition():
    F = discrete_distribution([0.2, 0.6, 1.0], [0.3, 0.3, 0.4])
    rep = simulate_auction(F, point_mass(0.5, 1.0), 2, 20_000, 3)
    assert rep.std_error > 0
    one = simulate_auction(F, point_mass(0.5, 1.0), 2, 1, 3)
    assert one.trials == 1 and one.std_error == 0.0


def test_spa_mechanism_matches_auction_with_zero_reserve():
    sol = solve(ParametricSetting(3, 0.4, 1.0))
    a = simulate_auction(sol.F_star, point_mass(0.0, 1.0), 3, 30_000, 5)
    b = simulate_mechanism(SecondPrice(0.0), sol.F_star, 3, 30_000, 5)
    assert a.mean_revenue == b.mean_revenue and a.std_error == b.std_error


def test_rejected_profiles_counted_as_zero():
    with pytest.warns(UserWarning, match="rejected"):
        rep = simulate_mechanism(IronedMechanism(), point_mass(1.0), 2, 100, 0)
    assert rep.rejected == 100 and rep.mean_revenue == 0.0


def test_invalid_arguments():
    with pytest.raises(ValueError):
        simulate_auction(point_mass(0.3), point_mass(0.0, 1.0), 2, 0, 1)
    with pytest.raises(ValueError):
        simulate_auction(point_mass(0.3), point_mass(0.0, 1.0), 2, 10, 1, tie_sale="maybe")
    with pytest.raises(ValueError):
        SimReport(0.1, 0.01, 10, 1).within()


def test_agreement_random_configurations():
    rng = np.random.default_rng(2025)
    hits = 0
    for i in range(20):
        n = int(rng.choice([1, 2, 3, 5]))
        vbar = float(rng.uniform(0.5, 2.0))
        sF = ParametricSetting(n, float(rng.uniform(0.05, 0.95)) * vbar, vbar)
        sQ = ParametricSetting(int(rng.choice([1, 2, 3])), float(rng.uniform(0.05, 0.95)) * vbar,
                               vbar)
        F, Q = solve(sF).F_star, solve(sQ).Q_star
        ref = rev_randomized(F, Q, n)
        rep = simulate_auction(F, Q, n, 200_000, 100 + i, analytic_ref=ref)
        hits += rep.within(4.0)
    assert hits >= 19


def test_ironed_mechanism_simulation():
    F = equilibrium_n(ParametricSetting(3, 2 / 3, 1.0)).F_star
    rep = simulate_mechanism(IronedMechanism(), F, 3, 10_000_000, 7, analytic_ref=0.75)
    assert rep.within(4.0), rep

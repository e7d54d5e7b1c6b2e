"""Closed-form robust equilibria.

Each solver finds the lower support point ``uv`` by bisection on a strictly
increasing scalar map and assembles the worst-case value distribution F* and
the robust reserve distribution Q* from their analytic forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import (AffineLog, Constant, EqualRevenue, LogUniform, ParametricSetting, PiecewiseCdf,
                   Segment, TruncLogRatio, TwoBidderRatio)

MAX_ITER = 200
RESIDUAL_TOL = 1e-12


class NumericError(RuntimeError):
    """A root finder failed to reach its tolerance."""


class DomainError(ValueError):
    """Inputs lie outside the region where a solution exists."""


@dataclass(frozen=True)
class EquilibriumSolution:
    setting: ParametricSetting
    F_star: PiecewiseCdf
    Q_star: PiecewiseCdf
    uv: Optional[float]
    v0: Optional[float]
    a: Optional[float]
    lam: float
    robust_revenue: float

    @property
    def interior(self):
        return self.uv is not None

    def to_dict(self):
        return {
            "type": "EquilibriumSolution",
            "setting": self.setting.to_dict(),
            "uv": self.uv, "v0": self.v0, "a": self.a,
            "lambda": self.lam, "robust_revenue": self.robust_revenue,
            "F_star": self.F_star.to_dict(), "Q_star": self.Q_star.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(ParametricSetting.from_dict(d["setting"]),
                   PiecewiseCdf.from_dict(d["F_star"]), PiecewiseCdf.from_dict(d["Q_star"]),
                   d["uv"], d["v0"], d["a"], d["lambda"], d["robust_revenue"])


@dataclass(frozen=True)
class SingleBidderSolution:
    mu: float
    mu2: Optional[float]
    vbar: Optional[float]
    uv: float
    lambda1: float
    lambda2: float
    F_star: PiecewiseCdf
    Q_star: PiecewiseCdf
    robust_revenue: float

    @property
    def setting(self):
        return ParametricSetting(1, self.mu, self.vbar)

    @property
    def lam(self):
        return self.lambda1

    def to_dict(self):
        return {
            "type": "SingleBidderSolution",
            "mu": self.mu, "mu2": self.mu2, "vbar": self.vbar, "uv": self.uv,
            "lambda1": self.lambda1, "lambda2": self.lambda2,
            "robust_revenue": self.robust_revenue,
            "F_star": self.F_star.to_dict(), "Q_star": self.Q_star.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["mu"], d["mu2"], d["vbar"], d["uv"], d["lambda1"], d["lambda2"],
                   PiecewiseCdf.from_dict(d["F_star"]), PiecewiseCdf.from_dict(d["Q_star"]),
                   d["robust_revenue"])


def solution_from_dict(d):
    if d.get("type") == "SingleBidderSolution":
        return SingleBidderSolution.from_dict(d)
    return EquilibriumSolution.from_dict(d)


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------

def _bisect_increasing(fun, lo, hi, scale):
    """Root of an increasing function on (lo, hi] with fun(hi) >= 0."""
    if fun(hi) == 0.0:
        return hi
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fun(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    root = hi if abs(fun(hi)) <= abs(fun(lo)) else lo
    if abs(fun(root)) >= RESIDUAL_TOL * max(1.0, scale):
        raise NumericError(f"bisection residual {fun(root):.3e} above tolerance")
    return root


def uv_equation_residual(uv, mu, vbar):
    return uv * (1.0 + math.log(vbar / uv)) - mu


def _solve_uv(mu, vbar):
    if not 0.0 < mu <= vbar:
        raise DomainError("need 0 < mu <= vbar")
    return _bisect_increasing(lambda x: uv_equation_residual(x, mu, vbar), 1e-15 * vbar, vbar, vbar)


def solve_uv_two(setting: ParametricSetting) -> float:
    """Root of uv (1 + log(vbar/uv)) = mu on (0, vbar]; shared by n = 1 and n = 2."""
    return _solve_uv(setting.mu, setting.vbar)


def uv_n_equation_residual(uv, n, mu, vbar):
    m = n - 1
    return (n - 1.0 / m + math.log(vbar / uv)) * uv - m * m * mu


def solve_uv_n(setting: ParametricSetting) -> Optional[float]:
    """Root of (n - 1/(n-1) + log(vbar/uv)) uv = (n-1)^2 mu on (0, vbar], or None."""
    n, mu, vbar = setting.n, setting.mu, setting.vbar
    if n < 3:
        raise ValueError("solve_uv_n requires n >= 3")
    m = n - 1
    if (n - 1.0 / m) * vbar < m * m * mu:
        return None
    return _bisect_increasing(lambda x: uv_n_equation_residual(x, n, mu, vbar),
                              1e-15 * vbar, vbar, m * m * vbar)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def _segments(*pieces):
    return tuple(Segment(lo, hi, f) for lo, hi, f in pieces if hi > lo)


def equilibrium_two(setting: ParametricSetting) -> EquilibriumSolution:
    if setting.n != 2:
        raise ValueError("equilibrium_two requires n = 2")
    vbar = setting.vbar
    uv = solve_uv_two(setting)
    q0 = (1.0 - uv / vbar) / math.log(vbar / uv)
    F = PiecewiseCdf(_segments((0.0, uv, Constant(0.0)), (uv, vbar, EqualRevenue(uv))),
                     ((vbar, uv / vbar),), vbar)
    Q = PiecewiseCdf(_segments((0.0, uv, Constant(q0)), (uv, vbar, TwoBidderRatio(uv, vbar))),
                     ((0.0, q0),), vbar)
    return EquilibriumSolution(setting, F, Q, uv, None, None, 2.0 * q0, 2.0 * uv - uv * uv / vbar)


def no_reserve_lambda(n):
    """Multiplier at which z = 0 and z = 1 - 1/(n-1)^2 both minimize the flat-Q integrand."""
    m = n - 1
    return n / m * (1.0 - 1.0 / (m * m)) ** (n - 2)


def _interior_n(setting, uv):
    n, vbar = setting.n, setting.vbar
    m = n - 1
    v0 = uv / m
    a = uv / (m * m)
    c = m - 1.0 / m
    L = math.log(vbar / uv)
    lam = n * (1.0 - a / vbar) ** m / (c + L)
    z1 = 1.0 - 1.0 / (m * m)
    q_flat = (1.0 - a / vbar) ** m * ((m * m) / (m * m - 1.0)) ** m * c / (c + L)
    F = PiecewiseCdf(_segments((0.0, v0, Constant(0.0)), (v0, uv, Constant(z1)),
                               (uv, vbar, EqualRevenue(a))),
                     ((v0, z1), (vbar, a / vbar)), vbar)
    Q = PiecewiseCdf(_segments((0.0, uv, Constant(q_flat)), (uv, vbar, TruncLogRatio(n, a, uv, vbar))),
                     ((0.0, q_flat),), vbar)
    rev = vbar * -math.expm1(n * math.log1p(-a / vbar))
    return EquilibriumSolution(setting, F, Q, uv, v0, a, lam, rev)


def _no_reserve_n(setting):
    n, mu, vbar = setting.n, setting.mu, setting.vbar
    m = n - 1
    z1 = 1.0 - 1.0 / (m * m)
    v0 = mu - (vbar - mu) / (m * m - 1.0)
    F = PiecewiseCdf(_segments((0.0, v0, Constant(0.0)), (v0, vbar, Constant(z1))),
                     ((v0, z1), (vbar, 1.0 - z1)), vbar)
    Q = PiecewiseCdf(_segments((0.0, vbar, Constant(1.0))), ((0.0, 1.0),), vbar)
    rev = vbar * (1.0 - (1.0 - v0 / vbar) * (1.0 + 1.0 / m) * z1 ** m)
    return EquilibriumSolution(setting, F, Q, None, v0, None, no_reserve_lambda(n), rev)


def equilibrium_n(setting: ParametricSetting) -> EquilibriumSolution:
    if setting.n < 3:
        raise ValueError("equilibrium_n requires n >= 3")
    uv = solve_uv_n(setting)
    if uv is None:
        return _no_reserve_n(setting)
    return _interior_n(setting, uv)


def _single_F(uv, vbar):
    return PiecewiseCdf(_segments((0.0, uv, Constant(0.0)), (uv, vbar, EqualRevenue(uv))),
                        ((vbar, uv / vbar),), vbar)


def single_mean_ub(setting: ParametricSetting) -> SingleBidderSolution:
    if setting.n != 1:
        raise ValueError("single_mean_ub requires n = 1")
    vbar = setting.vbar
    uv = solve_uv_two(setting)
    Q = PiecewiseCdf(_segments((0.0, uv, Constant(0.0)), (uv, vbar, LogUniform(uv, vbar))), (), vbar)
    return SingleBidderSolution(setting.mu, None, vbar, uv, 1.0 / math.log(vbar / uv), 0.0,
                                _single_F(uv, vbar), Q, uv)


def _solve_two_moments(mu, mu2):
    """(uv, vbar) from mu2 = 2 vbar uv - uv^2 and the mean equation."""
    def vbar_of(x):
        return (mu2 + x * x) / (2.0 * x)

    def resid(x):
        return x * (1.0 + math.log(vbar_of(x) / x)) - mu

    uv = _bisect_increasing(resid, 1e-15 * mu, mu, mu)
    return uv, vbar_of(uv)


def single_two_moment(mu, mu2, vbar=None, lambda2=None) -> SingleBidderSolution:
    """Robust posted-price distribution from two moments, with or without an upper bound."""
    mu, mu2 = float(mu), float(mu2)
    if not mu > 0:
        raise DomainError("need mu > 0")
    if not mu2 > mu * mu:
        raise DomainError("infeasible moments: need mu2 > mu^2")
    if vbar is None:
        if lambda2 is not None:
            raise DomainError("lambda2 is determined by the moments when vbar is not given")
        uv, vbar = _solve_two_moments(mu, mu2)
        L = math.log(vbar / uv)
        lambda2 = 1.0 / (2.0 * ((vbar - uv) - vbar * L))
        lambda1 = -2.0 * lambda2 * vbar
    else:
        vbar = float(vbar)
        if not mu < vbar:
            raise DomainError("need mu < vbar")
        uv = _solve_uv(mu, vbar)
        implied = 2.0 * vbar * uv - uv * uv
        if abs(implied - mu2) > 1e-9 * max(1.0, abs(mu2)):
            raise DomainError(f"need mu2 = 2 vbar uv - uv^2 = {implied!r}, got {mu2!r}")
        L = math.log(vbar / uv)
        lambda2 = 0.0 if lambda2 is None else float(lambda2)
        lambda1 = (1.0 - 2.0 * lambda2 * (vbar - uv)) / L
        for r in (uv, vbar):
            if lambda1 + 2.0 * lambda2 * r < 0.0:
                raise DomainError(f"lambda1 >= -2 r lambda2 violated at r = {r!r}")
    if lambda2 == 0.0:
        cont = LogUniform(uv, vbar)
    else:
        cont = AffineLog(lambda1, lambda2, uv)
    Q = PiecewiseCdf(_segments((0.0, uv, Constant(0.0)), (uv, vbar, cont)), (), vbar)
    return SingleBidderSolution(mu, mu2, vbar, uv, lambda1, lambda2, _single_F(uv, vbar), Q, uv)


def solve(setting: ParametricSetting):
    """Dispatch on the bidder count."""
    if setting.n == 1:
        return single_mean_ub(setting)
    if setting.n == 2:
        return equilibrium_two(setting)
    return equilibrium_n(setting)

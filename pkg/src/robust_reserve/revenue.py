"""Expected revenue of a second-price auction with (randomized) reserve, and the Lagrangian.

With F the value CDF and n bidders, a fixed reserve r earns

    Rev_F(r) = r (1 - F(r)^n) + int_r^inf g(F(v)) dv,   g(z) = 1 - n z^(n-1) + (n-1) z^n,

where g(F(v)) is the probability that the second-highest value exceeds v.
The item sells only when the highest value strictly exceeds r.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .closed_form import SingleBidderSolution
from .core import PiecewiseCdf, _quad, g_poly, moment

QUAD_TOL_RANDOMIZED = 1e-10


@dataclass(frozen=True)
class RevenueReport:
    analytic: float
    components: dict = field(default_factory=dict)
    method: str = "closed-form"

    def to_dict(self):
        return {"analytic": self.analytic, "components": dict(self.components), "method": self.method}


def _g_tail(F: PiecewiseCdf, r: float, n: int):
    """int_r^inf g(F(v)) dv, and whether every piece had a closed form."""
    if n == 1:
        return 0.0, True
    total, closed = 0.0, True
    for s in F.segments:
        lo, hi = max(s.lo, r), s.hi
        if hi <= lo:
            continue
        val = s.form.g_integral(lo, hi, n)
        if val is None:
            closed = False
            f = s.form
            val = _quad(lambda v: float(g_poly(f.value(v), n)), lo, hi)
        total += val
    return total, closed


def revenue_report(F: PiecewiseCdf, r: float, n: int) -> RevenueReport:
    if r < 0:
        raise ValueError("reserve must be nonnegative")
    Fr = float(F.cdf(r))
    sale = r * (1.0 - Fr ** n)
    tail, closed = _g_tail(F, r, n)
    return RevenueReport(sale + tail, {"reserve_term": sale, "second_price_term": tail},
                         "closed-form" if closed else "quadrature")


def rev_fixed_reserve(F: PiecewiseCdf, r: float, n: int) -> float:
    """Expected revenue with deterministic reserve r."""
    return revenue_report(F, r, n).analytic


def rev_randomized(F: PiecewiseCdf, Q: PiecewiseCdf, n: int) -> float:
    """E_{r ~ Q} Rev_F(r): atoms of Q exactly, continuous part by quadrature."""
    total = sum(m * rev_fixed_reserve(F, p, n) for p, m in Q.atoms)
    kinks = F.breakpoints()
    for s in Q.segments:
        if s.form.is_constant():
            continue
        inner = [x for x in kinks if s.lo < x < s.hi]
        f = s.form

        def integrand(r):
            return rev_fixed_reserve(F, r, n) * float(f.deriv(r))

        pts = [s.lo] + inner + [s.hi]
        for a, b in zip(pts[:-1], pts[1:]):
            val, _ = _quad_pair(integrand, a, b)
            total += val
    return total


def _quad_pair(fun, a, b):
    return integrate.quad(fun, a, b, epsabs=QUAD_TOL_RANDOMIZED * 1e-2,
                          epsrel=QUAD_TOL_RANDOMIZED * 1e-2, limit=400)


def lagrangian(Q: PiecewiseCdf, F: PiecewiseCdf, lam: float, n: int) -> float:
    """Rev_F(Q) - lambda * int (1 - F)."""
    return rev_randomized(F, Q, n) - lam * moment(F, 1)


def integrand_h(Q: PiecewiseCdf, lam: float, v, z, n: int):
    """Pointwise Lagrangian integrand Q'(v) v (1 - z^n) + Q(v) g(z) - lambda (1 - z).

    Broadcasts over v and z.  Raises if any v sits on an atom of Q.
    """
    v = np.asarray(v, dtype=float)
    z = np.asarray(z, dtype=float)
    for p, _ in Q.atoms:
        if np.any(v == p):
            raise ValueError(f"Q has an atom at {p}; its derivative is undefined there")
    dq = Q.density(v)
    qv = Q.cdf(v)
    return dq * v * (1.0 - z ** n) + qv * g_poly(z, n) - lam * (1.0 - z)


def robust_revenue_formula(sol) -> float:
    """Guaranteed revenue recomputed from the solution's scalars."""
    if isinstance(sol, SingleBidderSolution):
        return float(sol.uv)
    n, vbar = sol.setting.n, sol.setting.vbar
    if n == 2:
        return 2.0 * sol.uv - sol.uv ** 2 / vbar
    m = n - 1
    if sol.uv is not None:
        return vbar * -math.expm1(n * math.log1p(-sol.a / vbar))
    return vbar * (1.0 - (1.0 - sol.v0 / vbar) * (1.0 + 1.0 / m) * (1.0 - 1.0 / (m * m)) ** m)

"""Discretized zero-sum game between the seller and nature.

On the uniform grid r_i = (i-1) vbar/k both players use step CDFs with
values x_i (nature) and q_i (seller).  For two bidders the saddle point is
pinned down by a forward recursion for x and a recursion for q that is linear
in the multiplier.  Nature's x_1 can be far below the smallest double for large
k, so x is carried as log x with log x_1 = -2**s and s found by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .closed_form import NumericError, equilibrium_two
from .core import ParametricSetting

MAX_ITER = 300


@dataclass(frozen=True)
class DiscreteEquilibrium:
    k: int
    grid: np.ndarray
    x: np.ndarray
    q: np.ndarray
    lam: float
    mu: float
    vbar: float
    alpha: Optional[float] = None
    log_x: Optional[np.ndarray] = None

    def to_csv(self) -> str:
        lines = ["i,r,x,q"]
        for i in range(self.k):
            lines.append(f"{i + 1},{float(self.grid[i])!r},{float(self.x[i])!r},{float(self.q[i])!r}")
        return "\n".join(lines) + "\n"


def nature_step(delta, r, x, n=2):
    """Next value of nature's CDF on the grid."""
    if n < 2:
        raise ValueError("nature_step requires n >= 2")
    if x == 0.0 or x == 1.0:
        return float(x)
    inner = n / (r + delta) * (x ** (n - 1) - x ** n) * delta + x ** n
    return inner ** (1.0 / n)


def seller_step(delta, r, q, x, lam, n=2):
    """Previous value q_{i-1} of the seller's CDF from q_i."""
    if r <= 0.0 or x <= 0.0:
        raise ValueError("seller_step is undefined at r = 0 or x = 0")
    bal = lam / n - q * (n - 1) * x ** (n - 2) * (1.0 - x)
    return q - bal / (r * x ** (n - 1)) * delta


def _mean_sum(log_x):
    return math.fsum((-np.expm1(log_x)).tolist())


def solve_discrete_two(setting: ParametricSetting, k: int) -> DiscreteEquilibrium:
    """Saddle point of the two-bidder discretized game on k + 1 gridpoints."""
    if setting.n != 2:
        raise ValueError("solve_discrete_two requires n = 2")
    if int(k) != k or k < 2:
        raise ValueError("k must be an integer > 1")
    k = int(k)
    mu, vbar = setting.mu, setting.vbar
    delta = vbar / k
    target = k * mu / vbar

    lo, hi = -60.0, k + 80.0
    if not (_mean_sum(kernels.nature_chain(lo, k)) < target < _mean_sum(kernels.nature_chain(hi, k))):
        raise NumericError("mean bracket failure in the discrete solver")
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _mean_sum(kernels.nature_chain(mid, k)) < target:
            lo = mid
        else:
            hi = mid
    cands = [(abs(_mean_sum(kernels.nature_chain(s, k)) - target), s) for s in (lo, hi)]
    s = min(cands)[1]
    log_x = kernels.nature_chain(s, k)
    x = np.exp(log_x)
    base = kernels.seller_chain(x)
    lam = 1.0 / base[-1]
    q = base * lam
    q[-1] = 1.0
    grid = np.arange(k + 1) * delta
    return DiscreteEquilibrium(k, grid, x, q, lam, mu, vbar, None, log_x)


def residuals(eq: DiscreteEquilibrium) -> dict:
    """Max absolute residuals of the two-bidder saddle-point relations.

    The q relation is checked with denominators cleared, so it stays finite
    where x underflows.
    """
    k, x, q, lam = eq.k, eq.x, eq.q, eq.lam
    delta = eq.vbar / k
    i = np.arange(1, k)
    fwd = x[1:] ** 2 - ((2.0 / i) * (x[:-1] - x[:-1] ** 2) + x[:-1] ** 2)
    r = eq.grid[1:k]
    bwd = (q[1:] - q[:-1]) * r * x[1:] - (lam / 2.0 - q[1:] * (1.0 - x[1:])) * delta
    base = q[0] * (1.0 - x[0]) - lam / 2.0
    mean = delta * _mean_sum(eq.log_x if eq.log_x is not None else np.log(x)) - eq.mu
    return {
        "forward": float(np.max(np.abs(fwd))) if k > 1 else 0.0,
        "backward": float(np.max(np.abs(bwd))) if k > 1 else 0.0,
        "base": abs(float(base)),
        "mean": abs(mean),
        "q_last": abs(float(q[-1]) - 1.0),
    }


def second_order_slack(eq: DiscreteEquilibrium) -> np.ndarray:
    """q_i delta - (q_i - q_{i-1}) r_i for each index; nonnegative at a minimum."""
    delta = eq.vbar / eq.k
    qprev = np.concatenate(([0.0], eq.q[:-1]))
    return eq.q * delta - (eq.q - qprev) * eq.grid[:eq.k]


def discrete_lagrangian(q, x, lam, vbar, n=2):
    """Lagrangian of the discretized game with q_0 = 0."""
    q = np.asarray(q, dtype=float)
    x = np.asarray(x, dtype=float)
    k = len(q)
    delta = vbar / k
    r = np.arange(k) * delta
    qprev = np.concatenate(([0.0], q[:-1]))
    g = 1.0 - n * x ** (n - 1) + (n - 1) * x ** n
    return (math.fsum(((q - qprev) * r * (1.0 - x ** n)).tolist())
            + delta * math.fsum((q * g).tolist())
            - lam * delta * math.fsum((1.0 - x).tolist()))


def solve_discrete_single(mu, vbar, uv, k) -> DiscreteEquilibrium:
    """Single-bidder discrete solution on the geometric grid r_i = alpha^(i-1) uv."""
    if not 0.0 < uv < mu < vbar:
        raise ValueError("need 0 < uv < mu < vbar")
    k = int(k)
    alpha = (vbar / uv) ** (1.0 / k)
    grid = uv * alpha ** np.arange(k + 1)
    grid[-1] = vbar
    x = 1.0 - (mu - uv) / (k * grid[:k] * (alpha - 1.0))
    q = np.arange(1, k + 1) / k
    lam = 1.0 / (k * (alpha - 1.0))
    return DiscreteEquilibrium(k, grid, x, q, lam, mu, vbar, alpha, None)


@dataclass(frozen=True)
class ConvergenceTable:
    ks: tuple
    dist_F: tuple
    dist_Q: tuple

    @property
    def monotone_ok(self):
        def ok(d):
            return all(b <= 1.1 * a for a, b in zip(d[:-1], d[1:]))
        return ok(self.dist_F) and ok(self.dist_Q)

    @property
    def improvement(self):
        return (self.dist_F[0] / self.dist_F[-1], self.dist_Q[0] / self.dist_Q[-1])

    @property
    def passed(self):
        return self.monotone_ok and min(self.improvement) >= 5.0

    def to_csv(self) -> str:
        lines = ["k,dist_F,dist_Q"]
        for k, f, q in zip(self.ks, self.dist_F, self.dist_Q):
            lines.append(f"{k},{f!r},{q!r}")
        return "\n".join(lines) + "\n"


def convergence_study(setting: ParametricSetting, ks: Sequence[int]) -> ConvergenceTable:
    """Sup distances between discrete and closed-form equilibria on each grid."""
    if setting.n != 2:
        raise ValueError("convergence_study requires n = 2")
    sol = equilibrium_two(setting)
    eps = 0.01 * setting.vbar
    dF, dQ = [], []
    for k in ks:
        eq = solve_discrete_two(setting, k)
        r = eq.grid[:eq.k]
        dF.append(float(np.max(np.abs(eq.x - sol.F_star.cdf(r)))))
        mask = r >= sol.uv + eps
        dQ.append(float(np.max(np.abs(eq.q[mask] - sol.Q_star.cdf(r[mask])))) if mask.any() else 0.0)
    return ConvergenceTable(tuple(int(k) for k in ks), tuple(dF), tuple(dQ))

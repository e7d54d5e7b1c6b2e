"""Numeric certification of robust equilibria.

Seller side: every reserve in the support of Q* earns the same revenue against
F* and no reserve earns more.  Nature side: F* minimizes the pointwise
Lagrangian integrand h_v(z).  For reserve CDFs that are continuous apart from
an atom at 0, Rev_F(Q) - lambda (E_F[V] - mu) equals int h_v(F(v)) dv + lambda mu,
so ``lambda mu + int min_z h_v(z) dv`` is a lower bound on Rev_F(Q) over every F with
mean mu.  The grid CDF built from the pointwise argmins is reported too; it
certifies on the grid only.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .closed_form import NumericError, SingleBidderSolution
from .core import (Constant, Mix, ParametricSetting, PiecewiseCdf, Segment, VerificationReport,
                   discrete_distribution, g_poly, mixture, moment, point_mass, validate)
from .mechanisms import FIVE_NINTHS, IronedMechanism, SecondPrice, expected_revenue
from .revenue import rev_fixed_reserve, rev_randomized, robust_revenue_formula

Z_GRID = 400
GOLDEN_ITERS = 50
ATOM_GAP = 1e-9
GL_NODES = 8
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# Pointwise minimization of h_v(z)
# ---------------------------------------------------------------------------

def _coeffs(Q: PiecewiseCdf, v, lam1, lam2=0.0):
    """h_v(z) = A (1 - z^n) + B g(z) - M (1 - z) with per-node A, B, M."""
    return Q.density(v) * v, Q.cdf(v), lam1 + 2.0 * lam2 * v


def _h(A, B, M, z, n):
    return A * (1.0 - z ** n) + B * g_poly(z, n) - M * (1.0 - z)


def _golden(A, B, M, n, lo, hi):
    a, b = lo.copy(), hi.copy()
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = _h(A, B, M, c, n), _h(A, B, M, d, n)
    for _ in range(GOLDEN_ITERS):
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = np.where(left, b - INV_PHI * (b - a), d)
        d_new = np.where(left, c, a + INV_PHI * (b - a))
        fc, fd = (np.where(left, _h(A, B, M, c_new, n), fd),
                  np.where(left, fc, _h(A, B, M, d_new, n)))
        c, d = c_new, d_new
    z = 0.5 * (a + b)
    return z, _h(A, B, M, z, n)


@dataclass(frozen=True)
class PointwiseMin:
    z: np.ndarray        # minimizer (smallest among near-ties)
    value: np.ndarray    # min_z h_v(z)
    z_alt: np.ndarray    # best competing local minimizer
    value_alt: np.ndarray


def pointwise_min(A, B, M, n, z_points=Z_GRID):
    """Global minimum of h over z in [0, 1] per node: coarse grid, then golden refinement of the two best basins."""
    A, B, M = (np.asarray(x, dtype=float)[:, None] for x in (A, B, M))
    zg = np.linspace(0.0, 1.0, z_points + 1)[None, :]
    H = _h(A, B, M, zg, n)
    m = H.shape[1]
    # local minima of the sampled curve, endpoints included
    left = np.concatenate([np.full((H.shape[0], 1), np.inf), H[:, :-1]], axis=1)
    right = np.concatenate([H[:, 1:], np.full((H.shape[0], 1), np.inf)], axis=1)
    is_min = (H <= left) & (H <= right)
    masked = np.where(is_min, H, np.inf)
    order = np.argsort(masked, axis=1, kind="stable")[:, :2]
    rows = np.arange(H.shape[0])
    zs, vals = [], []
    for col in range(2):
        j = order[:, col]
        lo = zg[0, np.maximum(j - 1, 0)]
        hi = zg[0, np.minimum(j + 1, m - 1)]
        a_, b_, m_ = A[:, 0], B[:, 0], M[:, 0]
        zr, hr = _golden(a_, b_, m_, n, lo, hi)
        # keep the grid point or an endpoint if refinement did not improve on it
        zgrid = zg[0, j]
        hgrid = H[rows, j]
        better = hr < hgrid
        z = np.where(better, zr, zgrid)
        h = np.where(better, hr, hgrid)
        valid = np.isfinite(masked[rows, j])
        zs.append(np.where(valid, z, np.nan))
        vals.append(np.where(valid, h, np.inf))
    swap = vals[1] < vals[0]
    z0 = np.where(swap, zs[1], zs[0])
    h0 = np.where(swap, vals[1], vals[0])
    z1 = np.where(swap, zs[0], zs[1])
    h1 = np.where(swap, vals[0], vals[1])
    return PointwiseMin(z0, h0, z1, h1)


def _lam_pair(sol):
    if isinstance(sol, SingleBidderSolution):
        return sol.lambda1, sol.lambda2
    return sol.lam, 0.0


def _atom_points(Q):
    return [p for p, _ in Q.atoms]


# ---------------------------------------------------------------------------
# Nature's best response
# ---------------------------------------------------------------------------

@dataclass
class BestResponse:
    lam: float
    v: np.ndarray
    weights: np.ndarray
    z: np.ndarray
    mean: float
    mean_gap: float
    revenue: float
    dual_bound: float
    dual_valid: bool
    monotone: bool
    tied: bool
    F: Optional[PiecewiseCdf]
    status: str = "grid-certified"

    def to_dict(self):
        return {"lambda": self.lam, "mean": self.mean, "mean_gap": self.mean_gap,
                "revenue": self.revenue, "dual_bound": self.dual_bound,
                "dual_valid": self.dual_valid, "monotone": self.monotone, "tied": self.tied,
                "status": self.status}


def _nodes(Q: PiecewiseCdf, vbar: float, count: int):
    """Gauss-Legendre nodes on (0, vbar), split at Q's breakpoints, avoiding atoms."""
    cuts = sorted({0.0, vbar} | {x for x in Q.breakpoints() if 0.0 < x < vbar})
    total = vbar
    gx, gw = np.polynomial.legendre.leggauss(GL_NODES)
    vs, ws = [], []
    atoms = _atom_points(Q)
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        lo_e = lo + ATOM_GAP if lo in atoms and lo > 0 else lo
        hi_e = hi - ATOM_GAP if hi in atoms else hi
        panels = max(1, int(math.ceil(count / GL_NODES * (hi - lo) / total)))
        edges = np.linspace(lo_e, hi_e, panels + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            vs.append(0.5 * (b - a) * gx + 0.5 * (a + b))
            ws.append(0.5 * (b - a) * gw)
    return np.concatenate(vs), np.concatenate(ws)


def adversary_best_response(Q: PiecewiseCdf, setting: ParametricSetting, grid: int = 2000,
                            lam2: float = 0.0, mean_tol: float = 1e-8) -> BestResponse:
    """Pointwise minimizer of the Lagrangian integrand with lambda tuned to the mean."""
    n, mu, vbar = setting.n, setting.mu, setting.vbar
    v, w = _nodes(Q, vbar, grid)
    A, B, _ = _coeffs(Q, v, 0.0)

    def solve_for(lam):
        pm = pointwise_min(A, B, lam + 2.0 * lam2 * v, n)
        mean = float(np.dot(w, 1.0 - pm.z))
        return pm, mean

    lo, hi = 0.0, 1.0
    pm_hi, mean_hi = solve_for(hi)
    while mean_hi < mu:
        hi *= 2.0
        if hi > 2.0 ** 40:
            raise NumericError("lambda bracket failure in adversary_best_response")
        pm_hi, mean_hi = solve_for(hi)
    pm_lo, mean_lo = solve_for(lo)
    if mean_lo > mu:
        raise NumericError("lambda bracket failure in adversary_best_response")
    for _ in range(200):
        if abs(mean_hi - mu) <= mean_tol or hi - lo <= 1e-15 * hi:
            break
        mid = 0.5 * (lo + hi)
        pm, mean = solve_for(mid)
        if mean < mu:
            lo, pm_lo, mean_lo = mid, pm, mean
        else:
            hi, pm_hi, mean_hi = mid, pm, mean
    lam, pm, mean = hi, pm_hi, mean_hi
    dual = max(lo * mu + float(np.dot(w, pm_lo.value)),
               hi * mu + float(np.dot(w, pm_hi.value)))
    tied = bool(np.any((pm.value_alt - pm.value <= 1e-12) & (np.abs(pm.z_alt - pm.z) > 1e-6)))
    monotone = bool(np.all(np.diff(pm.z) >= -1e-9))
    z = pm.z
    revenue = float(np.dot(w, A * (1.0 - z ** n) + B * g_poly(z, n)))
    dual_valid = all(p == 0.0 for p in _atom_points(Q)) and lam2 == 0.0
    F = _grid_cdf(v, z, vbar) if monotone else None
    return BestResponse(lam, v, w, z, mean, abs(mean - mu), revenue, dual, dual_valid,
                        monotone, tied, F)


def _grid_cdf(v, z, vbar):
    """Right-continuous step CDF taking value z_j between the midpoints around node j."""
    z = np.maximum.accumulate(np.clip(z, 0.0, 1.0))
    edges = np.concatenate(([0.0], 0.5 * (v[:-1] + v[1:]), [vbar]))
    segs, atoms = [], []
    prev = 0.0
    for j in range(len(v)):
        if edges[j + 1] <= edges[j]:
            continue
        segs.append(Segment(edges[j], edges[j + 1], Constant(float(z[j]))))
        if z[j] - prev > 0:
            atoms.append((edges[j], float(z[j] - prev)))
        prev = float(z[j])
    if 1.0 - prev > 0:
        atoms.append((vbar, 1.0 - prev))
    return PiecewiseCdf(tuple(segs), tuple(atoms), vbar)


# ---------------------------------------------------------------------------
# Seller's best response
# ---------------------------------------------------------------------------

def seller_best_reserve(F: PiecewiseCdf, n: int, grid_size: int = 10_001):
    """Best deterministic reserve on a grid that includes atoms +- 1e-9 and segment ends."""
    hi = F.domain_hi
    pts = set(np.linspace(0.0, hi, grid_size).tolist())
    for x in F.breakpoints():
        pts.update((x, x - ATOM_GAP, x + ATOM_GAP))
    rs = sorted(r for r in pts if 0.0 <= r <= hi)
    revs = np.array([rev_fixed_reserve(F, r, n) for r in rs])
    # smallest reserve among those tied with the best up to rounding
    j = int(np.flatnonzero(revs >= revs.max() - 1e-12)[0])
    return rs[j], float(revs[j])


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def _support_reserves(sol, count=1000):
    Q = sol.Q_star
    pts = [p for p, _ in Q.atoms if p < sol.setting.vbar]
    conts = [(s.lo, s.hi) for s in Q.segments if not s.form.is_constant()]
    if getattr(sol, "v0", None) is not None:
        # F* vanishes below v0, where Rev(r) = Rev(0) identically
        conts.append((0.0, sol.v0))
    total = sum(b - a for a, b in conts)
    for a, b in conts:
        k = max(2, int(round(count * (b - a) / total)))
        pts.extend(np.linspace(a, b, k, endpoint=False).tolist())
    return np.array(sorted(set(pts)))


def check_indifference(sol, tol: float = 1e-9, count: int = 1000) -> VerificationReport:
    """Revenue is constant on the support of Q* and no reserve in [0, vbar) beats it."""
    F, n = sol.F_star, sol.setting.n
    c = robust_revenue_formula(sol)
    sup = _support_reserves(sol, count)
    dev_sup = np.array([rev_fixed_reserve(F, r, n) - c for r in sup])
    grid = np.linspace(0.0, sol.setting.vbar, count, endpoint=False)
    dev_all = np.array([rev_fixed_reserve(F, r, n) - c for r in grid])
    ind = float(np.max(np.abs(dev_sup)))
    excess = max(0.0, float(np.max(dev_all)))
    passed = ind <= tol and excess <= tol
    return VerificationReport(
        indifference_dev=ind, passed=passed,
        details={"constant": c, "worst_support_reserve": float(sup[int(np.argmax(np.abs(dev_sup)))]),
                 "dominance_excess": excess,
                 "worst_grid_reserve": float(grid[int(np.argmax(dev_all))])})


def check_pointwise_lagrangian(sol, tol: float = 1e-8, grid: int = 2000, lam=None) -> VerificationReport:
    """F*(v) attains min_z h_v(z) at every grid point away from Q*'s atoms."""
    Q, F = sol.Q_star, sol.F_star
    vbar, n = sol.setting.vbar, sol.setting.n
    lam1, lam2 = _lam_pair(sol)
    if lam is not None:
        lam1 = lam
    v = (np.arange(grid) + 0.5) * vbar / grid
    for p in _atom_points(Q):
        v = v[np.abs(v - p) > ATOM_GAP]
    A, B, M = _coeffs(Q, v, lam1, lam2)
    pm = pointwise_min(A, B, M, n)
    hF = _h(A, B, M, F.cdf(v), n)
    gap = hF - pm.value
    j = int(np.argmax(gap))
    dev = max(0.0, float(gap[j]))
    return VerificationReport(pointwise_dev=dev, passed=dev <= tol,
                              details={"worst_v": float(v[j]), "lambda": lam1})


def check_interior_minimum(sol, grid: int = 200, z_points: int = 2000) -> VerificationReport:
    """For n >= 3 interior solutions: on [uv, vbar) h_v has one local minimum in (0, 1 - a/v] and it beats z = 0."""
    if sol.setting.n < 3 or sol.uv is None:
        raise ValueError("requires an n >= 3 interior solution")
    n, a, vbar = sol.setting.n, sol.a, sol.setting.vbar
    v = np.linspace(sol.uv, vbar, grid, endpoint=False)[1:]
    A, B, M = _coeffs(sol.Q_star, v, sol.lam)
    worst_count, worst_gap = 0, -np.inf
    for i, vi in enumerate(v):
        zs = 1.0 - a / vi
        z = np.linspace(0.0, zs, z_points + 1)[1:]
        h = _h(A[i], B[i], M[i], z, n)
        d = np.diff(h)
        # sign changes from decreasing to nondecreasing, plus the right end when still decreasing
        count = int(np.sum((d[:-1] < 0) & (d[1:] >= 0))) + int(d[-1] < 0)
        worst_count = max(worst_count, count)
        worst_gap = max(worst_gap, float(_h(A[i], B[i], M[i], zs, n) - _h(A[i], B[i], M[i], 0.0, n)))
    passed = worst_count == 1 and worst_gap <= 1e-9
    return VerificationReport(passed=passed, details={"max_local_minima": worst_count,
                                                      "max_h_gap": worst_gap})


def certify_equilibrium(sol, tol: float = 1e-8, grid: int = 2000) -> VerificationReport:
    """Combine validity, mean, seller indifference, pointwise minimality and nature's best response."""
    if isinstance(sol, SingleBidderSolution) and (sol.lambda2 != 0.0 or sol.vbar is None):
        raise ValueError("certification covers the mean and upper bound setting only")
    setting = sol.setting
    vF, vQ = validate(sol.F_star), validate(sol.Q_star)
    mean_dev = abs(moment(sol.F_star, 1) - setting.mu)
    ind = check_indifference(sol, tol)
    pw = check_pointwise_lagrangian(sol, tol, grid)
    br = adversary_best_response(sol.Q_star, setting, grid)
    c = robust_revenue_formula(sol)
    rev_gap = abs(rev_randomized(sol.F_star, sol.Q_star, setting.n) - c)
    dual_ok = br.dual_valid and br.dual_bound >= c - tol
    grid_ok = br.F is None or br.revenue >= c - 1e-3
    checks = {
        "validate_F": vF.passed, "validate_Q": vQ.passed, "mean": mean_dev <= tol,
        "indifference": ind.passed, "pointwise": pw.passed, "revenue_consistency": rev_gap <= max(tol, 1e-9),
        "dual_bound": dual_ok, "grid_best_response": grid_ok,
    }
    monotone_ok = vF.monotone_ok and vQ.monotone_ok
    return VerificationReport(
        indifference_dev=ind.indifference_dev, pointwise_dev=pw.pointwise_dev, mean_dev=mean_dev,
        monotone_ok=monotone_ok, passed=all(checks.values()) and monotone_ok,
        details={"checks": checks, "robust_revenue": c, "revenue_gap": rev_gap,
                 "best_response": br.to_dict(), "indifference": ind.details,
                 "pointwise": pw.details, "validate_F": vF.details, "validate_Q": vQ.details,
                 "status": "grid-certified"})


# ---------------------------------------------------------------------------
# Negative controls and the ironed comparison
# ---------------------------------------------------------------------------

def perturb_atom(sol, point=None, eps: float = 0.01):
    """Copy of sol whose F* has eps extra mass at ``point`` (default vbar), renormalized."""
    point = sol.setting.vbar if point is None else point
    F = mixture([sol.F_star, point_mass(point, sol.F_star.domain_hi)], [1.0 - eps, eps])
    return _replace(sol, F_star=F)


def _replace(sol, **kw):
    return dataclasses.replace(sol, **kw)


def shift_reserve_mass(Q: PiecewiseCdf, to: float, mass: float = 0.01) -> PiecewiseCdf:
    """Move ``mass`` from Q's atom at 0 to a new atom at ``to``."""
    if Q.atom_mass(0.0) < mass:
        raise ValueError("atom at 0 is too small")
    segs = []
    for s in Q.segments:
        pieces = [(s.lo, min(s.hi, to)), (max(s.lo, to), s.hi)]
        for lo, hi in pieces:
            if hi <= lo:
                continue
            form = s.form
            if hi <= to:
                form = (Constant(form.c - mass) if form.is_constant()
                        else Mix(((1.0, form), (-mass, Constant(1.0)))))
            segs.append(Segment(lo, hi, form))
    atoms = [(p, m - mass if p == 0.0 else m) for p, m in Q.atoms]
    atoms = tuple(sorted([(p, m) for p, m in atoms if m > 0] + [(to, mass)]))
    return PiecewiseCdf(tuple(segs), atoms, Q.domain_hi)


def reserve_perturbation_control(sol, mass: float = 0.01,
                                 ts=(0.001, 0.003, 0.01, 0.03, 0.1)):
    """Min revenue over a tested family of F against Q* and against a perturbed Q*.

    The family is F* and mean-preserving mixtures of F* with a two-point
    distribution that has an atom exactly at the moved reserve.
    """
    setting = sol.setting
    to = setting.vbar / 2.0
    Qp = shift_reserve_mass(sol.Q_star, to, mass)
    if setting.mu < to:
        G = discrete_distribution([0.0, to], [1.0 - setting.mu / to, setting.mu / to])
    else:
        p = (setting.mu - to) / (setting.vbar - to)
        G = discrete_distribution([to, setting.vbar], [1.0 - p, p])
    family = [sol.F_star] + [mixture([sol.F_star, G], [1.0 - t, t]) for t in ts]
    n = setting.n
    base = min(rev_randomized(F, sol.Q_star, n) for F in family)
    pert = min(rev_randomized(F, Qp, n) for F in family)
    return base, pert


def suboptimality_demo(setting: ParametricSetting):
    """(robust second-price revenue, ironed mechanism revenue) for three bidders with mean 2/3."""
    if setting.n != 3 or abs(setting.mu - 2.0 / 3.0) > 1e-9 or setting.vbar != 1.0:
        raise ValueError("the comparison is defined for n = 3, mu = 2/3, vbar = 1 only")
    support = [FIVE_NINTHS, Fraction(1)]
    probs = [Fraction(3, 4), Fraction(1, 4)]
    spa = expected_revenue(SecondPrice(0), support, probs, 3)
    ironed = expected_revenue(IronedMechanism(), support, probs, 3)
    return float(spa), float(ironed)

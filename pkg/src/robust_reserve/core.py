"""Mixed continuous/atomic distributions on a bounded interval.

A :class:`PiecewiseCdf` stores an ordered list of segments ``[lo, hi)`` that
cover ``[0, domain_hi)``, each carrying an analytic form for the CDF value,
plus the list of atoms.  The form values already include the mass of every
atom to their left, so the atoms list is the explicit record of the jumps.
The CDF is right-continuous and equals 1 at and above ``domain_hi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, Optional, Sequence

import numpy as np
from scipy import integrate

from . import kernels

QUAD_TOL = 1e-12
VALIDATE_POINTS = 10_000


class ValidationError(ValueError):
    """Raised when a distribution is structurally malformed."""


@dataclass(frozen=True)
class ParametricSetting:
    """Known parameters of the game: bidder count, mean and upper bound."""

    n: int
    mu: float
    vbar: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n}")
        if not (0.0 < self.mu < self.vbar) or not math.isfinite(self.vbar):
            raise ValueError(f"need 0 < mu < vbar, got mu={self.mu}, vbar={self.vbar}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "vbar", float(self.vbar))

    def to_dict(self):
        return {"n": self.n, "mu": self.mu, "vbar": self.vbar}

    @classmethod
    def from_dict(cls, d):
        return cls(d["n"], d["mu"], d["vbar"])


# ---------------------------------------------------------------------------
# Segment forms
# ---------------------------------------------------------------------------

def _quad(fun, lo, hi, points=None):
    if hi <= lo:
        return 0.0
    val, _ = integrate.quad(fun, lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL,
                            limit=400, points=points)
    return val


def g_poly(z, n):
    """Probability that the second-highest of n values exceeds v, given F(v) = z."""
    z = np.asarray(z, dtype=float)
    if n == 1:
        return np.zeros_like(z)
    return 1.0 - n * z ** (n - 1) + (n - 1) * z ** n


class Form:
    """Base class for analytic CDF pieces."""

    kind: ClassVar[str] = ""
    kernel_code: ClassVar[int] = 0

    def value(self, v):
        raise NotImplementedError

    def deriv(self, v):
        raise NotImplementedError

    def survival_integral(self, lo, hi, order):
        """Closed form of the integral of order*v**(order-1)*(1 - f) or None."""
        return None

    def g_integral(self, lo, hi, n):
        """Closed form of the integral of g_poly(f(v), n) or None."""
        return None

    def inverse(self, p, lo, hi):
        """Closed-form inverse on [lo, hi] or None when bisection is needed."""
        return None

    def kernel_params(self):
        return ()

    def params(self):
        return {}

    def to_dict(self):
        return {"kind": self.kind, **self.params()}

    def is_constant(self):
        return False


@dataclass(frozen=True)
class Constant(Form):
    c: float
    kind: ClassVar[str] = "Constant"

    def value(self, v):
        return np.full(np.shape(v), float(self.c))

    def deriv(self, v):
        return np.zeros(np.shape(v))

    def survival_integral(self, lo, hi, order):
        return (1.0 - self.c) * (hi ** order - lo ** order)

    def g_integral(self, lo, hi, n):
        return (hi - lo) * float(g_poly(self.c, n))

    def params(self):
        return {"c": self.c}

    def is_constant(self):
        return True


@dataclass(frozen=True)
class EqualRevenue(Form):
    """1 - a/v."""

    a: float
    kind: ClassVar[str] = "EqualRevenue"

    def value(self, v):
        return 1.0 - self.a / np.asarray(v, dtype=float)

    def deriv(self, v):
        return self.a / np.asarray(v, dtype=float) ** 2

    def survival_integral(self, lo, hi, order):
        if order == 1:
            return self.a * math.log(hi / lo)
        return 2.0 * self.a * (hi - lo)

    def g_integral(self, lo, hi, n):
        # d/dv [v (1 - f^n)] = g(f) exactly for this form
        def prim(v):
            return v * -math.expm1(n * math.log1p(-self.a / v)) if v > self.a else v
        return prim(hi) - prim(lo)

    def inverse(self, p, lo, hi):
        with np.errstate(divide="ignore"):
            return np.clip(self.a / (1.0 - p), lo, hi)

    def params(self):
        return {"a": self.a}


@dataclass(frozen=True)
class LogUniform(Form):
    """log(v/lo0) / log(hi0/lo0)."""

    lo0: float
    hi0: float
    kind: ClassVar[str] = "LogUniform"

    @property
    def _L(self):
        return math.log(self.hi0 / self.lo0)

    def value(self, v):
        return np.log(np.asarray(v, dtype=float) / self.lo0) / self._L

    def deriv(self, v):
        return 1.0 / (np.asarray(v, dtype=float) * self._L)

    def survival_integral(self, lo, hi, order):
        L, l0 = self._L, self.lo0
        if order == 1:
            prim = lambda v: v * math.log(v / l0) - v
            return (hi - lo) - (prim(hi) - prim(lo)) / L
        prim = lambda v: v * v * math.log(v / l0) - v * v / 2.0
        return (hi * hi - lo * lo) - (prim(hi) - prim(lo)) / L

    def inverse(self, p, lo, hi):
        return np.clip(self.lo0 * np.exp(p * self._L), lo, hi)

    def params(self):
        return {"lo0": self.lo0, "hi0": self.hi0}


@dataclass(frozen=True)
class AffineLog(Form):
    """lambda1*log(r/uv) + 2*lambda2*(r - uv)."""

    lambda1: float
    lambda2: float
    uv: float
    kind: ClassVar[str] = "AffineLog"
    kernel_code: ClassVar[int] = 3

    def value(self, v):
        v = np.asarray(v, dtype=float)
        return self.lambda1 * np.log(v / self.uv) + 2.0 * self.lambda2 * (v - self.uv)

    def deriv(self, v):
        return self.lambda1 / np.asarray(v, dtype=float) + 2.0 * self.lambda2

    def survival_integral(self, lo, hi, order):
        l1, l2, u = self.lambda1, self.lambda2, self.uv
        if order == 1:
            prim = lambda v: l1 * (v * math.log(v / u) - v) + l2 * (v - u) ** 2
            return (hi - lo) - (prim(hi) - prim(lo))
        prim = lambda v: (l1 * (v * v * math.log(v / u) - v * v / 2.0)
                          + 4.0 * l2 * (v ** 3 / 3.0 - u * v * v / 2.0))
        return (hi * hi - lo * lo) - (prim(hi) - prim(lo))

    def kernel_params(self):
        return (self.lambda1, self.lambda2, self.uv)

    def params(self):
        return {"lambda1": self.lambda1, "lambda2": self.lambda2, "uv": self.uv}


def _log1p_ratio(t):
    """log1p(t)/t with the removable singularity at 0 filled in."""
    t = np.asarray(t, dtype=float)
    safe = np.where(t == 0.0, 1.0, t)
    return np.where(t == 0.0, 1.0, np.log1p(safe) / safe)


def _excess_ratio(t):
    """(t - log1p(t))/t**2, accurate near t = 0."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 1e-4
    safe = np.where(small, 1.0, t)
    series = 0.5 - t / 3.0 + t * t / 4.0
    return np.where(small, series, (safe - np.log1p(safe)) / (safe * safe))


@dataclass(frozen=True)
class TwoBidderRatio(Form):
    """(1 - uv/vbar) * r/(r - uv) * log(r/uv) / log(vbar/uv), the two-bidder reserve CDF."""

    uv: float
    vbar: float
    kind: ClassVar[str] = "TwoBidderRatio"
    kernel_code: ClassVar[int] = 1

    @property
    def _K(self):
        return (1.0 - self.uv / self.vbar) / math.log(self.vbar / self.uv)

    def value(self, v):
        v = np.asarray(v, dtype=float)
        t = (v - self.uv) / self.uv
        return self._K * (v / self.uv) * _log1p_ratio(t)

    def deriv(self, v):
        v = np.asarray(v, dtype=float)
        t = (v - self.uv) / self.uv
        return self._K * _excess_ratio(t) / self.uv

    def kernel_params(self):
        return (self.uv, self.vbar)

    def params(self):
        return {"uv": self.uv, "vbar": self.vbar}


@dataclass(frozen=True)
class TruncLogRatio(Form):
    """(1-a/vbar)^(n-1) (r/(r-a))^(n-1) (c + log(r/uv)) / (c + log(vbar/uv)), c = n-1-1/(n-1)."""

    n: int
    a: float
    uv: float
    vbar: float
    kind: ClassVar[str] = "TruncLogRatio"
    kernel_code: ClassVar[int] = 2

    @property
    def _c(self):
        return self.n - 1 - 1.0 / (self.n - 1)

    def value(self, v):
        v = np.asarray(v, dtype=float)
        m = self.n - 1
        c = self._c
        pref = (1.0 - self.a / self.vbar) ** m / (c + math.log(self.vbar / self.uv))
        return pref * (v / (v - self.a)) ** m * (c + np.log(v / self.uv))

    def deriv(self, v):
        v = np.asarray(v, dtype=float)
        m = self.n - 1
        lg = self._c + np.log(v / self.uv)
        return self.value(v) * (-m * self.a / (v * (v - self.a)) + 1.0 / (v * lg))

    def kernel_params(self):
        return (float(self.n), self.a, self.uv, self.vbar)

    def params(self):
        return {"n": self.n, "a": self.a, "uv": self.uv, "vbar": self.vbar}


@dataclass(frozen=True)
class Mix(Form):
    """Weighted sum of forms; used for mixtures of distributions."""

    parts: tuple
    kind: ClassVar[str] = "Mix"

    def value(self, v):
        return sum(w * f.value(v) for w, f in self.parts)

    def deriv(self, v):
        return sum(w * f.deriv(v) for w, f in self.parts)

    def survival_integral(self, lo, hi, order):
        total_w = sum(w for w, _ in self.parts)
        acc = (1.0 - total_w) * (hi ** order - lo ** order)
        for w, f in self.parts:
            s = f.survival_integral(lo, hi, order)
            if s is None:
                return None
            acc += w * s
        return acc

    def to_dict(self):
        return {"kind": self.kind, "parts": [[w, f.to_dict()] for w, f in self.parts]}


FORMS = {cls.kind: cls for cls in
         (Constant, EqualRevenue, LogUniform, AffineLog, TwoBidderRatio, TruncLogRatio)}


def form_from_dict(d):
    d = dict(d)
    kind = d.pop("kind")
    if kind == "Mix":
        return Mix(tuple((float(w), form_from_dict(f)) for w, f in d["parts"]))
    if kind not in FORMS:
        raise ValidationError(f"unknown form kind {kind!r}")
    return FORMS[kind](**d)


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    form: Form


@dataclass(frozen=True)
class VerificationReport:
    """Deviation summary shared by ``validate`` and the verify module."""

    indifference_dev: Optional[float] = None
    pointwise_dev: Optional[float] = None
    mean_dev: Optional[float] = None
    monotone_ok: bool = True
    passed: bool = True
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "indifference_dev": self.indifference_dev,
            "pointwise_dev": self.pointwise_dev,
            "mean_dev": self.mean_dev,
            "monotone_ok": self.monotone_ok,
            "passed": self.passed,
            "details": _jsonable(self.details),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


@dataclass(frozen=True)
class PiecewiseCdf:
    segments: tuple
    atoms: tuple
    domain_hi: float

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(float(s[0]), float(s[1]), s[2])
                     for s in self.segments)
        atoms = tuple((float(p), float(m)) for p, m in self.atoms)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "domain_hi", float(self.domain_hi))

    # structure -----------------------------------------------------------
    def structure_errors(self):
        errs = []
        if not self.segments:
            errs.append("no segments")
            return errs
        if self.segments[0].lo != 0.0:
            errs.append(f"first segment starts at {self.segments[0].lo}, not 0")
        for i, s in enumerate(self.segments):
            if not s.lo < s.hi:
                errs.append(f"segment {i} is empty or reversed: [{s.lo}, {s.hi})")
            if i and s.lo != self.segments[i - 1].hi:
                kind = "overlap" if s.lo < self.segments[i - 1].hi else "gap"
                errs.append(f"{kind} between segments {i - 1} and {i}")
        if self.segments[-1].hi != self.domain_hi:
            errs.append("last segment does not end at domain_hi")
        for p, m in self.atoms:
            if not m > 0:
                errs.append(f"atom at {p} has non-positive mass {m}")
            if not 0.0 <= p <= self.domain_hi:
                errs.append(f"atom at {p} outside [0, domain_hi]")
        return errs

    def check(self):
        errs = self.structure_errors()
        if errs:
            raise ValidationError("; ".join(errs))

    @property
    def _los(self):
        return np.array([s.lo for s in self.segments])

    # evaluation ----------------------------------------------------------
    def cdf(self, v):
        """Right-continuous CDF, vectorized.  Values below 0 give 0."""
        v = np.asarray(v, dtype=float)
        out = np.ones(v.shape)
        out[v < 0] = 0.0
        idx = np.searchsorted(self._los, v, side="right") - 1
        inside = (v >= 0) & (v < self.domain_hi)
        for i, s in enumerate(self.segments):
            m = inside & (idx == i)
            if m.any():
                out[m] = s.form.value(v[m])
        return out

    def cdf_left(self, v):
        """Left limit F(v-)."""
        v = np.asarray(v, dtype=float)
        out = np.ones(v.shape)
        out[v <= 0] = 0.0
        idx = np.searchsorted(self._los, v, side="left") - 1
        inside = (v > 0) & (v <= self.domain_hi)
        for i, s in enumerate(self.segments):
            m = inside & (idx == i)
            if m.any():
                out[m] = s.form.value(v[m])
        return out

    def density(self, v):
        """Derivative of the continuous part; 0 on flat segments and outside."""
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape)
        idx = np.searchsorted(self._los, v, side="right") - 1
        inside = (v >= 0) & (v < self.domain_hi)
        for i, s in enumerate(self.segments):
            m = inside & (idx == i)
            if m.any() and not s.form.is_constant():
                out[m] = s.form.deriv(v[m])
        return out

    def segment_at(self, v):
        idx = int(np.searchsorted(self._los, v, side="right") - 1)
        return self.segments[idx] if 0 <= idx < len(self.segments) and v < self.domain_hi else None

    def breakpoints(self):
        pts = {s.lo for s in self.segments} | {self.domain_hi} | {p for p, _ in self.atoms}
        return sorted(pts)

    def atom_mass(self, p):
        return sum(m for q, m in self.atoms if q == p)

    # serialization -------------------------------------------------------
    def to_dict(self):
        return {
            "segments": [{"lo": s.lo, "hi": s.hi, "form": s.form.to_dict()} for s in self.segments],
            "atoms": [[p, m] for p, m in self.atoms],
            "domain_hi": self.domain_hi,
        }

    @classmethod
    def from_dict(cls, d):
        segs = tuple(Segment(float(s["lo"]), float(s["hi"]), form_from_dict(s["form"]))
                     for s in d["segments"])
        return cls(segs, tuple((p, m) for p, m in d["atoms"]), d["domain_hi"])


def point_mass(c, domain_hi=None):
    """Distribution concentrated at c (c > 0 unless domain_hi is given)."""
    c = float(c)
    if c == 0.0:
        hi = 1.0 if domain_hi is None else float(domain_hi)
        return PiecewiseCdf((Segment(0.0, hi, Constant(1.0)),), ((0.0, 1.0),), hi)
    hi = c if domain_hi is None else float(domain_hi)
    segs = [Segment(0.0, c, Constant(0.0))]
    if hi > c:
        segs.append(Segment(c, hi, Constant(1.0)))
    return PiecewiseCdf(tuple(segs), ((c, 1.0),), hi)


def discrete_distribution(points, probs):
    """Finite distribution on the given positive points."""
    order = np.argsort(points)
    pts = [float(points[i]) for i in order]
    ps = [float(probs[i]) for i in order]
    segs, cum, lo = [], 0.0, 0.0
    for p, m in zip(pts, ps):
        if p > lo:
            segs.append(Segment(lo, p, Constant(cum)))
        cum += m
        lo = p
    atoms = tuple(zip(pts, ps))
    if not segs:
        return PiecewiseCdf((Segment(0.0, pts[-1] or 1.0, Constant(1.0)),), atoms, pts[-1] or 1.0)
    return PiecewiseCdf(tuple(segs), atoms, pts[-1])


def mixture(dists: Sequence[PiecewiseCdf], weights: Sequence[float]) -> PiecewiseCdf:
    """Convex combination of distributions."""
    weights = [float(w) for w in weights]
    hi = max(d.domain_hi for d in dists)
    cuts = sorted({0.0, hi} | {x for d in dists for s in d.segments for x in (s.lo, s.hi)})
    segs = []
    for lo, up in zip(cuts[:-1], cuts[1:]):
        parts = []
        for d, w in zip(dists, weights):
            seg = d.segment_at(lo)
            parts.append((w, seg.form if seg is not None else Constant(1.0)))
        if all(f.is_constant() for _, f in parts):
            form = Constant(sum(w * f.c for w, f in parts))
        else:
            form = Mix(tuple(parts))
        segs.append(Segment(lo, up, form))
    masses = {}
    for d, w in zip(dists, weights):
        for p, m in d.atoms:
            masses[p] = masses.get(p, 0.0) + w * m
    atoms = tuple(sorted((p, m) for p, m in masses.items() if m > 0))
    return PiecewiseCdf(tuple(segs), atoms, hi)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def cdf_eval(dist: PiecewiseCdf, v):
    """Right-continuous CDF value at v >= 0."""
    dist.check()
    if np.any(np.asarray(v) < 0):
        raise ValueError("cdf_eval requires v >= 0")
    out = dist.cdf(v)
    return float(out) if np.ndim(out) == 0 else out


def _segment_inverse(form, p, lo, hi):
    inv = form.inverse(p, lo, hi)
    if inv is not None:
        return inv
    if form.kernel_code:
        return kernels.bisect_inverse(form.kernel_code, np.asarray(form.kernel_params(), dtype=float),
                                      np.ascontiguousarray(p, dtype=float), lo, hi)
    # generic vectorized bisection: smallest v with form(v) >= p
    a = np.full(p.shape, lo)
    b = np.full(p.shape, hi)
    for _ in range(100):
        mid = 0.5 * (a + b)
        up = form.value(mid) >= p
        b = np.where(up, mid, b)
        a = np.where(up, a, mid)
    return b


def quantile(dist: PiecewiseCdf, p):
    """Generalized inverse inf{v : F(v) >= p}, vectorized over p."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("quantile requires p in [0, 1]")
    flat = np.atleast_1d(p).ravel()
    out = np.full(flat.shape, dist.domain_hi)
    starts = np.array([float(s.form.value(np.array(s.lo))) for s in dist.segments])
    ends = np.array([float(s.form.value(np.array(s.hi))) for s in dist.segments])
    # running maximum guards against rounding in the segment end values
    ends = np.maximum.accumulate(ends)
    idx = np.searchsorted(ends, flat, side="left")
    for i, s in enumerate(dist.segments):
        m = idx == i
        if not m.any():
            continue
        pi = flat[m]
        res = np.full(pi.shape, s.lo)
        inner = pi > starts[i]
        if inner.any():
            res[inner] = _segment_inverse(s.form, pi[inner], s.lo, s.hi)
        out[m] = res
    out = out.reshape(np.shape(p)) if np.ndim(p) else out[0]
    return float(out) if np.ndim(out) == 0 else out


class RandomStream:
    """Seeded stream of uniforms backed by the counter-based Philox generator.

    ``spawn(i)`` returns the i-th child stream, so batch ``i`` sees the same
    variates however batches are scheduled.
    """

    def __init__(self, seed: int, _key: tuple = ()):
        self.seed = int(seed)
        self._key = tuple(_key)
        ss = np.random.SeedSequence(self.seed, spawn_key=self._key)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def uniform(self, size=None):
        return self._gen.random(size)

    def spawn(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, self._key + (int(index),))


def sample(dist: PiecewiseCdf, rng: RandomStream, size=None):
    """Inverse-transform draw(s) from dist."""
    return quantile(dist, rng.uniform(size))


def moment(dist: PiecewiseCdf, order: int = 1) -> float:
    """E[V] (order 1) or E[V^2] (order 2) as integrals of the survival function."""
    if order not in (1, 2):
        raise ValueError(f"unsupported moment order {order}")
    total = 0.0
    for s in dist.segments:
        val = s.form.survival_integral(s.lo, s.hi, order)
        if val is None:
            f = s.form
            val = _quad(lambda v: order * v ** (order - 1) * (1.0 - float(f.value(v))), s.lo, s.hi)
        total += val
    return total


def validate(dist: PiecewiseCdf) -> VerificationReport:
    """Grid check of structure, range, monotonicity, atoms and total mass."""
    errs = dist.structure_errors()
    if errs:
        return VerificationReport(monotone_ok=False, passed=False, details={"structure": errs})
    max_range = 0.0
    max_decrease = 0.0
    worst = None
    prev_end = 0.0
    cont_mass = 0.0
    jumps = {}
    for i, s in enumerate(dist.segments):
        eps = min(1e-12, (s.hi - s.lo) / 4)
        grid = np.concatenate(([s.lo, s.lo + eps], np.linspace(s.lo, s.hi, VALIDATE_POINTS)[1:-1],
                               [s.hi - eps, s.hi]))
        vals = s.form.value(grid)
        if not np.all(np.isfinite(vals)):
            return VerificationReport(monotone_ok=False, passed=False,
                                      details={"nonfinite_segment": i})
        rng_viol = max(0.0, float(-vals.min()), float(vals.max() - 1.0))
        max_range = max(max_range, rng_viol)
        dec = float(np.max(vals[:-1] - vals[1:])) if len(vals) > 1 else 0.0
        if dec > max_decrease:
            max_decrease, worst = dec, float(grid[int(np.argmax(vals[:-1] - vals[1:]))])
        jump = float(vals[0]) - prev_end
        if jump < -max_decrease:
            max_decrease, worst = -jump, s.lo
        if jump > 1e-13:
            jumps[s.lo] = jump
        cont_mass += float(vals[-1] - vals[0])
        prev_end = float(vals[-1])
    end_jump = 1.0 - prev_end
    if end_jump > 1e-13:
        jumps[dist.domain_hi] = jumps.get(dist.domain_hi, 0.0) + end_jump
    listed = {}
    for p, m in dist.atoms:
        listed[p] = listed.get(p, 0.0) + m
    atom_dev = 0.0
    for p in set(jumps) | set(listed):
        atom_dev = max(atom_dev, abs(jumps.get(p, 0.0) - listed.get(p, 0.0)))
    total = cont_mass + sum(listed.values())
    mass_dev = abs(total - 1.0)
    tol = 1e-9
    monotone_ok = max_decrease <= 1e-12
    passed = monotone_ok and max_range <= 1e-12 and atom_dev <= tol and mass_dev <= tol
    return VerificationReport(
        monotone_ok=monotone_ok, passed=passed,
        details={"max_decrease": max_decrease, "worst_v": worst, "range_violation": max_range,
                 "atom_mismatch": atom_dev, "total_mass_dev": mass_dev})


def grid_csv(dist: PiecewiseCdf, grid) -> str:
    """CSV text with header ``v,cdf``."""
    grid = np.asarray(grid, dtype=float)
    vals = dist.cdf(grid)
    lines = ["v,cdf"] + [f"{v!r},{c!r}" for v, c in zip(grid.tolist(), vals.tolist())]
    return "\n".join(lines) + "\n"

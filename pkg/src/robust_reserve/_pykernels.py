"""Pure-Python/numpy implementations of the hot kernels.

Semantics match ``_ckernels`` exactly; the backend is chosen in ``kernels``.
"""
import math

import numpy as np

SKIP_EXPONENT = 20.0


def _consts(code, params):
    if code == 1:
        uv, vbar = params
        return (uv, (1.0 - uv / vbar) / math.log(vbar / uv))
    if code == 2:
        n, a, uv, vbar = params
        m = n - 1.0
        c = m - 1.0 / m
        return (m, a, uv, c, (1.0 - a / vbar) ** m / (c + math.log(vbar / uv)))
    if code == 3:
        return tuple(params)
    raise ValueError(f"unknown form code {code}")


def form_value_deriv(code, params, v):
    """Value and derivative of the Newton-inverted forms (see ``core``)."""
    v = np.asarray(v, dtype=float)
    cs = _consts(code, params)
    if code == 1:
        uv, k = cs
        t = (v - uv) / uv
        small = np.abs(t) < 1e-4
        safe = np.where(t == 0.0, 1.0, t)
        ratio = np.where(t == 0.0, 1.0, np.log1p(safe) / safe)
        excess = np.where(small, 0.5 - t / 3.0 + t * t / 4.0,
                          (safe - np.log1p(safe)) / (safe * safe))
        return k * (v / uv) * ratio, k * excess / uv
    if code == 2:
        m, a, uv, c, pref = cs
        lg = c + np.log(v / uv)
        val = pref * (v / (v - a)) ** m * lg
        return val, val * (-m * a / (v * (v - a)) + 1.0 / (v * lg))
    l1, l2, uv = cs
    return l1 * np.log(v / uv) + 2.0 * l2 * (v - uv), l1 / v + 2.0 * l2


def form_value(code, params, v):
    return form_value_deriv(code, params, v)[0]


def bisect_inverse(code, params, p, lo, hi, iters=100):
    """Root of form(v) = p in [lo, hi] by Newton steps kept inside a shrinking bracket."""
    _consts(code, params)
    p = np.asarray(p, dtype=float)
    a = np.full(p.shape, float(lo))
    b = np.full(p.shape, float(hi))
    x = 0.5 * (a + b)
    active = np.ones(p.shape, dtype=bool)
    for _ in range(iters):
        if not active.any():
            break
        f, d = form_value_deriv(code, params, x[active])
        f = f - p[active]
        up = f >= 0.0
        aa, bb, xa = a[active], b[active], x[active]
        bb = np.where(up, xa, bb)
        aa = np.where(up, aa, xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = xa - f / d
        bad = ~((xn > aa) & (xn < bb))
        xn = np.where(bad, 0.5 * (aa + bb), xn)
        done = (np.abs(xn - xa) <= 4e-16 * np.abs(xa)) | (bb - aa <= 4e-16 * np.abs(bb)) | (f == 0.0)
        xn = np.where(f == 0.0, xa, xn)
        a[active], b[active], x[active] = aa, bb, xn
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    return x


def spa_revenue(values, reserves, inclusive=False):
    """Second-price revenue per row of ``values`` against per-row reserves."""
    values = np.asarray(values, dtype=float)
    reserves = np.asarray(reserves, dtype=float)
    n = values.shape[1]
    if n == 1:
        top = values[:, 0]
        second = np.zeros_like(top)
    else:
        part = np.partition(values, n - 2, axis=1)
        top = part[:, n - 1]
        second = part[:, n - 2]
    sold = top >= reserves if inclusive else top > reserves
    return np.where(sold, np.maximum(reserves, second), 0.0)


def nature_chain(s, k):
    """log x_1..x_k of the two-bidder forward recursion with log x_1 = -2**s.

    While x_i underflows the recursion acts on the additive remainder only,
    so extremely small x_1 are handled without loss.
    """
    y = np.empty(k)
    rem = 0.0
    e = float(s)
    i = 1
    while i <= k and e > SKIP_EXPONENT:
        y[i - 1] = -(2.0 ** e) + rem if e < 1023.0 else -math.inf
        rem = 0.5 * (rem + math.log(2.0 / i))
        e -= 1.0
        i += 1
    if i <= k:
        yc = -(2.0 ** e) + rem
        while i <= k:
            y[i - 1] = yc
            x = math.exp(yc)
            yc = 0.5 * (yc + math.log((2.0 / i) * (1.0 - x) + x))
            i += 1
    return y


def seller_chain(x):
    """Seller CDF values for unit multiplier; scale by lambda afterwards."""
    k = len(x)
    q = np.empty(k)
    q[0] = 0.5 / (1.0 - x[0])
    for i in range(1, k):
        a = i * x[i]
        q[i] = (a * q[i - 1] + 0.5) / (a + 1.0 - x[i])
    return q

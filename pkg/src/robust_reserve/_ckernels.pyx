# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, log1p, exp, pow, fabs, INFINITY

from . import _pykernels as _pyk

cnp.import_array()

cdef double SKIP_EXPONENT = 20.0


cdef inline void _value_deriv(int code, double[:] cs, double v, double* f, double* d) noexcept nogil:
    cdef double t, lg, val, ratio, excess
    if code == 1:
        t = (v - cs[0]) / cs[0]
        if t == 0.0:
            ratio = 1.0
        else:
            ratio = log1p(t) / t
        if fabs(t) < 1e-4:
            excess = 0.5 - t / 3.0 + t * t / 4.0
        else:
            excess = (t - log1p(t)) / (t * t)
        f[0] = cs[1] * (v / cs[0]) * ratio
        d[0] = cs[1] * excess / cs[0]
    elif code == 2:
        lg = cs[3] + log(v / cs[2])
        val = cs[4] * pow(v / (v - cs[1]), cs[0]) * lg
        f[0] = val
        d[0] = val * (-cs[0] * cs[1] / (v * (v - cs[1])) + 1.0 / (v * lg))
    else:
        f[0] = cs[0] * log(v / cs[2]) + 2.0 * cs[1] * (v - cs[2])
        d[0] = cs[0] / v + 2.0 * cs[1]


def bisect_inverse(int code, params, double[:] p, double lo, double hi, int iters=100):
    """Root of form(v) = p in [lo, hi] by Newton steps kept inside a shrinking bracket."""
    cdef double[:] cs = np.asarray(_pyk._consts(code, tuple(params)), dtype=float)
    cdef Py_ssize_t j, m = p.shape[0]
    cdef int it
    cdef double a, b, x, xn, fx, dx
    out = np.empty(m)
    cdef double[:] o = out
    with nogil:
        for j in range(m):
            a = lo
            b = hi
            x = 0.5 * (a + b)
            for it in range(iters):
                _value_deriv(code, cs, x, &fx, &dx)
                fx = fx - p[j]
                if fx == 0.0:
                    break
                if fx > 0.0:
                    b = x
                else:
                    a = x
                xn = x - fx / dx
                if not (xn > a and xn < b):
                    xn = 0.5 * (a + b)
                if fabs(xn - x) <= 4e-16 * fabs(x) or b - a <= 4e-16 * fabs(b):
                    x = xn
                    break
                x = xn
            o[j] = x
    return out


def spa_revenue(double[:, :] values, double[:] reserves, bint inclusive=False):
    cdef Py_ssize_t i, j, m = values.shape[0], n = values.shape[1]
    cdef double top, second, v, r
    out = np.empty(m)
    cdef double[:] o = out
    with nogil:
        for i in range(m):
            top = values[i, 0]
            second = 0.0
            for j in range(1, n):
                v = values[i, j]
                if v > top:
                    second = top
                    top = v
                elif v > second:
                    second = v
            r = reserves[i]
            if top > r or (inclusive and top == r):
                o[i] = r if r > second else second
            else:
                o[i] = 0.0
    return out


def nature_chain(double s, Py_ssize_t k):
    out = np.empty(k)
    cdef double[:] y = out
    cdef double rem = 0.0, e = s, yc, x
    cdef Py_ssize_t i = 1
    with nogil:
        while i <= k and e > SKIP_EXPONENT:
            if e < 1023.0:
                y[i - 1] = -pow(2.0, e) + rem
            else:
                y[i - 1] = -INFINITY
            rem = 0.5 * (rem + log(2.0 / i))
            e -= 1.0
            i += 1
        if i <= k:
            yc = -pow(2.0, e) + rem
            while i <= k:
                y[i - 1] = yc
                x = exp(yc)
                yc = 0.5 * (yc + log((2.0 / i) * (1.0 - x) + x))
                i += 1
    return out


def seller_chain(double[:] x):
    cdef Py_ssize_t i, k = x.shape[0]
    cdef double a
    out = np.empty(k)
    cdef double[:] q = out
    with nogil:
        q[0] = 0.5 / (1.0 - x[0])
        for i in range(1, k):
            a = i * x[i]
            q[i] = (a * q[i - 1] + 0.5) / (a + 1.0 - x[i])
    return out

"""Reference values frozen from a 30-digit mpmath evaluation of the defining equations.

Each constant lists the equation it was derived from so it can be regenerated.
"""
import math

# x (1 + log(1/x)) = 0.3
UV_TWO_03 = 0.087229170207357954824
# 1 - uv / 0.5
F_TWO_03_AT_HALF = 0.82554165958528409
# (1 - uv) / log(1/uv)
Q0_TWO_03 = 0.37420656839985273781
# 2 uv - uv^2
REV_TWO_03 = 0.16684941227965168502
# 2 (1 - uv) / log(1/uv)
LAM_TWO_03 = 0.74841313679970547562
# REV_TWO_03 - LAM_TWO_03 * 0.3
LAGRANGIAN_TWO_03 = -0.0576745287602599576

# x (2.5 - log x) = 1.2
UV_THREE_03 = 0.33351135834186398436
# uv / 4
A_THREE_03 = 0.083377839585465996089
# 1 - (1 - a)^3
REV_THREE_03 = 0.22985755776715846571
# 3 (1 - a)^2 / (1.5 + log(1/uv))
LAM_THREE_03 = 0.97017418618819206724

# 2/e - 1/e^2
REV_TWO_2E = 0.60042359910627195130

# k = 2 discrete game: x1^2 - 2.4 x1 + 0.98 = 0, x2^2 = 2 x1 - x1^2,
# lambda from q1 (1 - x1) = lambda / 2 and the one backward step from q2 = 1
DISCRETE_K2_X = (0.52176700168747318609, 0.87823299831252681391)
DISCRETE_K2_LAM = 0.70511608769020573308
DISCRETE_K2_Q1 = 0.73720978077448566729


def bisect(fun, lo, hi, iters=200):
    """Plain bisection for an increasing function, used as an independent oracle."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if fun(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def uv_two_oracle(mu, vbar):
    return bisect(lambda x: x * (1 + math.log(vbar / x)) - mu, 1e-300, vbar)


def uv_n_oracle(n, mu, vbar):
    m = n - 1
    return bisect(lambda x: (n - 1 / m + math.log(vbar / x)) * x - m * m * mu, 1e-300, vbar)

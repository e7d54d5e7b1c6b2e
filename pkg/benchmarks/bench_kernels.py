"""Timing comparison of the compiled and pure-Python kernels.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from robust_reserve import _pykernels
from robust_reserve.closed_form import solve
from robust_reserve.core import ParametricSetting

try:
    from robust_reserve import _ckernels
except ImportError:
    _ckernels = None


def _cases():
    sol = solve(ParametricSetting(2, 0.3, 1.0))
    seg = sol.Q_star.segments[-1]
    code = seg.form.kernel_code
    params = np.asarray(seg.form.kernel_params(), dtype=float)
    rng = np.random.default_rng(0)
    # p values inside the continuous part of Q*
    p_lo, p_hi = float(seg.form.value(seg.lo)), float(seg.form.value(seg.hi))
    ps = rng.uniform(p_lo, p_hi, 1_000_000)
    values = np.ascontiguousarray(rng.uniform(0, 1, (1_000_000, 2)))
    reserves = rng.uniform(0, 1, 1_000_000)
    k = 10_000

    def inversion(mod):
        return lambda: mod.bisect_inverse(code, params, ps, seg.lo, seg.hi)

    def revenue(mod):
        return lambda: mod.spa_revenue(values, reserves, False)

    def discrete(mod):
        def run():
            log_x = mod.nature_chain(3.0, k)
            mod.seller_chain(np.exp(log_x))
        return run

    return [("inverse (1e6 draws)", inversion), ("spa_revenue (1e6 x 2)", revenue),
            ("discrete chains (k=1e4)", discrete)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"{'kernel':28s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>9s}")
    for name, make in _cases():
        t_py = min(timeit.repeat(make(_pykernels), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:28s} {t_py:12.4f} {'n/a':>12s} {'n/a':>9s}")
            continue
        t_c = min(timeit.repeat(make(_ckernels), number=1, repeat=args.repeat))
        print(f"{name:28s} {t_py:12.4f} {t_c:12.4f} {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()

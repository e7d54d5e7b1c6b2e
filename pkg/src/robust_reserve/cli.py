"""Command-line entry point: ``robust-reserve <command> [flags]``.

Exit codes: 0 success, 1 failed verification, 2 invalid input, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .closed_form import (DomainError, NumericError, single_mean_ub, single_two_moment, solve,
                          solution_from_dict)
from .core import ParametricSetting
from .discrete import convergence_study, solve_discrete_single, solve_discrete_two
from .montecarlo import simulate_auction
from .revenue import robust_revenue_formula
from .verify import certify_equilibrium, suboptimality_demo

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
SEED_ENV = "ROBUST_RESERVE_SEED"


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: Optional[int] = None
    mu: Optional[float] = None
    vbar: Optional[float] = None
    mu2: Optional[float] = None
    lambda2: Optional[float] = None
    mode: str = "mean-ub"
    k: Optional[int] = None
    ks: list = field(default_factory=lambda: [10, 100, 1000])
    trials: int = 1_000_000
    seed: int = 0
    tol: float = 1e-8
    tie_sale: str = "strict"
    out: Optional[str] = None
    grid: int = 1000
    input: Optional[str] = None


def _parser():
    p = argparse.ArgumentParser(prog="robust-reserve",
                                description="Robust reserve prices for second-price auctions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, setting=True):
        if setting:
            sp.add_argument("--n", type=int, help="number of bidders")
            sp.add_argument("--mu", type=float, help="mean value")
            sp.add_argument("--vbar", type=float, default=1.0, help="upper bound of values")
        sp.add_argument("--out", help="output path (prefix for solve)")

    sp = sub.add_parser("solve", help="closed-form equilibrium as JSON, plus v,F,Q CSV with --out")
    common(sp)
    sp.add_argument("--grid", type=int, default=1000, help="CSV grid size")
    sp = sub.add_parser("discrete", help="discretized equilibrium as i,r,x,q CSV")
    common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp = sub.add_parser("converge", help="distance of discrete to closed-form equilibria")
    common(sp)
    sp.add_argument("--ks", default="10,100,1000", help="comma-separated grid sizes")
    sp = sub.add_parser("verify", help="certify an equilibrium; exit 1 on failure")
    common(sp)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--grid", type=int, default=2000, help="v-grid size")
    sp.add_argument("--input", help="solution JSON written by solve")
    sp = sub.add_parser("simulate", help="Monte Carlo revenue of the equilibrium pair")
    common(sp)
    sp.add_argument("--trials", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--tie-sale", choices=("strict", "inclusive"), default="strict")
    sp = sub.add_parser("single", help="single-bidder robust price distribution")
    sp.add_argument("--mode", choices=("mean-ub", "moments-ub", "moments"), default="mean-ub")
    sp.add_argument("--mu", type=float)
    sp.add_argument("--mu2", type=float)
    sp.add_argument("--vbar", type=float)
    sp.add_argument("--lambda2", type=float)
    sp.add_argument("--k", type=int, help="also emit the discrete solution on k geometric steps")
    sp.add_argument("--out")
    sp = sub.add_parser("demo-suboptimal", help="robust second-price vs ironed mechanism revenue")
    sp.add_argument("--out")
    return p


def _config(ns) -> RunConfig:
    cfg = RunConfig(ns.command)
    for name in ("n", "mu", "vbar", "mu2", "lambda2", "mode", "k", "trials", "tol", "out",
                 "grid", "input"):
        if hasattr(ns, name) and getattr(ns, name) is not None:
            setattr(cfg, name, getattr(ns, name))
    if getattr(ns, "tie_sale", None):
        cfg.tie_sale = ns.tie_sale
    if getattr(ns, "ks", None):
        try:
            cfg.ks = [int(x) for x in ns.ks.split(",") if x.strip()]
        except ValueError as exc:
            raise UsageError(f"--ks must be comma-separated integers: {exc}") from None
        if cfg.ks != sorted(cfg.ks) or any(k < 2 for k in cfg.ks):
            raise UsageError("--ks must be increasing integers > 1")
    seed = getattr(ns, "seed", None)
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer") from None
    cfg.seed = seed
    needs_setting = cfg.command in ("solve", "discrete", "converge", "simulate") or \
        (cfg.command == "verify" and cfg.input is None)
    if needs_setting and (ns.n is None or ns.mu is None):
        raise UsageError(f"{cfg.command} requires --n and --mu")
    if cfg.command in ("discrete", "converge") and cfg.n != 2:
        raise UsageError(f"{cfg.command} supports --n 2 only")
    if cfg.command == "simulate" and cfg.trials < 1:
        raise UsageError("--trials must be >= 1")
    return cfg


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def distribution_csv(F, Q, vbar, grid=1000):
    """Columns v,F,Q on a uniform grid plus atoms and segment endpoints."""
    pts = set(np.linspace(0.0, vbar, grid).tolist())
    for D in (F, Q):
        pts.update(x for x in D.breakpoints() if 0.0 <= x <= vbar)
    v = np.array(sorted(pts))
    lines = ["v,F,Q"] + [f"{a!r},{b!r},{c!r}" for a, b, c in
                         zip(v.tolist(), F.cdf(v).tolist(), Q.cdf(v).tolist())]
    return "\n".join(lines) + "\n"


def _setting(cfg):
    return ParametricSetting(cfg.n, cfg.mu, cfg.vbar)


def run(cfg: RunConfig) -> int:
    cmd = cfg.command
    if cmd == "solve":
        sol = solve(_setting(cfg))
        text = _dumps(sol.to_dict())
        if cfg.out:
            _emit(text, cfg.out + ".json")
            _emit(distribution_csv(sol.F_star, sol.Q_star, cfg.vbar, cfg.grid), cfg.out + ".csv")
        else:
            _emit(text, None)
        return EXIT_OK
    if cmd == "discrete":
        eq = solve_discrete_two(_setting(cfg), cfg.k)
        _emit(eq.to_csv(), cfg.out)
        return EXIT_OK
    if cmd == "converge":
        table = convergence_study(_setting(cfg), cfg.ks)
        _emit(table.to_csv(), cfg.out)
        return EXIT_OK
    if cmd == "verify":
        if cfg.input:
            with open(cfg.input) as fh:
                sol = solution_from_dict(json.load(fh))
        else:
            sol = solve(_setting(cfg))
        rep = certify_equilibrium(sol, cfg.tol, cfg.grid)
        _emit(_dumps(rep.to_dict()), cfg.out)
        return EXIT_OK if rep.passed else EXIT_FAILED
    if cmd == "simulate":
        sol = solve(_setting(cfg))
        rep = simulate_auction(sol.F_star, sol.Q_star, cfg.n, cfg.trials, cfg.seed,
                               tie_sale=cfg.tie_sale, analytic_ref=robust_revenue_formula(sol))
        _emit(_dumps(rep.to_dict()), cfg.out)
        return EXIT_OK
    if cmd == "single":
        if cfg.mu is None:
            raise UsageError("single requires --mu")
        if cfg.mode == "mean-ub":
            if cfg.vbar is None:
                raise UsageError("mean-ub mode requires --vbar")
            sol = single_mean_ub(ParametricSetting(1, cfg.mu, cfg.vbar))
        elif cfg.mode == "moments-ub":
            if cfg.vbar is None or cfg.mu2 is None:
                raise UsageError("moments-ub mode requires --mu2 and --vbar")
            sol = single_two_moment(cfg.mu, cfg.mu2, cfg.vbar, cfg.lambda2)
        else:
            if cfg.mu2 is None:
                raise UsageError("moments mode requires --mu2")
            sol = single_two_moment(cfg.mu, cfg.mu2)
        out = sol.to_dict()
        if cfg.k is not None:
            eq = solve_discrete_single(sol.mu, sol.vbar, sol.uv, cfg.k)
            out["discrete"] = {"alpha": eq.alpha, "lambda": eq.lam, "r": eq.grid.tolist(),
                               "x": eq.x.tolist(), "q": eq.q.tolist()}
        _emit(_dumps(out), cfg.out)
        return EXIT_OK
    if cmd == "demo-suboptimal":
        spa, ironed = suboptimality_demo(ParametricSetting(3, 2.0 / 3.0, 1.0))
        _emit(_dumps({"second_price_robust_revenue": spa, "ironed_mechanism_revenue": ironed,
                      "difference": ironed - spa}), cfg.out)
        return EXIT_OK
    raise UsageError(f"unknown command {cmd}")


def main(argv=None) -> int:
    parser = _parser()
    ns = parser.parse_args(argv)
    try:
        return run(_config(ns))
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, DomainError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

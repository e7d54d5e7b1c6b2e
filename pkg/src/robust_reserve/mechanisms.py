"""Outcome rules for the second-price auction with reserve and a three-bidder ironed mechanism.

Each mechanism exposes ``lottery(bids) -> (winners, payment)``: the winner is
drawn uniformly from ``winners`` and pays ``payment``.  Keeping the lottery
explicit lets expected utilities be computed exactly, with ``Fraction``
inputs giving exact rational results.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels

FIVE_NINTHS = Fraction(5, 9)
LONE_HIGH_PAYMENT = Fraction(23, 27)
# float inputs such as a computed 5/9 may sit one ulp below the exact threshold
THRESHOLD_SLACK = 1e-12


@dataclass(frozen=True)
class MechanismOutcome:
    winner: Optional[int]
    payment: float


def _argmax_set(vals):
    top = max(vals)
    return [i for i, v in enumerate(vals) if v == top], top


def _pick(winners, tie_rng):
    if tie_rng is None or len(winners) == 1:
        return winners[0]
    u = tie_rng.uniform()
    return winners[min(int(u * len(winners)), len(winners) - 1)]


class SecondPrice:
    """Second-price auction with a fixed reserve."""

    def __init__(self, reserve=0, tie_sale="strict"):
        if tie_sale not in ("strict", "inclusive"):
            raise ValueError("tie_sale must be 'strict' or 'inclusive'")
        self.reserve = reserve
        self.inclusive = tie_sale == "inclusive"
        self.name = f"spa(reserve={reserve})"

    def lottery(self, bids):
        if len(bids) == 0:
            raise ValueError("bids must be nonempty")
        winners, top = _argmax_set(bids)
        sold = top >= self.reserve if self.inclusive else top > self.reserve
        if not sold:
            return [], 0
        if len(winners) > 1:
            second = top
        else:
            rest = [b for i, b in enumerate(bids) if i != winners[0]]
            second = max(rest) if rest else 0
        return winners, max(self.reserve, second)

    def revenues(self, values, tie_u):
        m = values.shape[0]
        res = kernels.spa_revenue(np.ascontiguousarray(values), np.full(m, float(self.reserve)),
                                  self.inclusive)
        return res, np.zeros(m, dtype=bool)


class FirstPrice:
    """Winner pays their own bid; used as a non-truthful control."""

    def __init__(self, reserve=0):
        self.reserve = reserve
        self.name = f"fpa(reserve={reserve})"

    def lottery(self, bids):
        if len(bids) == 0:
            raise ValueError("bids must be nonempty")
        winners, top = _argmax_set(bids)
        if not top > self.reserve:
            return [], 0
        return winners, top

    def revenues(self, values, tie_u):
        top = values.max(axis=1)
        return np.where(top > self.reserve, top, 0.0), np.zeros(len(top), dtype=bool)


class IronedMechanism:
    """Three-bidder mechanism on effective types {ignored, 5/9, 1}.

    Bids below 5/9 are ignored, bids in [5/9, 1) count as 5/9 and bids of
    at least 1 count as 1.  The winner is uniform among the highest effective
    bidders.  Two or more effective 1s pay 1, a lone 1 pays 23/27, and
    otherwise the winner pays 5/9.
    """

    name = "ironed"

    @staticmethod
    def effective(b):
        slack = 0 if isinstance(b, (int, Fraction)) else THRESHOLD_SLACK
        if b < FIVE_NINTHS - slack:
            return None
        return FIVE_NINTHS if b < 1 - slack else Fraction(1)

    def lottery(self, bids):
        if len(bids) != 3:
            raise ValueError("the ironed mechanism takes exactly 3 bids")
        eff = [self.effective(b) for b in bids]
        ones = [i for i, e in enumerate(eff) if e == 1]
        if len(ones) >= 2:
            return ones, Fraction(1)
        if len(ones) == 1:
            return ones, LONE_HIGH_PAYMENT
        mids = [i for i, e in enumerate(eff) if e is not None]
        if not mids:
            return [], 0
        return mids, FIVE_NINTHS

    def revenues(self, values, tie_u):
        if values.shape[1] != 3:
            return np.zeros(values.shape[0]), np.ones(values.shape[0], dtype=bool)
        ones = (values >= 1.0 - THRESHOLD_SLACK).sum(axis=1)
        any_eff = (values >= float(FIVE_NINTHS) - THRESHOLD_SLACK).any(axis=1)
        rev = np.where(ones >= 2, 1.0,
                       np.where(ones == 1, float(LONE_HIGH_PAYMENT),
                                np.where(any_eff, float(FIVE_NINTHS), 0.0)))
        return rev, np.zeros(values.shape[0], dtype=bool)


def outcome(mech, bids, tie_rng=None) -> MechanismOutcome:
    winners, pay = mech.lottery(list(bids))
    if not winners:
        return MechanismOutcome(None, 0)
    return MechanismOutcome(_pick(winners, tie_rng), pay)


def spa_outcome(bids: Sequence, reserve, tie_rng=None, tie_sale="strict") -> MechanismOutcome:
    """Second-price outcome; ties at the top are broken uniformly with one variate."""
    return outcome(SecondPrice(reserve, tie_sale), bids, tie_rng)


def ironed_outcome(bids: Sequence, tie_rng=None) -> MechanismOutcome:
    return outcome(IronedMechanism(), bids, tie_rng)


def expected_utility(mech, bids, bidder, value):
    winners, pay = mech.lottery(list(bids))
    if bidder not in winners:
        return 0
    return (value - pay) / len(winners)


def expected_revenue(mech, support: Sequence, probs: Sequence, n: int):
    """Exact expected payment under i.i.d. values by enumerating all profiles."""
    total = 0
    for idx in itertools.product(range(len(support)), repeat=n):
        w = 1
        for j in idx:
            w = w * probs[j]
        winners, pay = mech.lottery([support[j] for j in idx])
        if winners:
            total = total + w * pay
    return total


@dataclass
class TruthfulnessReport:
    passed: bool
    violations: list = field(default_factory=list)
    binding: list = field(default_factory=list)
    checked: int = 0

    def to_dict(self):
        conv = lambda x: float(x) if isinstance(x, Fraction) else x
        fix = lambda d: {k: ([conv(v) for v in val] if isinstance(val, (list, tuple)) else conv(val))
                         for k, val in d.items()}
        return {"passed": self.passed, "checked": self.checked,
                "violations": [fix(v) for v in self.violations],
                "binding": [fix(b) for b in self.binding]}


def _probes(types):
    ts = sorted(set(types))
    lo, hi = ts[0], ts[-1]
    spread = (hi - lo) if hi > lo else (abs(hi) or 1)
    below = lo / 2 if lo > 0 else lo - spread
    mids = [(a + b) / 2 for a, b in zip(ts[:-1], ts[1:])]
    return ts + mids + [below, hi + spread]


def truthfulness_check(mech, type_space: Sequence, n: int, rng=None, tol=1e-12) -> TruthfulnessReport:
    """Exhaustive dominant-strategy check against every opponent profile.

    Utilities are exact expectations over the uniform tie-break, so no
    randomness is used; ``rng`` is accepted for interface symmetry.
    """
    types = list(type_space)
    reports = _probes(types)
    violations, binding, checked = [], [], 0
    for bidder in range(n):
        for opp in itertools.product(types, repeat=n - 1):
            for t in types:
                truth = list(opp[:bidder]) + [t] + list(opp[bidder:])
                u_truth = expected_utility(mech, truth, bidder, t)
                for b in reports:
                    if b == t:
                        continue
                    dev = list(truth)
                    dev[bidder] = b
                    u_dev = expected_utility(mech, dev, bidder, t)
                    checked += 1
                    gap = u_truth - u_dev
                    rec = {"bidder": bidder, "value": t, "opponents": list(opp), "report": b,
                           "u_truth": u_truth, "u_dev": u_dev}
                    if gap < -tol:
                        violations.append(rec)
                    elif abs(gap) <= tol and u_truth > tol:
                        binding.append(rec)
    return TruthfulnessReport(not violations, violations, binding, checked)

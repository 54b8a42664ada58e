"""Capacity-interval action sets and the linear reward-inaction learner."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

Interval = tuple[int, int]
StrategyVector = tuple[float, ...]

SIMPLEX_TOL = 1e-9


def build_action_set(cap_total: int, step: int = 1) -> list[Interval]:
    """All intervals (lo, hi) on the grid step, 2*step, ..., <= cap_total.

    Lexicographic order; q*(q+1)/2 entries with q = cap_total // step.
    """
    if step <= 0 or step > cap_total:
        raise ValueError(f"granularity {step} must lie in [1, {cap_total}]")
    grid = range(step, cap_total + 1, step)
    return [(lo, hi) for lo in grid for hi in grid if lo <= hi]


def validate_action_set(actions: Sequence[Interval], cap_total: int) -> list[Interval]:
    actions = [tuple(a) for a in actions]
    if not actions:
        raise ValueError("action set must not be empty")
    if len(set(actions)) != len(actions):
        raise ValueError("duplicate intervals in action set")
    for lo, hi in actions:
        if not 1 <= lo <= hi <= cap_total:
            raise ValueError(f"interval ({lo},{hi}) violates 1 <= lo <= hi <= {cap_total}")
    return actions


def uniform_strategy(m: int) -> StrategyVector:
    return (1.0 / m,) * m


def check_simplex(s: Sequence[float], strict_positive: bool = False) -> None:
    if not s:
        raise ValueError("empty strategy vector")
    if any(not 0.0 <= p <= 1.0 for p in s):
        raise ValueError(f"probabilities outside [0,1]: {list(s)}")
    total = math.fsum(s)
    if abs(total - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"strategy sums to {total}, not 1")
    if strict_positive and min(s) <= 0.0:
        raise ValueError("initial strategy must give every action nonzero probability")


def sample_action(s: Sequence[float], rng) -> int:
    """Inverse-CDF draw using a single ``rng.random()`` uniform."""
    check_simplex(s)
    draw = rng.random()
    acc = 0.0
    last = 0
    for k, p in enumerate(s):
        if p > 0.0:
            last = k
            acc += p
            if draw < acc:
                return k
    # rounding left the cumulative sum just under the draw
    return last


@dataclass
class BenefitBounds:
    running_min: float | None = None
    running_max: float | None = None

    def absorb(self, benefit: float) -> None:
        if self.running_min is None:
            self.running_min = self.running_max = benefit
        else:
            self.running_min = min(self.running_min, benefit)
            self.running_max = max(self.running_max, benefit)


def normalized_utility(benefit: float, bounds: BenefitBounds) -> float:
    lo, hi = bounds.running_min, bounds.running_max
    if lo is None or hi <= lo:
        return 0.0
    u = (benefit - lo) / (hi - lo)
    return min(1.0, max(0.0, u))


def lri_update(s: Sequence[float], chosen: int, u: float, b: float) -> StrategyVector:
    """Linear reward-inaction step.

    Every other action loses the fraction b*u of its mass; the played action
    takes the complement so the vector stays exactly normalised.
    """
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"utility {u} outside [0,1]")
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"learning rate {b} outside [0,1]")
    if not 0 <= chosen < len(s):
        raise IndexError(f"action index {chosen} out of range for {len(s)} actions")
    step = b * u
    if step == 0.0:
        return tuple(s)
    out = [p - step * p for p in s]
    out[chosen] = 0.0
    out[chosen] = max(0.0, 1.0 - math.fsum(out))
    return tuple(out)

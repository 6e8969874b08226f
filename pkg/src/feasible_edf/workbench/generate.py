"""Random task-set generation and classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from ..task_model import Task, TaskSet, as_rat

__all__ = ["GenSpec", "SetProfile", "generate_taskset", "profile", "rng_for"]


@dataclass(frozen=True)
class GenSpec:
    """Population parameters.

    Tasks are appended while the total utilization is below ``M``.  Each
    period is a uniform integer in ``period_range``; each execution cost is
    uniform on the grid ``1/cost_resolution`` inside
    ``[min(cost_min, u_max_cap * p), u_max_cap * p]`` (integer costs by
    default; when the interval holds no grid point the cost is
    ``u_max_cap * p``).  The task that would reach or overshoot ``M`` is
    trimmed so the total is exactly ``M``.
    """

    M: int
    u_max_cap: Fraction
    period_range: Tuple[int, int] = (1, 100)
    seed: int = 0
    count: int = 1000
    cost_min: Fraction = Fraction(1)
    cost_resolution: int = 1

    def __post_init__(self):
        object.__setattr__(self, "u_max_cap", as_rat(self.u_max_cap))
        object.__setattr__(self, "cost_min", as_rat(self.cost_min))
        if self.M < 1:
            raise ValueError("M must be positive")
        if not 0 < self.u_max_cap <= 1:
            raise ValueError("u_max_cap must lie in (0, 1]")
        lo, hi = self.period_range
        if not 1 <= lo <= hi:
            raise ValueError(f"bad period range {self.period_range}")
        if self.cost_min <= 0 or self.cost_resolution < 1 or self.count < 0:
            raise ValueError("cost_min, cost_resolution and count must be positive")


def rng_for(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for set ``index`` of a population."""
    return np.random.default_rng(np.random.SeedSequence([seed, index, stream]))


def generate_taskset(spec: GenSpec, index: int) -> TaskSet:
    rng = rng_for(spec.seed, index)
    lo_p, hi_p = spec.period_range
    res = spec.cost_resolution
    cap = spec.u_max_cap
    target = Fraction(spec.M)
    total = Fraction(0)
    tasks = []
    while total < target:
        p = int(rng.integers(lo_p, hi_p + 1))
        hi_c = cap * p
        lo_c = min(spec.cost_min, hi_c)
        k_lo = math.ceil(lo_c * res)
        k_hi = math.floor(hi_c * res)
        cost = hi_c if k_lo > k_hi else Fraction(int(rng.integers(k_lo, k_hi + 1)), res)
        u = cost / p
        if total + u >= target:
            u = target - total
            cost = u * p
        tasks.append(Task(len(tasks), cost, Fraction(p)))
        total += u
    return TaskSet(tuple(tasks), spec.M)


@dataclass(frozen=True)
class SetProfile:
    e_max: Fraction
    e_avg: Fraction
    u_max_observed: Fraction
    u_avg: Fraction

    def value(self, classification: str) -> float:
        return float({"e_max": self.e_max, "e_avg": self.e_avg,
                      "u_max": self.u_max_observed, "u_avg": self.u_avg}[classification])


def profile(ts: TaskSet) -> SetProfile:
    costs = [t.exec_cost for t in ts]
    utils = [t.utilization for t in ts]
    n = len(ts)
    return SetProfile(max(costs), sum(costs, Fraction(0)) / n,
                      max(utils), sum(utils, Fraction(0)) / n)

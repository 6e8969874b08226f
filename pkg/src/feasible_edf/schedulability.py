"""Utilization-based schedulability tests."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath

from .task_model import TaskSet

__all__ = [
    "TestVerdict",
    "edf_uniprocessor_test",
    "rm_utilization_bound",
    "rm_sufficient_test",
    "feasible_edf_admissible",
]


@dataclass(frozen=True)
class TestVerdict:
    schedulable: bool
    bound_used: Union[Fraction, float]
    total_utilization: Fraction

    __test__ = False  # keep pytest from collecting this as a test class


def _require_uniprocessor(ts: TaskSet) -> None:
    if ts.processors != 1:
        raise ValueError(f"uniprocessor test applied to M={ts.processors}")


def edf_uniprocessor_test(ts: TaskSet) -> TestVerdict:
    """Implicit-deadline EDF on one processor: schedulable iff U <= 1."""
    _require_uniprocessor(ts)
    u = ts.total_utilization
    return TestVerdict(u <= 1, Fraction(1), u)


def rm_utilization_bound(n: int) -> float:
    """Liu & Layland bound ``n (2^(1/n) - 1)``.

    Evaluated with 30 significant digits through ``expm1`` so large ``n``
    does not lose precision to cancellation, then rounded to a float.
    """
    if n < 1:
        raise ValueError("rm_utilization_bound needs n >= 1")
    with mpmath.workdps(30):
        return float(n * mpmath.expm1(mpmath.log(2) / n))


def rm_sufficient_test(ts: TaskSet) -> TestVerdict:
    """Sufficient-only RM test; ``False`` does not prove infeasibility."""
    _require_uniprocessor(ts)
    u = ts.total_utilization
    bound = rm_utilization_bound(len(ts))
    # exact comparison against the float bound
    return TestVerdict(u <= Fraction(bound), bound, u)


def feasible_edf_admissible(ts: TaskSet) -> bool:
    """Every task light and total utilization at most ``M``."""
    return ts.u_max <= Fraction(1, 2) and ts.total_utilization <= ts.processors

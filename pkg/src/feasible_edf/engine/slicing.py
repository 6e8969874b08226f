"""Period transformation (job slicing)."""

from __future__ import annotations

import math
from dataclasses import replace
from fractions import Fraction
from typing import Iterable, Tuple

from ..task_model import Task, TaskSet, as_rat

__all__ = ["period_transform", "choose_slice", "slice_factor", "slice_tasks"]


def period_transform(task: Task, target_cost) -> Task:
    """Replace ``T(e, p)`` by ``T(e/q, p/q)`` where ``q = e / target_cost``.

    ``q`` must be a positive integer; utilization is unchanged.
    """
    target_cost = as_rat(target_cost)
    if not 0 < target_cost <= task.exec_cost:
        raise ValueError(f"target cost {target_cost} outside (0, {task.exec_cost}]")
    q = task.exec_cost / target_cost
    if q.denominator != 1:
        raise ValueError(f"exec cost {task.exec_cost} is not an integer multiple of {target_cost}")
    q = q.numerator
    if q == 1:
        return task
    return replace(task, exec_cost=task.exec_cost / q, period=task.period / q,
                   rel_deadline=task.rel_deadline / q,
                   first_release=task.first_release)


def choose_slice(task: Task, bounds: Tuple) -> Fraction:
    """Largest ``exec_cost / q`` (integer ``q >= 1``) inside ``[lo, hi)``.

    Costs already below ``lo`` are left whole.  When no quotient lands in
    the range the largest quotient below ``hi`` is used.
    """
    lo, hi = (as_rat(b) for b in bounds)
    if lo <= 0 or hi <= lo:
        raise ValueError(f"bad slice range [{lo}, {hi})")
    e = task.exec_cost
    if e < lo:
        return e
    q = math.floor(e / hi) + 1
    return e / q


def slice_factor(task: Task, bounds: Tuple) -> int:
    return (task.exec_cost / choose_slice(task, bounds)).numerator


def slice_tasks(ts: TaskSet, task_ids: Iterable[int], bounds: Tuple) -> Tuple[TaskSet, dict]:
    """Transform the given tasks; returns the new set and ``{task: q}``."""
    tasks = list(ts.tasks)
    factors = {}
    for i in task_ids:
        target = choose_slice(ts[i], bounds)
        tasks[i] = period_transform(ts[i], target)
        factors[i] = (ts[i].exec_cost / target).numerator
    return TaskSet(tuple(tasks), ts.processors), factors

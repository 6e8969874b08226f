"""Slot-by-slot reference scheduler for cross-checking the event engine."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Tuple

from ..task_model import TaskSet, as_rat
from .core import SimStats

__all__ = ["brute_force_oracle"]


def brute_force_oracle(ts: TaskSet, quantum=1, horizon=None, priority: str = "edf") -> SimStats:
    """Uniprocessor EDF, one quantum at a time.

    Every release, cost and period must be a multiple of ``quantum``;
    ``horizon`` defaults to the hyperperiod.  Ties go to the lower task id.
    """
    if ts.processors != 1:
        raise ValueError("the slot oracle is uniprocessor only")
    if priority != "edf":
        raise ValueError("only EDF priority is supported")
    q = as_rat(quantum)
    if q <= 0:
        raise ValueError("quantum must be positive")
    for t in ts:
        for v in (t.exec_cost, t.period, t.first_release):
            if (v / q).denominator != 1:
                raise ValueError(f"task {t.id}: {v} is not a multiple of the quantum {q}")
    if horizon is None:
        horizon = _hyperperiod(ts)
    h = as_rat(horizon)
    if (h / q).denominator != 1:
        raise ValueError("horizon must be a multiple of the quantum")
    slots = int(h / q)

    # per task: list of [k, release_slot, deadline_slot, remaining_slots]
    pending = {t.id: [] for t in ts}
    next_k = {t.id: 1 for t in ts}
    cost = {t.id: int(t.exec_cost / q) for t in ts}
    done: Dict[Tuple[int, int], Fraction] = {}
    deadlines: Dict[Tuple[int, int], Fraction] = {}
    busy = 0
    for s in range(slots):
        now = s * q
        for t in ts:
            while t.release_of(next_k[t.id]) <= now:
                k = next_k[t.id]
                r = t.release_of(k)
                pending[t.id].append([k, r + t.rel_deadline, cost[t.id]])
                deadlines[(t.id, k)] = r + t.rel_deadline
                next_k[t.id] += 1
        best = None
        for t in ts:
            if pending[t.id]:
                head = pending[t.id][0]
                key = (head[1], t.id)
                if best is None or key < best[0]:
                    best = (key, t.id)
        if best is None:
            continue
        head = pending[best[1]][0]
        head[2] -= 1
        busy += 1
        if head[2] == 0:
            done[(best[1], head[0])] = now + q
            pending[best[1]].pop(0)

    zero = Fraction(0)
    per_max = {t.id: zero for t in ts}
    misses = {t.id: 0 for t in ts}
    first_half = zero
    for key, d in deadlines.items():
        c = done.get(key)
        if c is None:
            if d < h:
                misses[key[0]] += 1
            continue
        if c > d:
            misses[key[0]] += 1
            per_max[key[0]] = max(per_max[key[0]], c - d)
            if 2 * c <= h:
                first_half = max(first_half, c - d)
    return SimStats(h, per_max, misses, max(per_max.values()), first_half, zero, 0,
                    {0: busy * q}, len(done), len(deadlines) - len(done), (), done)


def _hyperperiod(ts: TaskSet) -> Fraction:
    """lcm of the periods; for lowest-terms rationals lcm(a/b, c/d) = lcm(a, c) / gcd(b, d)."""
    num, den = 1, 0
    for t in ts:
        p = t.period
        num = num * p.numerator // gcd(num, p.numerator)
        den = gcd(den, p.denominator)
    return Fraction(num, den)

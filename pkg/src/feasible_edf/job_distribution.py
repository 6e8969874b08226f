"""Pfair windows and the job-to-processor rule for migrating tasks.

A migrating task with workload fractions ``f`` and ``1 - f`` on processors
``P_j`` and ``P_j+1`` is treated as two complementary fictitious Pfair
tasks V (weight ``f``) and W (weight ``1 - f``) whose quantum is one job.
Job ``k`` occupies slot ``s = k - 1``.  The job goes to ``P_j`` when ``s``
is the first slot of some V-window and to ``P_j+1`` otherwise; in the
latter case ``s`` is the last slot of exactly one W-window.

The rule depends on the job number only, so sporadic release delays
("frozen" intervals) do not perturb it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .assignment import Distribution, fraction_on_processor
from .task_model import TaskSet, as_rat

__all__ = [
    "Window",
    "JobMap",
    "check_weight",
    "subtask_release",
    "subtask_deadline",
    "window",
    "windows",
    "lag",
    "is_pfair",
    "is_complementary",
    "complementary_schedule",
    "build_job_map",
    "job_processor",
    "lemma1_bound",
]


def check_weight(w) -> Fraction:
    w = as_rat(w)
    if not 0 < w <= 1:
        raise ValueError(f"weight must lie in (0, 1], got {w}")
    return w


def subtask_release(w, i: int) -> int:
    """Pseudo-release ``floor((i - 1) / w)`` of subtask ``i``."""
    if i < 1:
        raise ValueError("subtask indices start at 1")
    w = check_weight(w)
    return (i - 1) * w.denominator // w.numerator


def subtask_deadline(w, i: int) -> int:
    """Pseudo-deadline ``ceil(i / w)`` of subtask ``i``.

    The ceiling is what makes the weight-3/7 example come out as
    ``w(T_1) = [0, 3)``.
    """
    if i < 1:
        raise ValueError("subtask indices start at 1")
    w = check_weight(w)
    return -(-(i * w.denominator) // w.numerator)


@dataclass(frozen=True)
class Window:
    subtask_index: int
    release_slot: int
    deadline_slot: int

    @property
    def first_slot(self) -> int:
        return self.release_slot

    @property
    def last_slot(self) -> int:
        return self.deadline_slot - 1


def window(w, i: int) -> Window:
    return Window(i, subtask_release(w, i), subtask_deadline(w, i))


def windows(w, count: int) -> Iterator[Window]:
    for i in range(1, count + 1):
        yield window(w, i)


def lag(w, sched: Sequence[bool], t: int) -> Fraction:
    """``w * t`` minus the number of slots in ``[0, t)`` where the task ran."""
    w = check_weight(w)
    if t < 0 or t > len(sched):
        raise ValueError(f"t={t} outside schedule of length {len(sched)}")
    return w * t - sum(1 for s in sched[:t] if s)


def is_pfair(w, sched: Sequence[bool], horizon: int) -> bool:
    """True iff ``-1 < lag < 1`` at every boundary ``t`` in ``[0, horizon]``."""
    w = check_weight(w)
    if horizon > len(sched):
        return False
    allocated = 0
    for t in range(horizon + 1):
        lg = w * t - allocated
        if not -1 < lg < 1:
            return False
        if t < horizon and sched[t]:
            allocated += 1
    return True


def is_complementary(w1, w2) -> bool:
    return as_rat(w1) + as_rat(w2) == 1


def _is_first_slot(x: int, y: int, s: int) -> bool:
    """Slot ``s`` starts a window of weight ``x/y``.

    Some subtask has pseudo-release ``s`` iff an integer ``m`` lies in
    ``[s*x/y, (s+1)*x/y)``, i.e. ``y*ceil(s*x/y) < (s+1)*x``.
    """
    return y * (-(-(s * x) // y)) < (s + 1) * x


def _is_last_slot(x: int, y: int, s: int) -> bool:
    """Slot ``s`` ends a window of weight ``x/y``: ``ceil(h*y/x) - 1 == s`` for some h.

    Equivalently an integer ``h`` with ``s*x/y < h <= (s+1)*x/y``.
    """
    return ((s + 1) * x) // y > (s * x) // y


def complementary_schedule(w, slots: int):
    """First-slot schedule for weight ``w`` and last-slot schedule for ``1 - w``.

    Returns ``(v, u)``, two boolean lists over ``slots`` slots.  For
    ``w == 1`` the complement has weight zero and never runs.
    """
    w = check_weight(w)
    x, y = w.numerator, w.denominator
    v = [_is_first_slot(x, y, s) for s in range(slots)]
    if w == 1:
        return v, [False] * slots
    cx = y - x
    u = [_is_last_slot(cx, y, s) for s in range(slots)]
    return v, u


@dataclass(frozen=True)
class JobMap:
    """Static job routing for one migrating task.

    ``f_first = x / cycle_length`` in lowest terms; the pattern repeats
    every ``cycle_length`` jobs.
    """

    task: int
    first_proc: int
    second_proc: int
    f_first: Fraction
    f_second: Fraction
    cycle_length: int

    def __post_init__(self):
        if self.f_first + self.f_second != 1:
            raise ValueError("job map fractions must sum to one")
        check_weight(self.f_first)
        check_weight(self.f_second)

    def on_first(self, k: int) -> bool:
        return _is_first_slot(self.f_first.numerator, self.f_first.denominator, k - 1)

    def on_second(self, k: int) -> bool:
        return _is_last_slot(self.f_second.numerator, self.f_second.denominator, k - 1)

    def processor(self, k: int) -> int:
        return job_processor(self, k)

    def jobs_on(self, proc: int, first: int, last: int):
        """Job indices in ``[first, last]`` routed to ``proc``."""
        want_first = proc == self.first_proc
        if not want_first and proc != self.second_proc:
            return []
        return [k for k in range(first, last + 1) if self.on_first(k) == want_first]


def build_job_map(d: Distribution, ts: TaskSet, task: int) -> JobMap:
    procs = d.task_procs.get(task, ())
    if len(procs) != 2:
        raise ValueError(f"task {task} is not migrating")
    if task >= len(ts):
        raise ValueError(f"unknown task {task}")
    first, second = procs
    f1 = fraction_on_processor(d, task, first)
    f2 = fraction_on_processor(d, task, second)
    return JobMap(task, first, second, f1, f2, f1.denominator)


def job_processor(jm: JobMap, k: int) -> int:
    if k < 1:
        raise ValueError("job indices start at 1")
    return jm.first_proc if jm.on_first(k) else jm.second_proc


def lemma1_bound(l: int, f) -> int:
    """``ceil(l * f)``: most jobs out of ``l`` consecutive ones on a processor."""
    if l < 0:
        raise ValueError("l must be non-negative")
    f = as_rat(f)
    return -(-(l * f.numerator) // f.denominator)

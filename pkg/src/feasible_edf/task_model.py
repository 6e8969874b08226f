"""Task model: exact rational time, tasks, task sets and jobs.

All time and utilization quantities are :class:`fractions.Fraction` values
(aliased as ``Rat``).  Nothing in this package ever rounds.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

Rat = Fraction
RatLike = Union[Fraction, int, str]

__all__ = [
    "Rat",
    "as_rat",
    "format_rat",
    "ReleaseModel",
    "Task",
    "TaskSet",
    "Job",
    "utilization",
    "total_utilization",
    "is_light",
    "job_tardiness",
    "parse_taskset",
    "load_taskset",
    "dump_taskset",
    "save_taskset",
]


def as_rat(value: RatLike) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Strings are accepted as integers, ``num/den`` or finite decimals
    (``"2.5"`` is exactly 5/2).  Floats are rejected: they would smuggle
    binary rounding into exact arithmetic.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_rat(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class ReleaseModel(enum.Enum):
    PERIODIC = "periodic"
    SPORADIC = "sporadic"


@dataclass(frozen=True)
class Task:
    """A recurrent task ``T_i(e_i, p_i)`` with an implicit deadline.

    ``jitter`` is stored for completeness; no algorithm here reads it.
    """

    id: int
    exec_cost: Fraction
    period: Fraction
    rel_deadline: Fraction = None  # type: ignore[assignment]
    jitter: Fraction = Fraction(0)
    release_model: ReleaseModel = ReleaseModel.PERIODIC
    first_release: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("exec_cost", "period", "jitter", "first_release"):
            object.__setattr__(self, name, as_rat(getattr(self, name)))
        if self.rel_deadline is None:
            object.__setattr__(self, "rel_deadline", self.period)
        else:
            object.__setattr__(self, "rel_deadline", as_rat(self.rel_deadline))
        if self.id < 0:
            raise ValueError(f"task id must be non-negative, got {self.id}")
        if not 0 < self.exec_cost <= self.period:
            raise ValueError(
                f"task {self.id}: need 0 < exec_cost <= period, got "
                f"{self.exec_cost} / {self.period}")
        if self.rel_deadline != self.period:
            raise ValueError(f"task {self.id}: only implicit deadlines are supported")
        if self.jitter < 0:
            raise ValueError(f"task {self.id}: jitter must be >= 0")
        if self.first_release < 0:
            raise ValueError(f"task {self.id}: first release must be >= 0")
        # cached: read in every inner loop of assignment and generation
        object.__setattr__(self, "_u", self.exec_cost / self.period)

    @property
    def utilization(self) -> Fraction:
        return self._u

    @property
    def sporadic(self) -> bool:
        return self.release_model is ReleaseModel.SPORADIC

    def release_of(self, k: int) -> Fraction:
        """Release time of job ``k`` (1-based) under strictly periodic arrivals."""
        if k < 1:
            raise ValueError("job indices start at 1")
        return self.first_release + (k - 1) * self.period

    def job(self, k: int, release: Fraction | None = None) -> "Job":
        r = self.release_of(k) if release is None else as_rat(release)
        return Job(self.id, k, r, r + self.rel_deadline, self.exec_cost)

    def jobs(self, until: Fraction) -> Iterator["Job"]:
        """Periodic jobs released strictly before ``until``."""
        k = 1
        while True:
            r = self.release_of(k)
            if r >= until:
                return
            yield Job(self.id, k, r, r + self.rel_deadline, self.exec_cost)
            k += 1

    def __repr__(self):
        return f"T{self.id}({format_rat(self.exec_cost)}, {format_rat(self.period)})"


@dataclass(frozen=True)
class TaskSet:
    tasks: tuple
    processors: int = 1

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if not self.tasks:
            raise ValueError("a task set needs at least one task")
        if self.processors < 1:
            raise ValueError("need at least one processor")
        ids = [t.id for t in self.tasks]
        if sorted(ids) != list(range(len(ids))):
            raise ValueError(f"task ids must be unique and dense 0..n-1, got {ids}")
        # positional lookup by id
        object.__setattr__(self, "tasks", tuple(sorted(self.tasks, key=lambda t: t.id)))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[RatLike]], processors: int = 1) -> "TaskSet":
        """Build from ``(exec_cost, period)`` pairs; ids follow input order."""
        return cls(tuple(Task(i, as_rat(e), as_rat(p)) for i, (e, p) in enumerate(pairs)),
                   processors)

    def __len__(self):
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)

    def __getitem__(self, task_id: int) -> Task:
        return self.tasks[task_id]

    @cached_property
    def total_utilization(self) -> Fraction:
        return sum((t.utilization for t in self.tasks), Fraction(0))

    @cached_property
    def u_max(self) -> Fraction:
        return max(t.utilization for t in self.tasks)

    def with_processors(self, m: int) -> "TaskSet":
        return TaskSet(self.tasks, m)

    def replace(self, task: Task) -> "TaskSet":
        tasks = list(self.tasks)
        tasks[task.id] = task
        return TaskSet(tuple(tasks), self.processors)


@dataclass
class Job:
    """Job ``k`` of a task; ``remaining`` is the residual execution."""

    task: int
    index: int
    release: Fraction
    abs_deadline: Fraction
    remaining: Fraction
    completion: Fraction | None = field(default=None, compare=False)

    @property
    def tardiness(self) -> Fraction | None:
        if self.completion is None:
            return None
        return job_tardiness(self.completion, self.abs_deadline)


def utilization(task: Task) -> Fraction:
    return task.exec_cost / task.period


def total_utilization(ts: TaskSet) -> Fraction:
    return ts.total_utilization


_HALF = Fraction(1, 2)


def is_light(task: Task) -> bool:
    return task.utilization <= _HALF


def job_tardiness(completion: RatLike, abs_deadline: RatLike) -> Fraction:
    return max(Fraction(0), as_rat(completion) - as_rat(abs_deadline))


# -- task-set files ---------------------------------------------------------
#
#   M=4
#   # id exec_cost period [sporadic]
#   0 2 5
#   1 7/20 1 sporadic

def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_taskset(text: str) -> TaskSet:
    processors = None
    tasks = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.upper().startswith("M="):
            if processors is not None:
                raise ValueError(f"line {lineno}: duplicate M= header")
            processors = int(line[2:])
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise ValueError(f"line {lineno}: expected 'id exec_cost period [sporadic]'")
        model = ReleaseModel.PERIODIC
        if len(parts) == 4:
            if parts[3].lower() != "sporadic":
                raise ValueError(f"line {lineno}: unknown release model {parts[3]!r}")
            model = ReleaseModel.SPORADIC
        tasks.append(Task(int(parts[0]), as_rat(parts[1]), as_rat(parts[2]),
                          release_model=model))
    if processors is None:
        raise ValueError("missing M=<processors> header")
    return TaskSet(tuple(tasks), processors)


def dump_taskset(ts: TaskSet) -> str:
    lines = [f"M={ts.processors}"]
    for t in ts:
        line = f"{t.id} {format_rat(t.exec_cost)} {format_rat(t.period)}"
        if t.sporadic:
            line += " sporadic"
        lines.append(line)
    return "\n".join(lines) + "\n"


def load_taskset(path: str | os.PathLike) -> TaskSet:
    with open(path) as fh:
        return parse_taskset(fh.read())


def save_taskset(ts: TaskSet, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(dump_taskset(ts))

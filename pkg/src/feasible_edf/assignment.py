"""Distribution phase: mapping tasks onto one or two processors with shares.

Processors are filled in index order.  A task that fits in the remaining
capacity of the current processor becomes *fixed* there; otherwise it is
split into a share equal to the remaining capacity and a share for the rest
of its utilization on the next processor, and becomes *migrating*.  This
keeps every task on at most two (consecutive) processors, puts at most two
migrating tasks on a processor and never overfills one.

Heuristics decide the order in which tasks are considered and, for LUF and
LEF, which unassigned task is picked when a split is unavoidable.
"""

from __future__ import annotations

import bisect
import enum
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .schedulability import feasible_edf_admissible
from .task_model import TaskSet, as_rat, format_rat

__all__ = [
    "Share",
    "Distribution",
    "Heuristic",
    "AssignmentError",
    "assign_tasks",
    "assign_non_light",
    "fraction_on_processor",
    "validate_distribution",
    "parse_distribution",
    "dump_distribution",
    "load_distribution",
    "save_distribution",
]


class AssignmentError(Exception):
    """The heuristic could not produce a valid distribution."""


@dataclass(frozen=True)
class Share:
    task: int
    processor: int
    value: Fraction


@dataclass(frozen=True)
class Distribution:
    """Result of the distribution phase.

    ``fixed[j]`` and ``migrating[j]`` list the fixed and migrating tasks on
    processor ``j``; ``task_procs[i]`` is the one or two processors of task
    ``i`` in increasing order.
    """

    shares: Tuple[Share, ...]
    processors: int
    fixed: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    migrating: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    task_procs: Dict[int, Tuple[int, ...]] = field(default_factory=dict)

    @classmethod
    def from_shares(cls, shares, processors: int) -> "Distribution":
        shares = tuple(shares)
        by_task: Dict[int, List[int]] = {}
        for s in shares:
            by_task.setdefault(s.task, []).append(s.processor)
        task_procs = {t: tuple(sorted(ps)) for t, ps in sorted(by_task.items())}
        fixed: Dict[int, List[int]] = {j: [] for j in range(processors)}
        migrating: Dict[int, List[int]] = {j: [] for j in range(processors)}
        for t, ps in task_procs.items():
            target = fixed if len(ps) == 1 else migrating
            for p in ps:
                target.setdefault(p, []).append(t)
        return cls(shares, processors,
                   {j: tuple(v) for j, v in fixed.items()},
                   {j: tuple(v) for j, v in migrating.items()},
                   task_procs)

    def share(self, task: int, proc: int) -> Fraction:
        for s in self.shares:
            if s.task == task and s.processor == proc:
                return s.value
        raise KeyError((task, proc))

    def is_migrating(self, task: int) -> bool:
        return len(self.task_procs.get(task, ())) == 2

    @property
    def migrating_tasks(self) -> List[int]:
        return [t for t, ps in self.task_procs.items() if len(ps) == 2]

    def processor_load(self, proc: int) -> Fraction:
        return sum((s.value for s in self.shares if s.processor == proc), Fraction(0))

    def tasks_on(self, proc: int) -> Tuple[int, ...]:
        return tuple(sorted(self.fixed.get(proc, ()) + self.migrating.get(proc, ())))


class Heuristic(enum.Enum):
    SEQUENTIAL = "seq"
    HUF = "huf"
    LUF = "luf"
    LEF = "lef"
    RANDOM = "random"

    @classmethod
    def parse(cls, name: str) -> "Heuristic":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown heuristic {name!r}; expected one of "
                             f"{', '.join(h.value for h in cls)}") from None


def _by_decreasing_utilization(ts: TaskSet) -> List[int]:
    return sorted(range(len(ts)), key=lambda i: (-ts[i].utilization, i))


class _Filler:
    """Sequential processor filling shared by all heuristics."""

    def __init__(self, processors: int, non_light: bool):
        self.processors = processors
        self.non_light = non_light
        self.proc = 0
        self.cap = Fraction(1)
        self.shares: List[Share] = []
        # utilization of the migrating task entering each processor from the left
        self.incoming_util: Dict[int, Fraction] = {}

    def _advance(self):
        self.proc += 1
        self.cap = Fraction(1)

    def place_fixed(self, task: int, u: Fraction):
        if self.proc >= self.processors:
            raise AssignmentError(f"ran out of processors placing task {task}")
        self.shares.append(Share(task, self.proc, u))
        self.cap -= u
        if self.cap == 0:
            self._advance()

    def place_split(self, task: int, u: Fraction):
        j = self.proc
        if j + 1 >= self.processors:
            raise AssignmentError(f"task {task} needs processor {j + 1} of {self.processors}")
        first, second = self.cap, u - self.cap
        if self.non_light and j in self.incoming_util and self.incoming_util[j] + u > 1:
            raise AssignmentError(
                f"migrating tasks on processor {j} have combined utilization "
                f"{format_rat(self.incoming_util[j] + u)} > 1")
        self.shares.append(Share(task, j, first))
        self.shares.append(Share(task, j + 1, second))
        self.incoming_util[j + 1] = u
        self.proc = j + 1
        self.cap = 1 - second
        if self.cap == 0:
            self._advance()

    def place(self, task: int, u: Fraction):
        if self.proc >= self.processors:
            raise AssignmentError(f"ran out of processors placing task {task}")
        if u <= self.cap:
            self.place_fixed(task, u)
        else:
            self.place_split(task, u)


def _fill_in_order(ts: TaskSet, order: Sequence[int], filler: _Filler):
    for i in order:
        filler.place(i, ts[i].utilization)


def _fill_with_selection(ts: TaskSet, filler: _Filler, by_cost: bool):
    """LUF / LEF: fixed tasks by decreasing utilization, chosen migrating task.

    ``pool`` holds the unassigned tasks sorted by increasing utilization, so
    the LUF reverse scan ("first task whose utilization is at least the
    available capacity") is a binary search.
    """
    pool = sorted(range(len(ts)), key=lambda i: (ts[i].utilization, -i))
    keys = [ts[i].utilization for i in pool]
    while pool:
        # next fixed candidate: highest utilization, lowest id among ties (the
        # ``-i`` in the sort key puts it last)
        top_u = keys[-1]
        if top_u <= filler.cap:
            filler.place_fixed(pool.pop(), keys.pop())
            continue
        start = bisect.bisect_left(keys, filler.cap)
        if by_cost:
            pos = min(range(start, len(pool)),
                      key=lambda k: (ts[pool[k]].exec_cost, pool[k]))
        else:
            end = bisect.bisect_right(keys, keys[start])
            pos = min(range(start, end), key=lambda k: pool[k])
        task = pool[pos]
        u = keys[pos]
        del pool[pos], keys[pos]
        filler.place(task, u)


def _distribute(ts: TaskSet, h: Heuristic, seed: int | None, non_light: bool) -> Distribution:
    filler = _Filler(ts.processors, non_light)
    if h is Heuristic.SEQUENTIAL:
        _fill_in_order(ts, range(len(ts)), filler)
    elif h is Heuristic.HUF:
        _fill_in_order(ts, _by_decreasing_utilization(ts), filler)
    elif h is Heuristic.RANDOM:
        order = list(range(len(ts)))
        random.Random(0 if seed is None else seed).shuffle(order)
        _fill_in_order(ts, order, filler)
    elif h is Heuristic.LUF:
        _fill_with_selection(ts, filler, by_cost=False)
    elif h is Heuristic.LEF:
        _fill_with_selection(ts, filler, by_cost=True)
    else:  # pragma: no cover
        raise ValueError(h)
    return Distribution.from_shares(filler.shares, ts.processors)


def assign_tasks(ts: TaskSet, h: Heuristic = Heuristic.SEQUENTIAL,
                 seed: int | None = None) -> Distribution:
    """Assign-Tasks for light task sets with ``U_sum <= M``.

    ``seed`` only matters for :attr:`Heuristic.RANDOM`.
    """
    if not feasible_edf_admissible(ts):
        raise ValueError("task set is not admissible: need u_max <= 1/2 and U_sum <= M")
    return _distribute(ts, h, seed, non_light=False)


def assign_non_light(ts: TaskSet, h: Heuristic = Heuristic.LUF,
                     seed: int | None = None) -> Distribution:
    """Like :func:`assign_tasks`, allowing tasks heavier than 1/2.

    Raises :class:`AssignmentError` when the two migrating tasks on some
    processor would have combined utilization above one.
    """
    if ts.total_utilization > ts.processors:
        raise ValueError("total utilization exceeds the processor count")
    if any(t.utilization > 1 for t in ts):
        raise ValueError("task utilization above 1")
    return _distribute(ts, h, seed, non_light=True)


def fraction_on_processor(d: Distribution, task: int, proc: int) -> Fraction:
    """``s_ij / u_i``: the part of the task's workload handled by ``proc``."""
    shares = [s.value for s in d.shares if s.task == task]
    mine = [s.value for s in d.shares if s.task == task and s.processor == proc]
    if not mine:
        raise KeyError(f"task {task} has no share on processor {proc}")
    return mine[0] / sum(shares, Fraction(0))


def validate_distribution(ts: TaskSet, d: Distribution) -> List[str]:
    """Return a list of human-readable violations (empty when valid)."""
    out: List[str] = []
    per_task: Dict[int, List[Share]] = {}
    for s in d.shares:
        if not 0 <= s.processor < ts.processors:
            out.append(f"share of task {s.task} on unknown processor {s.processor}")
        if not 0 <= s.task < len(ts):
            out.append(f"share for unknown task {s.task}")
            continue
        v = s.value
        if v.numerator <= 0:
            out.append(f"non-positive share {s.value} for task {s.task} on P{s.processor}")
        if v.numerator > v.denominator:
            out.append(f"share {s.value} above 1 for task {s.task}")
        per_task.setdefault(s.task, []).append(s)
    for t in ts:
        shares = per_task.get(t.id, [])
        procs = [s.processor for s in shares]
        if len(procs) > 1:
            procs.sort()
        if not shares:
            out.append(f"P1: task {t.id} is not assigned")
            continue
        if len(procs) > 2 or len(set(procs)) != len(procs):
            out.append(f"P1: task {t.id} has shares on processors {procs}")
        total = shares[0].value
        if len(shares) > 1:
            total = sum((s.value for s in shares), Fraction(0))
        if total != t.utilization:
            out.append(f"P1: shares of task {t.id} sum to {format_rat(total)}, "
                       f"utilization is {format_rat(t.utilization)}")
        if len(procs) == 2 and procs[1] != procs[0] + 1:
            out.append(f"task {t.id} migrates between non-consecutive processors {procs}")
    loads = [Fraction(0)] * ts.processors
    mig_on: Dict[int, List[int]] = {}
    for s in d.shares:
        if 0 <= s.processor < ts.processors:
            loads[s.processor] += s.value
    for t, ss in per_task.items():
        if len(ss) == 2:
            for s in ss:
                mig_on.setdefault(s.processor, []).append(t)
    for j in range(ts.processors):
        migrating = mig_on.get(j, [])
        if len(migrating) > 2:
            out.append(f"P2: processor {j} hosts {len(migrating)} migrating tasks {migrating}")
        if loads[j] > 1:
            out.append(f"P3: share sum {format_rat(loads[j])} on processor {j} exceeds 1")
    return out


# -- distribution files: one share per line
#   task proc share fixed|migrating

def dump_distribution(d: Distribution) -> str:
    lines = [f"M={d.processors}"]
    for s in sorted(d.shares, key=lambda s: (s.task, s.processor)):
        kind = "migrating" if d.is_migrating(s.task) else "fixed"
        lines.append(f"{s.task} {s.processor} {format_rat(s.value)} {kind}")
    return "\n".join(lines) + "\n"


def parse_distribution(text: str, processors: int | None = None) -> Distribution:
    shares = []
    kinds = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.upper().startswith("M="):
            processors = int(line[2:])
            continue
        parts = line.split()
        if len(parts) != 4 or parts[3] not in ("fixed", "migrating"):
            raise ValueError(f"line {lineno}: expected 'task proc share fixed|migrating'")
        task, proc = int(parts[0]), int(parts[1])
        shares.append(Share(task, proc, as_rat(parts[2])))
        kinds.setdefault(task, set()).add(parts[3])
    if processors is None:
        processors = 1 + max((s.processor for s in shares), default=0)
    d = Distribution.from_shares(shares, processors)
    for task, ks in kinds.items():
        expected = "migrating" if d.is_migrating(task) else "fixed"
        if ks != {expected}:
            raise ValueError(f"task {task} is labelled {sorted(ks)} but has "
                             f"{len(d.task_procs[task])} share(s)")
    return d


def load_distribution(path: str | os.PathLike) -> Distribution:
    with open(path) as fh:
        return parse_distribution(fh.read())


def save_distribution(d: Distribution, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(dump_distribution(d))

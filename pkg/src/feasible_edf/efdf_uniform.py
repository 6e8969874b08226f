"""One dispatch decision of EFDF on a uniform multiprocessor.

Nodes are indexed fastest first.  At a decision point the ready tasks are
split into those that can still finish by their deadline on the fastest
node (set A) and the rest (set B).  Nodes ``1..min(k, m)`` first keep the
A-task that last ran on them if it is among the ``min(k, m)`` earliest
deadlines of A, then take the earliest remaining A-tasks; leftover nodes
optionally get the earliest-deadline tasks of B.

Node ids are 0-based here (node 0 is the fastest).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .task_model import as_rat

__all__ = [
    "UniformPlatform",
    "ReadyTask",
    "DispatchState",
    "partition_feasible",
    "dispatch",
    "parse_dispatch_state",
    "load_dispatch_state",
    "format_dispatch",
]


@dataclass(frozen=True)
class UniformPlatform:
    speeds: Tuple[Fraction, ...]

    def __post_init__(self):
        speeds = tuple(as_rat(s) for s in self.speeds)
        if not speeds:
            raise ValueError("platform needs at least one node")
        if any(s <= 0 for s in speeds):
            raise ValueError("speeds must be positive")
        if any(a < b for a, b in zip(speeds, speeds[1:])):
            raise ValueError("speeds must be non-increasing")
        object.__setattr__(self, "speeds", speeds)

    @property
    def m(self) -> int:
        return len(self.speeds)


@dataclass(frozen=True)
class ReadyTask:
    task: int
    abs_deadline: Fraction
    remaining: Fraction
    last_node: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "abs_deadline", as_rat(self.abs_deadline))
        object.__setattr__(self, "remaining", as_rat(self.remaining))
        if self.remaining <= 0:
            raise ValueError(f"task {self.task}: remaining work must be positive")


@dataclass(frozen=True)
class DispatchState:
    ready: Tuple[ReadyTask, ...]

    def __post_init__(self):
        object.__setattr__(self, "ready", tuple(self.ready))
        ids = [r.task for r in self.ready]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate task in dispatch state")


def _by_deadline(tasks: Sequence[ReadyTask]) -> List[ReadyTask]:
    return sorted(tasks, key=lambda r: (r.abs_deadline, r.task))


def partition_feasible(state: DispatchState, now, platform: UniformPlatform):
    """Split into (A, B), each sorted by deadline then task id."""
    now = as_rat(now)
    fastest = platform.speeds[0]
    a, b = [], []
    for r in state.ready:
        (a if r.remaining / fastest <= r.abs_deadline - now else b).append(r)
    return _by_deadline(a), _by_deadline(b)


def dispatch(state: DispatchState, now, platform: UniformPlatform,
             fill_from_b: bool = True) -> Dict[int, int]:
    """Return ``{node: task}`` for this decision point."""
    a, b = partition_feasible(state, now, platform)
    m = platform.m
    k = len(a)
    top = a[:min(k, m)]
    out: Dict[int, int] = {}
    taken = set()
    # affinity first
    for r in top:
        j = r.last_node
        if j is not None and 0 <= j < min(k, m) and j not in out:
            out[j] = r.task
            taken.add(r.task)
    rest = [r for r in a if r.task not in taken]
    for j in range(min(k, m)):
        if j not in out and rest:
            r = rest.pop(0)
            out[j] = r.task
            taken.add(r.task)
    if fill_from_b and k < m:
        for j, r in zip(range(k, m), b):
            out[j] = r.task
    return dict(sorted(out.items()))


def parse_dispatch_state(text: str) -> DispatchState:
    """Lines ``task abs_deadline remaining [last_node]``."""
    ready = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise ValueError(f"line {lineno}: expected 'task deadline remaining [last_node]'")
        last = None
        if len(parts) == 4 and parts[3] not in ("-", "none"):
            last = int(parts[3])
        ready.append(ReadyTask(int(parts[0]), as_rat(parts[1]), as_rat(parts[2]), last))
    return DispatchState(tuple(ready))


def load_dispatch_state(path: str | os.PathLike) -> DispatchState:
    with open(path) as fh:
        return parse_dispatch_state(fh.read())


def format_dispatch(assignment: Dict[int, int]) -> str:
    return "".join(f"node {j} -> task {t}\n" for j, t in assignment.items())

"""Execution phase of Feasible EDF.

Each processor runs its own preemptive scheduler with two priority classes:
ready jobs of migrating tasks always beat ready jobs of fixed tasks, and
within a class the earliest absolute deadline wins (ties: lower task id,
then lower job index).  Jobs of a migrating task are routed to one of its
two processors by the task's :class:`~feasible_edf.job_distribution.JobMap`.
A job cannot start before its predecessor of the same task has completed,
even when the predecessor ran on the other processor.

:func:`simulate` picks between two exact implementations:

* the reference engine below, a global event loop over exact rationals
  that records the full segment trace;
* the decoupled per-processor kernels in :mod:`.fast`, used when no trace
  is requested.  They give bit-identical statistics and fall back to the
  reference engine whenever cross-processor precedence could have mattered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from ..assignment import Distribution, validate_distribution
from ..job_distribution import JobMap, build_job_map
from ..task_model import Task, TaskSet, as_rat, format_rat
from .slicing import slice_tasks

__all__ = [
    "SimConfig",
    "Segment",
    "SimTrace",
    "SimStats",
    "SimulationError",
    "simulate",
    "simulate_reference",
    "prepare",
    "max_tardiness_converged",
    "parse_release_trace",
    "load_release_trace",
    "dump_trace",
]

MIGRATING, FIXED = 0, 1


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters.

    ``slice_range`` enables period transformation of migrating tasks with
    sub-job costs targeted at ``[lo, hi)``.  ``release_trace`` maps a task id
    to its explicit release times (sporadic arrivals).  ``migrating_order``
    ``"static"`` orders the migrating class by task id instead of EDF; it
    exists for comparison only.  ``job_router`` overrides the job maps
    (``(task, k) -> processor``) and is meant for tests.
    """

    horizon: Fraction
    slice_range: Optional[Tuple[Fraction, Fraction]] = None
    release_trace: Optional[Mapping[int, Sequence[Fraction]]] = None
    migrating_order: str = "edf"
    record_trace: bool = True
    job_router: Optional[Callable[[int, int], int]] = None
    engine: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "horizon", as_rat(self.horizon))
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.slice_range is not None:
            lo, hi = (as_rat(b) for b in self.slice_range)
            if lo <= 0 or hi <= lo:
                raise ValueError("slice range must satisfy 0 < lo < hi")
            object.__setattr__(self, "slice_range", (lo, hi))
        if self.migrating_order not in ("edf", "static"):
            raise ValueError("migrating_order is 'edf' or 'static'")
        if self.engine not in ("auto", "reference", "fast"):
            raise ValueError("engine is 'auto', 'reference' or 'fast'")


@dataclass(frozen=True)
class Segment:
    processor: int
    task: int
    job: int
    start: Fraction
    end: Fraction


@dataclass
class SimTrace:
    segments: List[Segment] = field(default_factory=list)
    completions: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)


@dataclass
class SimStats:
    """Outcome of one simulation.

    Tardiness figures cover completed jobs.  ``misses`` also counts jobs
    still unfinished at the horizon whose deadline had already passed.
    ``first_half_max_tardiness`` is the maximum over jobs completed by
    ``horizon / 2``.
    """

    horizon: Fraction
    per_task_max_tardiness: Dict[int, Fraction]
    per_task_misses: Dict[int, int]
    max_tardiness: Fraction
    first_half_max_tardiness: Fraction
    migrating_max_tardiness: Fraction
    migrations: int
    busy: Dict[int, Fraction]
    completed_jobs: int
    unfinished_jobs: int
    migrating_tasks: Tuple[int, ...] = ()
    completions: Optional[Dict[Tuple[int, int], Fraction]] = None

    @property
    def total_misses(self) -> int:
        return sum(self.per_task_misses.values())

    def as_dict(self) -> Dict[str, str]:
        return {
            "horizon": format_rat(self.horizon),
            "max_tardiness": format_rat(self.max_tardiness),
            "first_half_max_tardiness": format_rat(self.first_half_max_tardiness),
            "migrating_max_tardiness": format_rat(self.migrating_max_tardiness),
            "misses": str(self.total_misses),
            "migrations": str(self.migrations),
            "completed_jobs": str(self.completed_jobs),
            "unfinished_jobs": str(self.unfinished_jobs),
        }


def max_tardiness_converged(stats: SimStats) -> bool:
    """True iff nothing completing after ``H/2`` beat the earlier maximum."""
    return stats.first_half_max_tardiness == stats.max_tardiness


# -- preparation shared by both engines ----------------------------------------

@dataclass
class Prepared:
    ts: TaskSet
    dist: Distribution
    cfg: SimConfig
    traced: Dict[int, List[Fraction]]
    job_maps: Dict[int, JobMap]
    slice_factors: Dict[int, int]

    def releases(self, task: int) -> List[Fraction]:
        """Release times (before the horizon) of every job of ``task``."""
        if task in self.traced:
            return self.traced[task]
        return list(_periodic(self.ts[task], self.cfg.horizon))

    def router(self) -> Callable[[int, int], int]:
        if self.cfg.job_router is not None:
            return self.cfg.job_router
        procs = self.dist.task_procs
        maps = self.job_maps

        def route(task: int, k: int) -> int:
            jm = maps.get(task)
            if jm is None:
                return procs[task][0]
            return jm.processor(k)
        return route


def _check_trace(task: Task, times: Sequence[Fraction]) -> List[Fraction]:
    times = [as_rat(t) for t in times]
    for a, b in zip(times, times[1:]):
        if b - a < task.period:
            raise SimulationError(
                f"task {task.id}: releases {format_rat(a)} and {format_rat(b)} are closer "
                f"than the period {format_rat(task.period)}")
    if times and times[0] < 0:
        raise SimulationError(f"task {task.id}: negative release time")
    return times


def _traced_releases(ts: TaskSet, cfg: SimConfig, factors: Dict[int, int],
                     original: TaskSet) -> Dict[int, List[Fraction]]:
    """Explicit release traces, expanded into sub-job releases for sliced tasks."""
    out = {}
    h = cfg.horizon
    for task_id, times in (cfg.release_trace or {}).items():
        logical = _check_trace(original[task_id], times)
        q = factors.get(task_id, 1)
        period = ts[task_id].period
        rel = [r + m * period for r in logical for m in range(q)]
        out[task_id] = [r for r in rel if r < h]
    return out


def _periodic(t: Task, h: Fraction):
    r = t.first_release
    while r < h:
        yield r
        r += t.period


def prepare(ts: TaskSet, d: Distribution, cfg: SimConfig) -> Prepared:
    problems = validate_distribution(ts, d)
    if problems:
        raise SimulationError("invalid distribution: " + "; ".join(problems))
    for j in range(d.processors):
        mig = d.migrating.get(j, ())
        if len(mig) == 2 and sum(ts[i].utilization for i in mig) > 1:
            raise SimulationError(f"migrating tasks {mig} on processor {j} exceed utilization 1")
    for task_id in (cfg.release_trace or {}):
        if not 0 <= task_id < len(ts):
            raise SimulationError(f"release trace for unknown task {task_id}")
    sim_ts, factors = ts, {}
    if cfg.slice_range is not None:
        sim_ts, factors = slice_tasks(ts, d.migrating_tasks, cfg.slice_range)
    traced = _traced_releases(sim_ts, cfg, factors, ts)
    maps = {i: build_job_map(d, sim_ts, i) for i in d.migrating_tasks}
    return Prepared(sim_ts, d, cfg, traced, maps, factors)


# -- statistics ----------------------------------------------------------------

def _collect_stats(prep: Prepared, jobs, busy: Dict[int, Fraction],
                   keep_completions: bool) -> SimStats:
    """``jobs`` yields ``(task, k, proc, deadline, completion_or_None)``."""
    h = prep.cfg.horizon
    half = h / 2
    zero = Fraction(0)
    per_max = {t.id: zero for t in prep.ts}
    misses = {t.id: 0 for t in prep.ts}
    first_half = zero
    completed = unfinished = 0
    completions = {} if keep_completions else None
    last_proc: Dict[int, Tuple[int, int]] = {}
    migrations = 0
    migrating = set(prep.dist.migrating_tasks)
    for task, k, proc, deadline, done in sorted(jobs, key=lambda j: (j[0], j[1])):
        if task in migrating:
            prev = last_proc.get(task)
            if prev is not None and prev[0] == k - 1 and prev[1] != proc:
                migrations += 1
            last_proc[task] = (k, proc)
        if done is None:
            unfinished += 1
            if deadline < h:
                misses[task] += 1
            continue
        completed += 1
        if completions is not None:
            completions[(task, k)] = done
        if done > deadline:
            misses[task] += 1
            tard = done - deadline
            if tard > per_max[task]:
                per_max[task] = tard
            if done <= half and tard > first_half:
                first_half = tard
    overall = max(per_max.values(), default=zero)
    mig_max = max((per_max[i] for i in migrating), default=zero)
    return SimStats(h, per_max, misses, overall, first_half, mig_max, migrations,
                    busy, completed, unfinished, tuple(sorted(migrating)), completions)


# -- reference engine ----------------------------------------------------------

class _Job:
    __slots__ = ("task", "k", "proc", "release", "deadline", "remaining", "done", "cls")

    def __init__(self, task, k, proc, release, deadline, remaining, cls):
        self.task = task
        self.k = k
        self.proc = proc
        self.release = release
        self.deadline = deadline
        self.remaining = remaining
        self.done = None
        self.cls = cls


def simulate_reference(prep: Prepared) -> Tuple[SimTrace, SimStats]:
    ts, cfg, dist = prep.ts, prep.cfg, prep.dist
    route = prep.router()
    h = cfg.horizon
    migrating = set(dist.migrating_tasks)
    static = cfg.migrating_order == "static"

    all_jobs: List[_Job] = []
    for t in ts:
        cls = MIGRATING if t.id in migrating else FIXED
        for k, r in enumerate(prep.releases(t.id), 1):
            proc = route(t.id, k)
            if proc not in dist.task_procs[t.id]:
                raise SimulationError(f"job {k} of task {t.id} routed to processor {proc}, "
                                      f"task is assigned to {dist.task_procs[t.id]}")
            all_jobs.append(_Job(t.id, k, proc, r, r + t.rel_deadline, t.exec_cost, cls))
    all_jobs.sort(key=lambda j: (j.release, j.task, j.k))
    by_task: Dict[Tuple[int, int], _Job] = {(j.task, j.k): j for j in all_jobs}

    def key(j: _Job):
        if static and j.cls == MIGRATING:
            return (j.cls, 0, j.task, j.k)
        return (j.cls, j.deadline, j.task, j.k)

    def eligible(j: _Job) -> bool:
        prev = by_task.get((j.task, j.k - 1))
        return prev is None or prev.done is not None

    ready: Dict[int, List[_Job]] = {p: [] for p in range(dist.processors)}
    busy = {p: Fraction(0) for p in range(dist.processors)}
    trace = SimTrace()
    open_seg: Dict[int, List] = {}
    t = Fraction(0)
    nxt = 0
    n = len(all_jobs)
    while t < h:
        while nxt < n and all_jobs[nxt].release <= t:
            j = all_jobs[nxt]
            ready[j.proc].append(j)
            nxt += 1
        running: Dict[int, _Job] = {}
        for p, jobs in ready.items():
            cands = [j for j in jobs if eligible(j)]
            if cands:
                running[p] = min(cands, key=key)
        next_release = all_jobs[nxt].release if nxt < n else h
        t_next = min(next_release, h)
        for j in running.values():
            if t + j.remaining < t_next:
                t_next = t + j.remaining
        dt = t_next - t
        for p, j in running.items():
            j.remaining -= dt
            busy[p] += dt
            if cfg.record_trace and dt > 0:
                seg = open_seg.get(p)
                if seg is not None and seg[0] is j and seg[2] == t:
                    seg[2] = t_next
                else:
                    if seg is not None:
                        trace.segments.append(Segment(p, seg[0].task, seg[0].k, seg[1], seg[2]))
                    open_seg[p] = [j, t, t_next]
            if j.remaining == 0:
                j.done = t_next
                ready[p].remove(j)
                trace.completions[(j.task, j.k)] = t_next
        t = t_next
        if not running and nxt >= n:
            break
    for p, seg in open_seg.items():
        trace.segments.append(Segment(p, seg[0].task, seg[0].k, seg[1], seg[2]))
    trace.segments.sort(key=lambda s: (s.start, s.processor))
    stats = _collect_stats(
        prep, ((j.task, j.k, j.proc, j.deadline, j.done) for j in all_jobs), busy,
        keep_completions=True)
    return trace, stats


def simulate(ts: TaskSet, d: Distribution, cfg: SimConfig) -> Tuple[SimTrace, SimStats]:
    """Run Feasible EDF on ``ts`` under distribution ``d`` up to ``cfg.horizon``.

    Returns ``(trace, stats)``; the trace is empty when ``cfg.record_trace``
    is false and the fast path was taken.
    """
    prep = prepare(ts, d, cfg)
    use_fast = cfg.engine == "fast" or (
        cfg.engine == "auto" and not cfg.record_trace and cfg.job_router is None)
    if use_fast:
        if cfg.job_router is not None:
            raise SimulationError("the fast engine does not support custom job routers")
        from .fast import simulate_decoupled
        stats = simulate_decoupled(prep)
        if stats is not None:
            return SimTrace(), stats
    return simulate_reference(prep)


# -- files -----------------------------------------------------------------------

def parse_release_trace(text: str) -> Dict[int, List[Fraction]]:
    """One line per task: ``task t1 t2 ...``."""
    out: Dict[int, List[Fraction]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        task = int(parts[0])
        if task in out:
            raise ValueError(f"line {lineno}: duplicate trace for task {task}")
        out[task] = [as_rat(p) for p in parts[1:]]
    return out


def load_release_trace(path) -> Dict[int, List[Fraction]]:
    with open(path) as fh:
        return parse_release_trace(fh.read())


def dump_trace(trace: SimTrace) -> str:
    return "".join(f"{s.processor} {s.task} {s.job} {format_rat(s.start)} {format_rat(s.end)}\n"
                   for s in trace.segments)

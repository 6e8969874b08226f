"""Decoupled per-processor simulation on integer-scaled time.

Every time value on processor ``j`` is a multiple of ``1/L_j`` where
``L_j`` is the lcm of the denominators of the horizon and of the local
tasks' parameters, so multiplying by ``L_j`` makes all arithmetic integral
and still exact.  When the scaled values fit comfortably in 64 bits the
numba kernel runs; otherwise a heap-based pure-Python kernel works on
unbounded Python ints.

Processors interact only through the precedence rule of migrating tasks
(job ``k+1`` waits for job ``k``).  After the independent runs we check
that every migrating job completed no later than its successor's release
on the other processor; then no job was ever blocked and the decoupled
run equals the coupled one.  Otherwise the caller falls back to the
reference engine.
"""

from __future__ import annotations

import heapq
import math
from fractions import Fraction
from typing import Dict, List, Optional

import numba
import numpy as np

from .core import FIXED, MIGRATING, Prepared, SimStats

INT64_SAFE = 1 << 60


@numba.njit(cache=True)
def _kernel_int64(cls, prio, rel, offs, cost, dl, horizon, comp):
    """Linear-scan two-class EDF on one processor; fills ``comp`` (-1 = unfinished).

    ``prio[i]`` is 0 when task ``i`` ignores deadlines inside its class.
    Returns the busy time.
    """
    n = cls.shape[0]
    head = offs[:-1].copy()
    nxt = offs[:-1].copy()
    rem = cost.copy()
    t = 0
    busy = 0
    while t < horizon:
        nr = horizon
        best = -1
        bc = 0
        bd = 0
        for i in range(n):
            end = offs[i + 1]
            p = nxt[i]
            while p < end and rel[p] <= t:
                p += 1
            nxt[i] = p
            if p < end and rel[p] < nr:
                nr = rel[p]
            if head[i] < p:
                c = cls[i]
                d = (rel[head[i]] + dl[i]) * prio[i]
                if best == -1 or c < bc or (c == bc and d < bd):
                    best = i
                    bc = c
                    bd = d
        if best == -1:
            t = nr
            continue
        r = rem[best]
        if t + r <= nr:
            t += r
            busy += r
            comp[head[best]] = t
            head[best] += 1
            rem[best] = cost[best]
        else:
            busy += nr - t
            rem[best] = r - (nr - t)
            t = nr
    return busy


def _kernel_py(cls, prio, rel, offs, cost, dl, horizon, comp):
    """Same schedule as :func:`_kernel_int64`, on Python ints with a heap."""
    n = len(cls)
    events = []
    for i in range(n):
        for p in range(offs[i], offs[i + 1]):
            events.append((rel[p], i, p))
    events.sort()
    ready = []
    rem = {}
    push, pop = heapq.heappush, heapq.heappop
    t = 0
    busy = 0
    e = 0
    ne = len(events)
    while t < horizon:
        while e < ne and events[e][0] <= t:
            r, i, p = events[e]
            push(ready, (cls[i], (r + dl[i]) * prio[i], i, p))
            rem[p] = cost[i]
            e += 1
        nr = events[e][0] if e < ne else horizon
        if nr > horizon:
            nr = horizon
        if not ready:
            t = nr
            continue
        p = ready[0][3]
        r = rem[p]
        if t + r <= nr:
            t += r
            busy += r
            comp[p] = t
            pop(ready)
        else:
            busy += nr - t
            rem[p] = r - (nr - t)
            t = nr
    return busy


def _lcm_dens(values) -> int:
    out = 1
    for v in values:
        d = v.denominator
        out = out * d // math.gcd(out, d)
    return out


def _route_mask(jm, count: int) -> np.ndarray:
    """Boolean array over jobs 1..count, True where the job goes to ``first_proc``."""
    x, y = jm.f_first.numerator, jm.f_first.denominator
    n = min(count, y)
    if n == 0:
        return np.zeros(0, dtype=bool)
    if (n + 1) * (x + y) < INT64_SAFE:
        s = np.arange(n, dtype=np.int64)
        sx = s * x
        cycle = y * (-(-sx // y)) < sx + x
    else:
        cycle = np.fromiter(((y * (-(-(s * x) // y))) < (s + 1) * x for s in range(n)),
                            dtype=bool, count=n)
    if n == count:
        return cycle
    reps = -(-count // n)
    return np.tile(cycle, reps)[:count]


class _TaskJobs:
    """Jobs of one task: global indices, releases (Fractions or None) and routing."""

    def __init__(self, prep: Prepared, task: int):
        t = prep.ts[task]
        h = prep.cfg.horizon
        self.task = t
        self.traced = prep.traced.get(task)
        if self.traced is not None:
            self.count = len(self.traced)
        elif t.first_release < h:
            self.count = math.ceil((h - t.first_release) / t.period)
        else:
            self.count = 0
        jm = prep.job_maps.get(task)
        self.job_map = jm
        self.on_first = _route_mask(jm, self.count) if jm is not None else None

    def local_indices(self, proc: int) -> np.ndarray:
        """0-based job positions (k - 1) routed to ``proc``."""
        if self.job_map is None:
            return np.arange(self.count, dtype=np.int64)
        mask = self.on_first if proc == self.job_map.first_proc else ~self.on_first
        return np.flatnonzero(mask).astype(np.int64)

    def scale_values(self):
        vals = [self.task.first_release, self.task.period, self.task.exec_cost]
        if self.traced:
            vals.extend(self.traced)
        return vals


class _ProcRun:
    def __init__(self, proc, tasks, scale, big, comp, rel, dl, idx, busy):
        self.proc = proc
        self.tasks = tasks          # local task ids
        self.scale = scale
        self.big = big
        self.comp = comp            # per local task: completion array/list
        self.rel = rel              # per local task: scaled releases
        self.dl = dl                # per local task: scaled relative deadline
        self.idx = idx              # per local task: 0-based job positions
        self.busy = busy


def _run_processor(prep: Prepared, proc: int, jobs: Dict[int, _TaskJobs]) -> _ProcRun:
    d = prep.dist
    h = prep.cfg.horizon
    static = prep.cfg.migrating_order == "static"
    local = list(d.tasks_on(proc))
    migrating = set(d.migrating.get(proc, ()))
    vals = [h]
    for i in local:
        vals.extend(jobs[i].scale_values())
    scale = _lcm_dens(vals)
    pmax = max((prep.ts[i].period for i in local), default=Fraction(0))
    hs = h.numerator * (scale // h.denominator)
    big = (2 * h + 2 * pmax + 2) * scale >= INT64_SAFE

    cls, prio, cost, dl, idx, rel = [], [], [], [], [], []
    for i in local:
        t = prep.ts[i]
        tj = jobs[i]
        pos = tj.local_indices(proc)
        idx.append(pos)
        cls.append(MIGRATING if i in migrating else FIXED)
        prio.append(0 if static and i in migrating else 1)
        cost.append(int(t.exec_cost * scale))
        dl.append(int(t.rel_deadline * scale))
        if tj.traced is not None:
            r = [int(tj.traced[k] * scale) for k in pos.tolist()]
            rel.append(np.asarray(r, dtype=object if big else np.int64))
        else:
            first = int(t.first_release * scale)
            per = int(t.period * scale)
            if big:
                rel.append(np.asarray([first + k * per for k in pos.tolist()], dtype=object))
            else:
                rel.append(first + pos * per)

    sizes = [len(r) for r in rel]
    offs = np.zeros(len(local) + 1, dtype=np.int64)
    if local:
        offs[1:] = np.cumsum(sizes)
    total = int(offs[-1])
    if big:
        flat = [v for r in rel for v in r.tolist()]
        comp = [-1] * total
        busy = _kernel_py(cls, prio, flat, offs.tolist(), cost, dl, hs, comp)
        comp_parts = [comp[offs[k]:offs[k + 1]] for k in range(len(local))]
    else:
        flat = np.concatenate(rel) if rel else np.zeros(0, dtype=np.int64)
        comp = np.full(total, -1, dtype=np.int64)
        busy = _kernel_int64(np.asarray(cls, dtype=np.int64), np.asarray(prio, dtype=np.int64),
                             flat.astype(np.int64), offs, np.asarray(cost, dtype=np.int64),
                             np.asarray(dl, dtype=np.int64), np.int64(hs), comp)
        comp_parts = [comp[offs[k]:offs[k + 1]] for k in range(len(local))]
    return _ProcRun(proc, local, scale, big, comp_parts, rel, dl, idx, Fraction(int(busy), scale))


def _precedence_ok(prep: Prepared, runs: List[_ProcRun], jobs: Dict[int, _TaskJobs]) -> bool:
    """Each migrating job finishes by the release of a successor on the other processor."""
    for run in runs:
        for li, task in enumerate(run.tasks):
            tj = jobs[task]
            if tj.job_map is None or tj.count < 2:
                continue
            first_here = run.proc == tj.job_map.first_proc
            pos = run.idx[li]
            if len(pos) == 0:
                continue
            nxt = pos + 1
            inside = nxt < tj.count
            # successor exists and is routed to the other processor
            switch = np.zeros(len(pos), dtype=bool)
            switch[inside] = tj.on_first[nxt[inside]] != first_here
            if not switch.any():
                continue
            sel = np.flatnonzero(switch)
            comp = run.comp[li]
            rel = run.rel[li]
            per = int(tj.task.period * run.scale)
            for s in sel.tolist():
                c = comp[s]
                if tj.traced is not None:
                    succ = int(tj.traced[int(pos[s]) + 1] * run.scale)
                else:
                    succ = rel[s] + per
                if c < 0 or c > succ:
                    return False
    return True


def _stats(prep: Prepared, runs: List[_ProcRun], jobs: Dict[int, _TaskJobs]) -> SimStats:
    h = prep.cfg.horizon
    zero = Fraction(0)
    per_max = {t.id: zero for t in prep.ts}
    misses = {t.id: 0 for t in prep.ts}
    first_half = zero
    completed = unfinished = 0
    busy = {}
    for run in runs:
        busy[run.proc] = run.busy
        hs = h.numerator * (run.scale // h.denominator)
        for li, task in enumerate(run.tasks):
            comp = run.comp[li]
            if len(comp) == 0:
                continue
            if run.big:
                c = comp
                dl = [r + run.dl[li] for r in run.rel[li].tolist()]
                done = [x for x in c if x >= 0]
                completed += len(done)
                unfinished += len(c) - len(done)
                tard = [x - y for x, y in zip(c, dl) if x >= 0 and x > y]
                late_open = sum(1 for x, y in zip(c, dl) if x < 0 and y < hs)
                misses[task] += len(tard) + late_open
                if tard:
                    m = Fraction(max(tard), run.scale)
                    if m > per_max[task]:
                        per_max[task] = m
                    fh = [x - y for x, y in zip(c, dl) if 0 <= x and x > y and 2 * x <= hs]
                    if fh:
                        first_half = max(first_half, Fraction(max(fh), run.scale))
            else:
                c = comp
                dl = run.rel[li] + run.dl[li]
                done = c >= 0
                nd = int(done.sum())
                completed += nd
                unfinished += len(c) - nd
                late = done & (c > dl)
                misses[task] += int(late.sum()) + int((~done & (dl < hs)).sum())
                if late.any():
                    tard = (c - dl)[late]
                    m = Fraction(int(tard.max()), run.scale)
                    if m > per_max[task]:
                        per_max[task] = m
                    fh = late & (2 * c <= hs)
                    if fh.any():
                        first_half = max(first_half, Fraction(int((c - dl)[fh].max()), run.scale))
    migrating = prep.dist.migrating_tasks
    migrations = 0
    for task in migrating:
        m = jobs[task].on_first
        if len(m) > 1:
            migrations += int(np.count_nonzero(m[1:] != m[:-1]))
    overall = max(per_max.values(), default=zero)
    mig_max = max((per_max[i] for i in migrating), default=zero)
    return SimStats(h, per_max, misses, overall, first_half, mig_max, migrations, busy,
                    completed, unfinished, tuple(sorted(migrating)), None)


def simulate_decoupled(prep: Prepared) -> Optional[SimStats]:
    """Statistics from independent per-processor runs, or None if they may be coupled."""
    jobs = {t.id: _TaskJobs(prep, t.id) for t in prep.ts}
    runs = [_run_processor(prep, j, jobs) for j in range(prep.dist.processors)]
    if not _precedence_ok(prep, runs, jobs):
        return None
    return _stats(prep, runs, jobs)

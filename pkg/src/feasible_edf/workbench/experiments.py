"""Population experiments: heuristic comparison, non-light assignment, convergence.

Task sets are independent, so a population may be evaluated by a process
pool.  Results are keyed by set index and reduced in index order, which
keeps the output identical for any degree of parallelism.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..assignment import AssignmentError, Heuristic, assign_non_light, assign_tasks
from ..engine import SimConfig, SimulationError, max_tardiness_converged, simulate
from ..task_model import as_rat
from .generate import GenSpec, SetProfile, generate_taskset, profile
from .report import ExperimentRow, summarize

__all__ = [
    "VARIANTS",
    "CLASSIFICATIONS",
    "SetRecord",
    "ExperimentResult",
    "default_jobs",
    "random_seed_for",
    "bucket_label",
    "experiment_heuristics",
    "experiment_nonlight",
    "nonlight_sweep",
    "experiment_convergence",
]

JOBS_ENV = "FEASIBLE_EDF_JOBS"
SLICE_RANGE = (Fraction(1), Fraction(2))
VARIANTS = ("random", "huf", "luf", "lef", "lef-slice")
NONLIGHT_HEURISTICS = ("random", "huf", "luf", "lef")
CLASSIFICATIONS = ("e_max", "e_avg", "u_max", "u_avg")
U_BUCKET = Fraction(1, 20)


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def random_seed_for(seed: int, index: int) -> int:
    """Seed of the Random heuristic for set ``index``."""
    return int(np.random.SeedSequence([seed, index, 1]).generate_state(1)[0])


def bucket_label(classification: str, value: Fraction) -> Tuple[str, Fraction]:
    """Group key and its lower edge: integer e-buckets, 0.05-wide u-buckets."""
    if classification.startswith("e_"):
        lo = Fraction(math.floor(value))
        return f"{classification}={lo.numerator}", lo
    lo = math.floor(value / U_BUCKET) * U_BUCKET
    return f"{classification}={float(lo):.2f}", lo


@dataclass
class SetRecord:
    index: int
    profile: SetProfile
    tardiness: Dict[str, Optional[Fraction]] = field(default_factory=dict)
    migrating_tardiness: Dict[str, Optional[Fraction]] = field(default_factory=dict)
    converged: Optional[bool] = None
    migrating_tasks: int = 0
    errors: Dict[str, str] = field(default_factory=dict)


@dataclass
class ExperimentResult:
    rows: List[ExperimentRow]
    records: List[SetRecord]
    population: int
    successes: int
    exclusions: int

    def mean(self, variant: str, indices: Optional[Iterable[int]] = None) -> float:
        keep = None if indices is None else set(indices)
        vals = [float(r.tardiness[variant]) for r in self.records
                if r.tardiness.get(variant) is not None and (keep is None or r.index in keep)]
        return summarize(vals)[1]


def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (8 * jobs))))


def _heuristic(variant: str) -> Heuristic:
    return Heuristic.parse(variant.split("-")[0])


# -- experiment 1 -----------------------------------------------------------------

def _eval_heuristics(args) -> SetRecord:
    spec, index, variants, horizon = args
    ts = generate_taskset(spec, index)
    rec = SetRecord(index, profile(ts))
    rseed = random_seed_for(spec.seed, index)
    dists = {}
    for v in variants:
        try:
            h = _heuristic(v)
            if h not in dists:
                dists[h] = assign_tasks(ts, h, seed=rseed)
            d = dists[h]
            cfg = SimConfig(horizon, record_trace=False,
                            slice_range=SLICE_RANGE if v.endswith("-slice") else None)
            _, st = simulate(ts, d, cfg)
            rec.tardiness[v] = st.max_tardiness
            rec.migrating_tardiness[v] = st.migrating_max_tardiness
            rec.migrating_tasks = len(d.migrating_tasks)
        except (AssignmentError, SimulationError, ValueError) as exc:
            rec.tardiness[v] = None
            rec.errors[v] = str(exc)
    return rec


def _aggregate(records: Sequence[SetRecord], variants: Sequence[str],
               classifications: Sequence[str]) -> List[ExperimentRow]:
    groups: Dict[Tuple[int, Fraction, str, str, str], List[float]] = {}
    for rec in records:
        for ci, cls in enumerate(classifications):
            value = {"e_max": rec.profile.e_max, "e_avg": rec.profile.e_avg,
                     "u_max": rec.profile.u_max_observed, "u_avg": rec.profile.u_avg}[cls]
            key, lo = bucket_label(cls, value)
            for vi, v in enumerate(variants):
                t = rec.tardiness.get(v)
                if t is None:
                    continue
                groups.setdefault((ci, lo, key, vi, v), []).append(float(t))
        for vi, v in enumerate(variants):
            t = rec.tardiness.get(v)
            if t is not None:
                groups.setdefault((len(classifications), Fraction(0), "all", vi, v),
                                  []).append(float(t))
    rows = []
    for (ci, lo, key, vi, v), vals in sorted(groups.items()):
        n, mean, half = summarize(vals)
        rows.append(ExperimentRow(key, v, n, mean, half, order=(ci, lo, vi)))
    return rows


def _count(records, variants) -> Tuple[int, int]:
    ok = sum(1 for r in records if all(r.tardiness.get(v) is not None for v in variants))
    return ok, len(records) - ok


def experiment_heuristics(spec: GenSpec, variants: Sequence[str] = VARIANTS,
                          horizon=10000, jobs: Optional[int] = None,
                          classifications: Sequence[str] = CLASSIFICATIONS) -> ExperimentResult:
    """Observed max tardiness per heuristic, grouped by set profile.

    ``variants`` are heuristic names; a ``-slice`` suffix slices migrating
    jobs into sub-jobs costing between 1 and 2 time units.  Sets that fail
    assignment or simulation are kept as counted exclusions.
    """
    if spec.u_max_cap > Fraction(1, 2):
        raise ValueError("the heuristic comparison needs light tasks (u_max_cap <= 1/2)")
    horizon = as_rat(horizon)
    jobs = default_jobs() if jobs is None else jobs
    items = [(spec, i, tuple(variants), horizon) for i in range(spec.count)]
    records = _map(_eval_heuristics, items, jobs)
    ok, bad = _count(records, variants)
    return ExperimentResult(_aggregate(records, variants, classifications), records,
                            len(records), ok, bad)


# -- experiment 2 -----------------------------------------------------------------

def _eval_nonlight(args) -> SetRecord:
    spec, index, heuristics = args
    ts = generate_taskset(spec, index)
    rec = SetRecord(index, profile(ts))
    rseed = random_seed_for(spec.seed, index)
    for name in heuristics:
        try:
            assign_non_light(ts, Heuristic.parse(name), seed=rseed)
            rec.tardiness[name] = Fraction(1)
        except AssignmentError as exc:
            rec.tardiness[name] = Fraction(0)
            rec.errors[name] = str(exc)
    return rec


def experiment_nonlight(spec: GenSpec, heuristics: Sequence[str] = NONLIGHT_HEURISTICS,
                        jobs: Optional[int] = None) -> ExperimentResult:
    """Fraction of generated sets each heuristic assigns without overloading a processor.

    Rows carry the success ratio in ``mean``; a failed assignment is an
    outcome here, not an exclusion.
    """
    jobs = default_jobs() if jobs is None else jobs
    items = [(spec, i, tuple(heuristics)) for i in range(spec.count)]
    records = _map(_eval_nonlight, items, jobs)
    key = f"M={spec.M},u_max={float(spec.u_max_cap):.2f}"
    rows = []
    for vi, h in enumerate(heuristics):
        n, mean, half = summarize([float(r.tardiness[h]) for r in records])
        rows.append(ExperimentRow(key, h, n, mean, half,
                                  order=(spec.M, spec.u_max_cap, vi)))
    return ExperimentResult(rows, records, len(records), len(records), 0)


def nonlight_sweep(processors: Iterable[int] = (2, 4, 8, 16),
                   caps: Iterable = ("0.6", "0.7", "0.8", "0.9", "1.0"),
                   count: int = 100_000, seed: int = 0,
                   heuristics: Sequence[str] = NONLIGHT_HEURISTICS,
                   jobs: Optional[int] = None, **gen) -> List[ExperimentRow]:
    rows = []
    for m in processors:
        for cap in caps:
            spec = GenSpec(M=m, u_max_cap=as_rat(cap), seed=seed, count=count, **gen)
            rows.extend(experiment_nonlight(spec, heuristics, jobs).rows)
    return rows


# -- experiment 3 -----------------------------------------------------------------

def _eval_convergence(args) -> SetRecord:
    spec, index, horizon = args
    ts = generate_taskset(spec, index)
    rec = SetRecord(index, profile(ts))
    try:
        d = assign_tasks(ts, Heuristic.LEF)
        _, st = simulate(ts, d, SimConfig(horizon, record_trace=False))
    except (AssignmentError, SimulationError, ValueError) as exc:
        rec.tardiness["lef"] = None
        rec.errors["lef"] = str(exc)
        return rec
    rec.tardiness["lef"] = st.max_tardiness
    rec.migrating_tardiness["lef"] = st.migrating_max_tardiness
    rec.converged = max_tardiness_converged(st)
    rec.migrating_tasks = len(d.migrating_tasks)
    return rec


def experiment_convergence(spec: GenSpec, horizon=100000,
                           jobs: Optional[int] = None) -> ExperimentResult:
    """LEF schedules over a long horizon: observed max tardiness and convergence.

    Rows group the observed tardiness by ``e_avg`` and ``u_avg``; an extra
    ``converged`` row holds the fraction of sets whose maximum was already
    reached by half the horizon.
    """
    if spec.u_max_cap > Fraction(1, 2):
        raise ValueError("the convergence experiment needs light tasks (u_max_cap <= 1/2)")
    horizon = as_rat(horizon)
    jobs = default_jobs() if jobs is None else jobs
    items = [(spec, i, horizon) for i in range(spec.count)]
    records = _map(_eval_convergence, items, jobs)
    rows = _aggregate(records, ("lef",), ("e_avg", "u_avg"))
    flags = [1.0 if r.converged else 0.0 for r in records if r.converged is not None]
    if flags:
        n, mean, half = summarize(flags)
        rows.append(ExperimentRow("converged", "lef", n, mean, half, order=(99, 0, 0)))
    ok, bad = _count(records, ("lef",))
    return ExperimentResult(rows, records, len(records), ok, bad)

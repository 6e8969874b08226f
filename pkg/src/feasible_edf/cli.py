"""Command-line entry point: ``feasible-edf <subcommand>``."""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from fractions import Fraction

from . import assignment as asg
from .efdf_uniform import UniformPlatform, dispatch, format_dispatch, load_dispatch_state
from .engine import SimConfig, dump_trace, load_release_trace, simulate
from .job_distribution import build_job_map, job_processor
from .schedulability import (edf_uniprocessor_test, feasible_edf_admissible,
                             rm_sufficient_test)
from .task_model import TaskSet, Task, as_rat, dump_taskset, format_rat, load_taskset
from .workbench import GenSpec, emit_csv, generate_taskset
from .workbench import experiments as exp

log = logging.getLogger("feasible_edf")


def _rat(text: str) -> Fraction:
    try:
        return as_rat(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _rat_pair(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected lo,hi")
    return _rat(parts[0]), _rat(parts[1])


def cmd_gen(args) -> int:
    spec = GenSpec(M=args.m, u_max_cap=args.umax, seed=args.seed, count=args.count,
                   cost_min=args.cost_min, cost_resolution=args.cost_resolution)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
    for i in range(args.index, args.index + args.count):
        text = dump_taskset(generate_taskset(spec, i))
        if args.out_dir:
            with open(os.path.join(args.out_dir, f"set_{i:06d}.txt"), "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(f"# set {i}\n{text}")
    return 0


def cmd_check(args) -> int:
    ts = load_taskset(args.file)
    if args.test == "feasible-edf":
        ok = feasible_edf_admissible(ts)
        print(f"test=feasible-edf schedulable={str(ok).lower()} "
              f"U={format_rat(ts.total_utilization)} bound={ts.processors} "
              f"u_max={format_rat(ts.u_max)}")
        return 0
    verdict = (edf_uniprocessor_test if args.test == "edf" else rm_sufficient_test)(ts)
    bound = verdict.bound_used
    bound = format_rat(bound) if isinstance(bound, Fraction) else f"{bound:.12f}"
    print(f"test={args.test} schedulable={str(verdict.schedulable).lower()} "
          f"U={format_rat(verdict.total_utilization)} bound={bound}")
    return 0


def cmd_assign(args) -> int:
    ts = load_taskset(args.file)
    h = asg.Heuristic.parse(args.heuristic)
    try:
        if args.non_light:
            d = asg.assign_non_light(ts, h, seed=args.seed)
        else:
            d = asg.assign_tasks(ts, h, seed=args.seed)
    except asg.AssignmentError as exc:
        print(f"assignment failed: {exc}", file=sys.stderr)
        return 2
    print(f"{'task':>5} {'proc':>5} {'share':>14} {'kind':>10}")
    for s in sorted(d.shares, key=lambda s: (s.processor, s.task)):
        kind = "migrating" if d.is_migrating(s.task) else "fixed"
        print(f"{s.task:>5} {s.processor:>5} {format_rat(s.value):>14} {kind:>10}")
    if args.out:
        asg.save_distribution(d, args.out)
    return 0


def cmd_jobmap(args) -> int:
    d = asg.load_distribution(args.file)
    # job routing needs only the shares; rebuild a task set with matching utilizations
    utils = {}
    for s in d.shares:
        utils[s.task] = utils.get(s.task, Fraction(0)) + s.value
    tasks = tuple(Task(i, utils[i], Fraction(1)) for i in sorted(utils))
    jm = build_job_map(d, TaskSet(tasks, d.processors), args.task)
    print(f"task={jm.task} first_proc={jm.first_proc} second_proc={jm.second_proc} "
          f"f_first={format_rat(jm.f_first)} f_second={format_rat(jm.f_second)} "
          f"cycle={jm.cycle_length}")
    for k in range(1, args.count + 1):
        print(f"{k} {job_processor(jm, k)}")
    return 0


def cmd_simulate(args) -> int:
    ts = load_taskset(args.taskset)
    d = asg.load_distribution(args.distribution)
    releases = load_release_trace(args.releases) if args.releases else None
    cfg = SimConfig(args.horizon, slice_range=args.slice, release_trace=releases,
                    record_trace=bool(args.trace_out))
    trace, stats = simulate(ts, d, cfg)
    if args.trace_out:
        with open(args.trace_out, "w") as fh:
            fh.write(dump_trace(trace))
    for k, v in stats.as_dict().items():
        print(f"{k}={v}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("task", "max_tardiness", "misses"))
            for t in ts:
                w.writerow((t.id, format_rat(stats.per_task_max_tardiness[t.id]),
                            stats.per_task_misses[t.id]))
    return 0


def cmd_efdf_step(args) -> int:
    state = load_dispatch_state(args.state)
    platform = UniformPlatform(tuple(_rat(s) for s in args.speeds.split(",")))
    sys.stdout.write(format_dispatch(dispatch(state, args.now, platform,
                                              fill_from_b=not args.no_step5)))
    return 0


def cmd_experiment(args) -> int:
    gen = dict(cost_min=args.cost_min, cost_resolution=args.cost_resolution)
    if args.kind == "nonlight":
        caps = [args.umax] if args.umax is not None else ["0.6", "0.7", "0.8", "0.9", "1.0"]
        rows = exp.nonlight_sweep(args.m, caps, count=args.count, seed=args.seed,
                                  jobs=args.jobs, **gen)
        exclusions = 0
    else:
        if len(args.m) != 1:
            raise ValueError(f"experiment {args.kind} takes a single --m value")
        umax = args.umax if args.umax is not None else Fraction(1, 2)
        spec = GenSpec(M=args.m[0], u_max_cap=umax, seed=args.seed, count=args.count, **gen)
        if args.kind == "heuristics":
            res = exp.experiment_heuristics(spec, horizon=args.horizon or 10000, jobs=args.jobs)
        else:
            res = exp.experiment_convergence(spec, horizon=args.horizon or 100000, jobs=args.jobs)
        rows, exclusions = res.rows, res.exclusions
        print(f"population={res.population} successes={res.successes} "
              f"exclusions={res.exclusions}")
    if args.out:
        emit_csv(rows, args.out)
    else:
        for r in sorted(rows, key=lambda r: (r.order, r.group_key, r.heuristic)):
            print(f"{r.group_key},{r.heuristic},{r.n},{r.mean:.6f},{r.ci99:.6f}")
    return 0 if exclusions == 0 or args.allow_exclusions else 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="feasible-edf", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def gen_options(sp):
        sp.add_argument("--cost-min", type=_rat, default=Fraction(1),
                        help="lower end of the execution-cost range (default 1)")
        sp.add_argument("--cost-resolution", type=int, default=1,
                        help="execution costs are multiples of 1/N (default 1: integers)")

    sp = sub.add_parser("gen", help="generate random task sets")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--umax", type=_rat, default=Fraction(1, 2))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--index", type=int, default=0)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--out-dir")
    gen_options(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("check", help="utilization-based schedulability tests")
    sp.add_argument("--file", required=True)
    sp.add_argument("--test", choices=("edf", "rm", "feasible-edf"), default="feasible-edf")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("assign", help="distribute tasks onto processors")
    sp.add_argument("--file", required=True)
    sp.add_argument("--heuristic", default="seq",
                    choices=[h.value for h in asg.Heuristic])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--non-light", action="store_true",
                    help="allow tasks above utilization 1/2")
    sp.add_argument("--out", help="write the distribution file here")
    sp.set_defaults(func=cmd_assign)

    sp = sub.add_parser("jobmap", help="job-to-processor routing of a migrating task")
    sp.add_argument("--file", required=True, help="distribution file")
    sp.add_argument("--task", type=int, required=True)
    sp.add_argument("--count", type=int, default=16)
    sp.set_defaults(func=cmd_jobmap)

    sp = sub.add_parser("simulate", help="run Feasible EDF")
    sp.add_argument("--taskset", required=True)
    sp.add_argument("--distribution", required=True)
    sp.add_argument("--horizon", type=_rat, required=True)
    sp.add_argument("--slice", type=_rat_pair, help="sub-job cost range lo,hi")
    sp.add_argument("--releases", help="sporadic release trace file")
    sp.add_argument("--trace-out")
    sp.add_argument("--csv", help="per-task statistics as CSV")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("efdf-step", help="one EFDF dispatch decision on a uniform platform")
    sp.add_argument("--state", required=True)
    sp.add_argument("--speeds", required=True, help="comma-separated, fastest first")
    sp.add_argument("--now", type=_rat, default=Fraction(0))
    sp.add_argument("--no-step5", action="store_true", help="leave nodes idle instead of using B")
    sp.set_defaults(func=cmd_efdf_step)

    sp = sub.add_parser("experiment", help="population experiments")
    sp.add_argument("kind", choices=("heuristics", "nonlight", "convergence"))
    sp.add_argument("--m", type=int, nargs="+", default=[8])
    sp.add_argument("--umax", type=_rat)
    sp.add_argument("--count", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--horizon", type=_rat)
    sp.add_argument("--out")
    sp.add_argument("--jobs", type=int, default=None,
                    help=f"worker processes (default ${exp.JOBS_ENV} or 1)")
    sp.add_argument("--allow-exclusions", action="store_true")
    gen_options(sp)
    sp.set_defaults(func=cmd_experiment)
    return p


DEFAULT_COUNTS = {"heuristics": 10_000, "nonlight": 100_000, "convergence": 3_000}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "experiment" and args.count is None:
        args.count = DEFAULT_COUNTS[args.kind]
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

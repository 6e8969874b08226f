"""Distribute a small light task set over three processors and route jobs.

Run: python demos/01_distribute_and_route.py
"""

from feasible_edf import (Heuristic, TaskSet, assign_tasks, build_job_map,
                          fraction_on_processor, validate_distribution)
from feasible_edf.assignment import parse_distribution
from feasible_edf.task_model import format_rat

ts = TaskSet.from_pairs([(1, 4), (2, 5), (3, 10), (1, 3), (2, 5), (1, 5),
                         (2, 5), (1, 2), (1, 6)], processors=3)
print("total utilization", format_rat(ts.total_utilization), "on", ts.processors, "processors")

d = assign_tasks(ts, Heuristic.SEQUENTIAL)
assert validate_distribution(ts, d) == []

for j in range(d.processors):
    parts = [f"T{i}:{format_rat(d.share(i, j))}" for i in d.tasks_on(j)]
    print(f"P{j}  load {format_rat(d.processor_load(j))}  ", "  ".join(parts))

# every migrating task gets a static job pattern over its two processors
for i in d.migrating_tasks:
    jm = build_job_map(d, ts, i)
    a, b = jm.first_proc, jm.second_proc
    print(f"\nT{i}: f on P{a} = {format_rat(fraction_on_processor(d, i, a))}, "
          f"on P{b} = {format_rat(fraction_on_processor(d, i, b))}, cycle {jm.cycle_length} jobs")
    print("  jobs 1..16 ->", " ".join(f"P{jm.processor(k)}" for k in range(1, 17)))

# a hand-written distribution: a 2/5 task split 1/20 : 7/20, i.e. 1/8 : 7/8 of its work
split = parse_distribution("M=3\n0 1 1/20 migrating\n0 2 7/20 migrating\n")
jm = build_job_map(split, TaskSet.from_pairs([(2, 5)], 3), 0)
print("\n1/8 split:", " ".join(f"P{jm.processor(k)}" for k in range(1, 17)))

"""Why migrating jobs need a static pattern and top priority.

A migrating task whose jobs simply alternate between two processors can be
late on one of them, and the lateness then carries over to the other one,
since a job may not start before its predecessor has finished.  The same
task set under the Pfair-derived job pattern with two priority classes
keeps every migrating job on time.

Run: python demos/02_processor_linkage.py
"""

from fractions import Fraction as F

from feasible_edf import Distribution, Share, Task, TaskSet, simulate
from feasible_edf.engine import SimConfig
from feasible_edf.task_model import format_rat

ts = TaskSet((Task(0, 3, 6, first_release=10), Task(1, 1, 2)), processors=2)
d = Distribution.from_shares([Share(0, 0, F(1, 4)), Share(0, 1, F(1, 4)),
                              Share(1, 0, F(1, 4)), Share(1, 1, F(1, 4))], 2)


def naive(task, k):
    # task 0 stays on P1; task 1 alternates P0, P1, P0, ...
    return 1 if task == 0 else (k + 1) % 2


trace, stats = simulate(ts, d, SimConfig(20, job_router=naive, migrating_order="static"))
print("naive alternation, task 0 statically above task 1")
for s in trace.segments:
    if s.task == 1 and 5 <= s.job <= 8:
        print(f"  T1 job {s.job} on P{s.processor}: [{format_rat(s.start)}, {format_rat(s.end)})"
              f"  deadline {2 * s.job}")
print("  max tardiness of T1:", format_rat(stats.per_task_max_tardiness[1]))

_, stats = simulate(ts, d, SimConfig(2000, record_trace=False))
print("\nFeasible EDF job pattern and EDF inside the migrating class")
print("  max tardiness of migrating tasks over 2000 time units:",
      format_rat(stats.migrating_max_tardiness))

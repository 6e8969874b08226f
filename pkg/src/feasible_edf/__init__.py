"""Feasible EDF: bounded-tardiness EDF scheduling on identical multiprocessors.

Tasks with utilization at most 1/2 are distributed over processors so that
at most ``M - 1`` of them migrate, each between two consecutive processors
and only at job boundaries.  Jobs of migrating tasks are routed by a static
Pfair-window pattern and run above fixed tasks on every processor.
"""

from .task_model import (Rat, Task, TaskSet, Job, ReleaseModel, as_rat, utilization,
                         total_utilization, is_light, job_tardiness, load_taskset,
                         parse_taskset, dump_taskset, save_taskset)
from .schedulability import (TestVerdict, edf_uniprocessor_test, rm_utilization_bound,
                             rm_sufficient_test, feasible_edf_admissible)
from .assignment import (Share, Distribution, Heuristic, AssignmentError, assign_tasks,
                         assign_non_light, fraction_on_processor, validate_distribution)
from .job_distribution import (Window, JobMap, subtask_release, subtask_deadline, lag,
                               is_pfair, is_complementary, build_job_map, job_processor,
                               lemma1_bound)
from .engine import (SimConfig, SimTrace, SimStats, simulate, period_transform,
                     choose_slice, brute_force_oracle, max_tardiness_converged)

__version__ = "0.1.0"

"""How often can tasks heavier than 1/2 be distributed at all?

Two migrating tasks sharing a processor must not exceed a combined
utilization of one.  This prints the fraction of random sets (U = M, every
task utilization up to 1) each heuristic distributes successfully.

Run: python demos/05_nonlight_success.py [count]
"""

import sys

from feasible_edf.workbench import experiments as exp

count = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
rows = exp.nonlight_sweep(processors=(2, 4, 8), caps=("0.6", "0.8", "1.0"), count=count)
for r in rows:
    print(f"{r.group_key:18s} {r.heuristic:7s} {r.mean:.3f} +- {r.ci99:.3f}")

"""One dispatch decision on a uniform platform (nodes of different speeds).

Run: python demos/04_uniform_dispatch.py
"""

from feasible_edf.efdf_uniform import (DispatchState, ReadyTask, UniformPlatform, dispatch,
                                       format_dispatch, partition_feasible)

platform = UniformPlatform((3, 2, 1))
state = DispatchState((
    ReadyTask(0, abs_deadline=12, remaining=6, last_node=1),
    ReadyTask(1, abs_deadline=10, remaining=3),
    ReadyTask(2, abs_deadline=4, remaining=15),   # cannot finish even on the fastest node
    ReadyTask(3, abs_deadline=9, remaining=2, last_node=0),
    ReadyTask(4, abs_deadline=20, remaining=1),
))

a, b = partition_feasible(state, now=0, platform=platform)
print("can still finish:", [r.task for r in a])
print("hopeless:        ", [r.task for r in b])
print(format_dispatch(dispatch(state, 0, platform)), end="")

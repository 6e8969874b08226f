"""Execution phase: simulation, period transformation and the slot oracle."""

from .core import (SimConfig, Segment, SimTrace, SimStats, SimulationError, simulate,
                   simulate_reference, prepare, max_tardiness_converged,
                   parse_release_trace, load_release_trace, dump_trace)
from .slicing import period_transform, choose_slice, slice_factor, slice_tasks
from .oracle import brute_force_oracle

__all__ = [
    "SimConfig", "Segment", "SimTrace", "SimStats", "SimulationError", "simulate",
    "simulate_reference", "prepare", "max_tardiness_converged", "parse_release_trace",
    "load_release_trace", "dump_trace", "period_transform", "choose_slice",
    "slice_factor", "slice_tasks", "brute_force_oracle",
]

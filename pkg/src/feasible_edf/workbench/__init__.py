"""Task-set generation and the population experiments."""

from .generate import GenSpec, SetProfile, generate_taskset, profile
from .report import ExperimentRow, emit_csv, parse_csv, summarize
from .experiments import (ExperimentResult, SetRecord, experiment_convergence,
                          experiment_heuristics, experiment_nonlight, nonlight_sweep)

__all__ = [
    "GenSpec", "SetProfile", "generate_taskset", "profile", "ExperimentRow", "emit_csv",
    "parse_csv", "summarize", "ExperimentResult", "SetRecord", "experiment_convergence",
    "experiment_heuristics", "experiment_nonlight", "nonlight_sweep",
]

"""Aggregated experiment rows and their CSV form."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Iterable, List, Sequence

from scipy import stats

__all__ = ["ExperimentRow", "summarize", "emit_csv", "parse_csv", "HEADER"]

HEADER = ("group_key", "heuristic", "n", "mean", "ci99")


@dataclass(frozen=True)
class ExperimentRow:
    group_key: str
    heuristic: str
    n: int
    mean: float
    ci99: float
    order: tuple = ()

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("a row needs at least one sample")
        if self.ci99 < 0:
            raise ValueError("confidence half-width must be non-negative")


def summarize(values: Sequence[float]):
    """``(n, mean, ci99)`` with a Student-t 99% half-width.

    ``math.fsum`` is correctly rounded, so the result does not depend on
    the order of ``values``.
    """
    n = len(values)
    if n == 0:
        raise ValueError("no samples")
    mean = math.fsum(values) / n
    if n == 1:
        return n, mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    half = float(stats.t.ppf(0.995, n - 1)) * math.sqrt(var / n)
    return n, mean, half


def emit_csv(rows: Iterable[ExperimentRow], path: str | os.PathLike) -> None:
    rows = sorted(rows, key=lambda r: (r.order, r.group_key, r.heuristic))
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(HEADER)
            for r in rows:
                w.writerow((r.group_key, r.heuristic, r.n, f"{r.mean:.6f}", f"{r.ci99:.6f}"))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {os.fspath(path)!r}: {exc.strerror}") from exc


def parse_csv(path: str | os.PathLike) -> List[ExperimentRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != HEADER:
            raise ValueError(f"{os.fspath(path)}: unexpected header {header}")
        return [ExperimentRow(g, h, int(n), float(m), float(c)) for g, h, n, m, c in reader]

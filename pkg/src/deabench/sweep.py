"""Solutions along a descending alpha grid, grouped where nothing changes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import Dataset
from .models import BenchmarkSolution, ModelKind, SolveOptions, solve

DEFAULT_GRID: tuple[float, ...] = tuple(round(1.0 - 0.1 * k, 10) for k in range(10))
TARGET_TOL = 1e-6


class GridError(ValueError):
    pass


class SweepFailure(RuntimeError):
    """A solve failed at one grid point; ``alpha`` says which."""

    def __init__(self, alpha: float, cause: Exception):
        super().__init__(f"solve failed at alpha = {alpha:g}: {cause}")
        self.alpha = alpha
        self.cause = cause


def make_grid(start: float = 1.0, stop: float = 0.1, step: float = 0.1) -> tuple[float, ...]:
    """Descending grid ``start, start - step, ...`` down to ``stop`` inclusive."""
    if step <= 0:
        raise GridError(f"step must be positive, got {step}")
    if start < stop:
        raise GridError(f"grid must run downward: from {start} is below to {stop}")
    if not (0.0 <= stop and start <= 1.0):
        raise GridError(f"grid must lie within [0, 1], got {start} .. {stop}")
    count = int(np.floor((start - stop) / step + 1e-9)) + 1
    return tuple(round(start - k * step, 10) for k in range(count))


def check_grid(grid: Sequence[float]) -> tuple[float, ...]:
    """Validate a strictly descending grid within [0, 1]."""
    grid = tuple(float(a) for a in grid)
    if not grid:
        raise GridError("grid is empty")
    for a in grid:
        if not 0.0 <= a <= 1.0:
            raise GridError(f"alpha {a} outside [0, 1]")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise GridError("grid must be strictly descending")
    return grid


@dataclass(frozen=True)
class AlphaSeries:
    dmu_id: str
    model: ModelKind
    grid: tuple[float, ...]
    solutions: dict[float, BenchmarkSolution]
    change_points: tuple[float, ...] = field(default=())

    def __getitem__(self, alpha: float) -> BenchmarkSolution:
        return self.solutions[alpha]


def alpha_series(
    d: Dataset,
    E: Sequence[str],
    dmu_id: str,
    kind: ModelKind | str,
    grid: Sequence[float] = DEFAULT_GRID,
    lambda_threshold: float = 1e-6,
) -> AlphaSeries:
    """Solve ``kind`` for ``dmu_id`` at every grid alpha.

    Alpha zero is accepted only when listed explicitly; its solution always
    goes through the endpoint refinement, as does alpha one.
    """
    kind = ModelKind(kind)
    grid = check_grid(grid)
    solutions = {}
    for a in grid:
        opts = SolveOptions(alpha=a, lambda_threshold=lambda_threshold, endpoint_refine=True)
        try:
            solutions[a] = solve(kind, d, E, dmu_id, opts)
        except RuntimeError as exc:
            raise SweepFailure(a, exc) from exc
    changes = tuple(
        b for a, b in zip(grid, grid[1:])
        if set(solutions[a].reference_set) != set(solutions[b].reference_set)
    )
    return AlphaSeries(dmu_id, kind, grid, solutions, changes)


@dataclass(frozen=True)
class SeriesRow:
    label: str
    alphas: tuple[float, ...]
    solution: BenchmarkSolution


def _same_point(a: BenchmarkSolution, b: BenchmarkSolution) -> bool:
    if set(a.reference_set) != set(b.reference_set):
        return False
    ta = np.array(a.targets.inputs + a.targets.outputs)
    tb = np.array(b.targets.inputs + b.targets.outputs)
    return bool(np.all(np.abs(ta - tb) <= TARGET_TOL * np.maximum(1.0, np.abs(ta))))


def _label(group: Sequence[float], reaches_end: bool) -> str:
    if len(group) == 1:
        return f"{group[0]:g}"
    if reaches_end:
        return f"≤ {group[0]:g}"
    return f"{group[0]:g} to {group[-1]:g}"


def detect_changes(series: AlphaSeries) -> list[SeriesRow]:
    """Collapse consecutive grid points with the same reference set and targets.

    The rows partition the grid; each carries the solution at its first alpha.
    """
    groups: list[list[float]] = []
    for a in series.grid:
        if groups and _same_point(series.solutions[groups[-1][-1]], series.solutions[a]):
            groups[-1].append(a)
        else:
            groups.append([a])
    last = series.grid[-1]
    return [
        SeriesRow(_label(g, g[-1] == last), tuple(g), series.solutions[g[0]])
        for g in groups
    ]

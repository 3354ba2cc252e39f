"""DEA benchmarking: closest targets on the efficient frontier and the most
similar peer groups, traded off along a weight ``alpha``."""

from .dataset import Dataset, DataError, DmuRecord, describe, export_csv, load_csv, validate
from .frontier import FrontierClassification, Status, classify
from .metrics import distance_matrix, hausdorff_to_set, mix_distance, mix_sine, weighted_l1
from .models import (
    BenchmarkSolution,
    Hyperplane,
    IncompatibleModel,
    ModelKind,
    SolveOptions,
    SolverFailure,
    Targets,
    endpoint_refine,
    solve,
    solve_bi_crs,
    solve_bi_vrs,
    solve_closest,
    solve_oriented_input,
    solve_oriented_output,
    validate_solution,
)
from .sweep import DEFAULT_GRID, AlphaSeries, alpha_series, detect_changes

__all__ = [
    "AlphaSeries",
    "BenchmarkSolution",
    "DEFAULT_GRID",
    "DataError",
    "Dataset",
    "DmuRecord",
    "FrontierClassification",
    "Hyperplane",
    "IncompatibleModel",
    "ModelKind",
    "SolveOptions",
    "SolverFailure",
    "Status",
    "Targets",
    "alpha_series",
    "classify",
    "describe",
    "detect_changes",
    "distance_matrix",
    "endpoint_refine",
    "export_csv",
    "hausdorff_to_set",
    "load_csv",
    "mix_distance",
    "mix_sine",
    "solve",
    "solve_bi_crs",
    "solve_bi_vrs",
    "solve_closest",
    "solve_oriented_input",
    "solve_oriented_output",
    "validate",
    "validate_solution",
    "weighted_l1",
]

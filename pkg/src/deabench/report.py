"""Text rendering of classifications, distance matrices and benchmarks.

Targets print with one decimal, distances with three. Every renderer takes
``fmt`` in ``{"md", "csv"}``; JSON documents are assembled by the CLI.
"""

from __future__ import annotations

import csv
import io
from typing import Sequence

from .dataset import Dataset
from .frontier import FrontierClassification
from .metrics import DistanceMatrix, mix_distance, weighted_l1
from .models import BenchmarkSolution, ModelKind
from .sweep import AlphaSeries, detect_changes


def table(headers: Sequence[str], rows: Sequence[Sequence[object]], fmt: str = "md") -> str:
    cells = [[str(c) for c in r] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(headers)
        w.writerows(cells)
        return buf.getvalue().rstrip("\n")
    lines = ["| " + " | ".join(headers) + " |", "|" + "|".join("---" for _ in headers) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in cells]
    return "\n".join(lines)


def _fixed(x: float, places: int) -> str:
    text = f"{x:.{places}f}"
    # values that round to zero from below would print as -0.0
    return text[1:] if text.startswith("-") and float(text) == 0.0 else text


def dist3(x: float) -> str:
    return _fixed(x, 3)


def target1(x: float) -> str:
    return _fixed(x, 1)


def classification(c: FrontierClassification, fmt: str = "md") -> str:
    rows = [(k, s.value) for k, s in c.status.items()]
    out = table(["DMU", "status"], rows, fmt)
    if fmt == "md":
        out += "\n\nE = {" + ", ".join(c.E) + "}"
    return out


def distances(dm: DistanceMatrix, fmt: str = "md") -> str:
    rows = [[r] + [dist3(v) for v in dm.entries[k]] for k, r in enumerate(dm.row_ids)]
    return table(["DMU"] + list(dm.col_ids), rows, fmt)


def peer_distance(d: Dataset, sol: BenchmarkSolution, peer: str) -> float:
    measure = mix_distance if sol.model is ModelKind.BI_CRS else weighted_l1
    return measure(d[sol.dmu_id], d[peer])


def reference_set(d: Dataset, sol: BenchmarkSolution) -> str:
    """``A (0.933), B (0.867)``: peers with their distance to the DMU."""
    return ", ".join(f"{e} ({dist3(peer_distance(d, sol, e))})" for e in sol.reference_set)


def peer_divisor(d: Dataset, kind: ModelKind) -> tuple[str, int]:
    """Label and divisor normalizing the peer radius."""
    if kind is ModelKind.BI_CRS:
        return "d_H/2", 2
    return "d_H/(m+s)", d.m + d.s


def proj_divisor(d: Dataset, kind: ModelKind) -> tuple[str, int]:
    """Label and divisor normalizing the projection distance."""
    if kind is ModelKind.ORIENTED_OUTPUT:
        return "d_proj/s", d.s
    if kind is ModelKind.ORIENTED_INPUT:
        return "d_proj/m", d.m
    return "d_proj/(m+s)", d.m + d.s


def benchmark(d: Dataset, sol: BenchmarkSolution, efficient: bool, fmt: str = "md") -> str:
    rec = d[sol.dmu_id]
    names = list(d.input_names) + list(d.output_names)
    if fmt == "csv":
        return _benchmark_csv(d, sol, efficient)
    head = f"DMU {sol.dmu_id}, model {sol.model.value}, alpha = {sol.alpha:g}"
    if efficient:
        return head + "\nefficient; self-benchmark"
    slacks = list(sol.input_slacks) + list(sol.output_slacks)
    rows = [
        ["actual"] + [target1(v) for v in rec.inputs + rec.outputs],
        ["target"] + [target1(v) for v in sol.targets.inputs + sol.targets.outputs],
        ["slack"] + [target1(v) for v in slacks],
    ]
    plabel, pdiv = proj_divisor(d, sol.model)
    hlabel, hdiv = peer_divisor(d, sol.model)
    lam = ", ".join(f"{e} {sol.lambdas[e]:.3f}" for e in sol.reference_set)
    lines = [
        head,
        "",
        table([""] + names, rows),
        "",
        f"reference set: {reference_set(d, sol)}",
        f"lambda: {lam}",
        f"d_proj = {dist3(sol.d_proj)} ({plabel} = {dist3(sol.d_proj / pdiv)})",
        f"d_H = {dist3(sol.d_H)} ({hlabel} = {dist3(sol.d_H / hdiv)})",
        f"objective = {dist3(sol.objective)}",
    ]
    return "\n".join(lines)


def _benchmark_csv(d: Dataset, sol: BenchmarkSolution, efficient: bool) -> str:
    plabel, pdiv = proj_divisor(d, sol.model)
    hlabel, hdiv = peer_divisor(d, sol.model)
    rows = [("dmu", sol.dmu_id), ("model", sol.model.value), ("alpha", f"{sol.alpha:g}")]
    rows.append(("status", "efficient; self-benchmark" if efficient else sol.status))
    for name, v in zip(d.input_names, sol.targets.inputs):
        rows.append((f"target {name}", target1(v)))
    for name, v in zip(d.output_names, sol.targets.outputs):
        rows.append((f"target {name}", target1(v)))
    rows += [
        ("reference set", reference_set(d, sol)),
        ("d_proj", dist3(sol.d_proj)),
        (plabel, dist3(sol.d_proj / pdiv)),
        ("d_H", dist3(sol.d_H)),
        (hlabel, dist3(sol.d_H / hdiv)),
        ("objective", dist3(sol.objective)),
    ]
    return table(["field", "value"], rows, "csv")


def series_tables(d: Dataset, series: AlphaSeries, fmt: str = "md") -> str:
    """Benchmarking table (reference sets) and target table for one series."""
    rows = detect_changes(series)
    hlabel, hdiv = peer_divisor(d, series.model)
    plabel, pdiv = proj_divisor(d, series.model)
    peers = table(
        ["alpha", "reference set", hlabel],
        [(r.label, reference_set(d, r.solution), dist3(r.solution.d_H / hdiv)) for r in rows],
        fmt,
    )
    rec = d[series.dmu_id]
    target_rows = [["actual"] + [target1(v) for v in rec.inputs + rec.outputs] + [""]]
    for r in rows:
        t = r.solution.targets
        target_rows.append(
            [r.label] + [target1(v) for v in t.inputs + t.outputs] + [dist3(r.solution.d_proj / pdiv)]
        )
    targets = table(["alpha"] + list(d.input_names) + list(d.output_names) + [plabel], target_rows, fmt)
    if fmt == "csv":
        return peers + "\n\n" + targets
    title = f"DMU {series.dmu_id}, model {series.model.value}"
    return f"{title}: benchmarking\n\n{peers}\n\n{title}: targets\n\n{targets}"

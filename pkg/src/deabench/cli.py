"""``deabench`` command line: classify, distances, bench, sweep.

Exit codes: 0 success, 1 bad data / options / model-rts mismatch,
2 solver failure. Every invocation appends a run record (JSON lines) to
``<results-dir>/<dataset digest>.jsonl``.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import click

from . import report
from .dataset import DataError, Dataset, load_csv, validate
from .frontier import FrontierClassification, classify
from .lp import NumericalBreakdown
from .metrics import L1, MIX, distance_matrix
from .mip import NodeLimitExceeded
from .models import ModelKind, SolveOptions, SolverFailure, solve
from .sweep import GridError, SweepFailure, alpha_series, make_grid

MODEL_NAMES = {
    "closest": ModelKind.CLOSEST,
    "bi-vrs": ModelKind.BI_VRS,
    "oriented-out": ModelKind.ORIENTED_OUTPUT,
    "oriented-in": ModelKind.ORIENTED_INPUT,
    "bi-crs": ModelKind.BI_CRS,
}
SOLVER_ERRORS = (SolverFailure, NumericalBreakdown, NodeLimitExceeded, SweepFailure)


class SolverError(click.ClickException):
    exit_code = 2


@dataclass
class RunRecord:
    timestamp: str
    dataset_digest: str
    command: dict[str, Any]
    results: list[Any]


def record_run(results_dir: Path, rec: RunRecord) -> Path:
    results_dir.mkdir(parents=True, exist_ok=True)
    path = results_dir / f"{rec.dataset_digest}.jsonl"
    with path.open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(asdict(rec)) + "\n")
    return path


def _load(data: str, rts: str) -> Dataset:
    try:
        d = load_csv(data, rts=rts)
    except (DataError, OSError) as exc:
        raise click.ClickException(str(exc)) from None
    problems = validate(d)
    if problems:
        raise click.ClickException("invalid dataset:\n  " + "\n  ".join(problems))
    return d


def _check_ids(d: Dataset, ids) -> None:
    for k in ids:
        if k not in d.ids:
            raise click.ClickException(f"unknown DMU id {k!r}")


def _emit(ctx: click.Context, d: Dataset, text: str, results: list[Any], out: Optional[str]) -> None:
    opts = ctx.obj
    command = {"name": ctx.command.name, **{k: v for k, v in ctx.params.items()}}
    doc = {"dataset_digest": d.digest(), "command": command, "results": results}
    if opts["fmt"] == "json":
        text = json.dumps(doc, indent=2)
    click.echo(text)
    if out:
        Path(out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    stamp = datetime.now(timezone.utc).isoformat()
    record_run(Path(opts["results_dir"]), RunRecord(stamp, d.digest(), command, results))


def _common(f):
    f = click.option("--results-dir", default="dea-runs", show_default=True,
                     type=click.Path(file_okay=False), help="Where run records are appended.")(f)
    f = click.option("--out", type=click.Path(dir_okay=False), help="Also write the JSON document here.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["md", "csv", "json"]), default="md",
                     show_default=True)(f)
    f = click.option("--rts", type=click.Choice(["vrs", "crs"]), default="vrs", show_default=True)(f)
    f = click.option("--data", required=True, type=click.Path(dir_okay=False), help="CSV of DMUs.")(f)
    return f


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Benchmarking with closest targets and similar peer groups."""


def _setup(ctx, fmt, results_dir):
    ctx.obj = {"fmt": fmt, "results_dir": results_dir}


@main.command("classify")
@_common
@click.pass_context
def classify_cmd(ctx, data, rts, fmt, out, results_dir):
    """Efficiency status of every DMU and the extreme efficient set E."""
    _setup(ctx, fmt, results_dir)
    d = _load(data, rts)
    c = _classify(d)
    results = [{"id": k, "status": s.value} for k, s in c.status.items()]
    results.append({"E": list(c.E)})
    _emit(ctx, d, report.classification(c, fmt), results, out)


@main.command("distances")
@_common
@click.option("--kind", type=click.Choice([L1, MIX]), default=None,
              help="Peer measure; defaults to l1 under vrs and mix under crs.")
@click.option("--dmu", "dmus", multiple=True, help="Row DMU (repeatable); default: inefficient DMUs.")
@click.pass_context
def distances_cmd(ctx, data, rts, fmt, out, results_dir, kind, dmus):
    """Distances from DMUs to each member of E."""
    _setup(ctx, fmt, results_dir)
    d = _load(data, rts)
    _check_ids(d, dmus)
    c = _classify(d)
    kind = kind or (L1 if rts == "vrs" else MIX)
    rows = list(dmus) or c.inefficient_ids()
    dm = distance_matrix(d, c.E, kind=kind, rows=rows)
    results = [{"dmu_id": r, "distances": dm.row(r)} for r in dm.row_ids]
    _emit(ctx, d, report.distances(dm, fmt), results, out)


def _model_option(f):
    return click.option("--model", "model", required=True, type=click.Choice(list(MODEL_NAMES)))(f)


@main.command("bench")
@_common
@_model_option
@click.option("--dmu", required=True, help="DMU to benchmark.")
@click.option("--alpha", type=click.FloatRange(0.0, 1.0), default=1.0, show_default=True)
@click.pass_context
def bench_cmd(ctx, data, rts, fmt, out, results_dir, model, dmu, alpha):
    """Targets and reference set of one DMU at one alpha."""
    _setup(ctx, fmt, results_dir)
    d = _load(data, rts)
    kind = _compatible(d, model)
    _check_ids(d, [dmu])
    c = _classify(d)
    try:
        sol = solve(kind, d, c.E, dmu, SolveOptions(alpha=alpha))
    except SOLVER_ERRORS as exc:
        raise SolverError(str(exc)) from None
    efficient = c.status[dmu].is_efficient
    _emit(ctx, d, report.benchmark(d, sol, efficient, fmt), [sol.to_dict()], out)


def _sweep_one(args):
    d, E, dmu, kind, grid = args
    return alpha_series(d, E, dmu, kind, grid)


@main.command("sweep")
@_common
@_model_option
@click.option("--dmu", "dmus", multiple=True, help="DMU to sweep (repeatable).")
@click.option("--all", "all_dmus", is_flag=True, help="Sweep every DMU.")
@click.option("--from", "start", type=float, default=1.0, show_default=True)
@click.option("--to", "stop", type=float, default=0.1, show_default=True)
@click.option("--step", type=float, default=0.1, show_default=True)
@click.option("--jobs", type=click.IntRange(1), default=1, show_default=True,
              help="Worker processes for --all.")
@click.pass_context
def sweep_cmd(ctx, data, rts, fmt, out, results_dir, model, dmus, all_dmus, start, stop, step, jobs):
    """Targets and reference sets along a descending alpha grid."""
    _setup(ctx, fmt, results_dir)
    d = _load(data, rts)
    kind = _compatible(d, model)
    try:
        grid = make_grid(start, stop, step)
    except GridError as exc:
        raise click.ClickException(str(exc)) from None
    if all_dmus:
        dmus = d.ids
    elif not dmus:
        raise click.ClickException("give --dmu or --all")
    _check_ids(d, dmus)
    c = _classify(d)
    tasks = [(d, c.E, k, kind, grid) for k in dmus]
    try:
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                series = list(pool.map(_sweep_one, tasks))
        else:
            series = [_sweep_one(t) for t in tasks]
    except SOLVER_ERRORS as exc:
        raise SolverError(str(exc)) from None
    blocks = [report.series_tables(d, s, fmt) for s in series]
    results = [s.solutions[a].to_dict() for s in series for a in s.grid]
    _emit(ctx, d, "\n\n".join(blocks), results, out)


def _compatible(d: Dataset, model: str) -> ModelKind:
    kind = MODEL_NAMES[model]
    if kind.rts != d.rts:
        raise click.ClickException(
            f"model {model} needs --rts {'crs' if kind is ModelKind.BI_CRS else 'vrs'} (got {d.rts} returns to scale)"
        )
    return kind


def _classify(d: Dataset) -> FrontierClassification:
    try:
        return classify(d)
    except SOLVER_ERRORS as exc:
        raise SolverError(str(exc)) from None


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

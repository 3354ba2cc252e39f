"""Input/output data for the evaluated DMUs."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

VARIABLE = "variable"
CONSTANT = "constant"
_RTS_ALIASES = {"vrs": VARIABLE, "variable": VARIABLE, "crs": CONSTANT, "constant": CONSTANT}


class DataError(ValueError):
    """Malformed input data; the message names the offending row/column."""


def normalize_rts(rts: str) -> str:
    try:
        return _RTS_ALIASES[rts.lower()]
    except KeyError:
        raise DataError(f"unknown returns-to-scale {rts!r} (expected vrs or crs)") from None


@dataclass(frozen=True)
class DmuRecord:
    id: str
    inputs: tuple[float, ...]
    outputs: tuple[float, ...]

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.inputs + self.outputs, dtype=float)


@dataclass(frozen=True)
class Dataset:
    dmus: tuple[DmuRecord, ...]
    m: int
    s: int
    rts: str = VARIABLE
    input_names: tuple[str, ...] = ()
    output_names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "dmus", tuple(self.dmus))
        object.__setattr__(self, "rts", normalize_rts(self.rts))
        if not self.input_names:
            object.__setattr__(self, "input_names", tuple(f"x{i + 1}" for i in range(self.m)))
        if not self.output_names:
            object.__setattr__(self, "output_names", tuple(f"y{r + 1}" for r in range(self.s)))

    @classmethod
    def from_arrays(cls, ids, X, Y, rts=VARIABLE, input_names=(), output_names=()) -> "Dataset":
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if Y.ndim == 1:
            Y = Y[:, None]
        records = tuple(
            DmuRecord(str(i), tuple(float(v) for v in x), tuple(float(v) for v in y))
            for i, x, y in zip(ids, X, Y)
        )
        return cls(records, X.shape[1], Y.shape[1], rts, tuple(input_names), tuple(output_names))

    def with_rts(self, rts: str) -> "Dataset":
        return Dataset(self.dmus, self.m, self.s, rts, self.input_names, self.output_names)

    @property
    def n(self) -> int:
        return len(self.dmus)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.dmus)

    @cached_property
    def X(self) -> np.ndarray:
        return np.array([d.inputs for d in self.dmus], dtype=float).reshape(self.n, self.m)

    @cached_property
    def Y(self) -> np.ndarray:
        return np.array([d.outputs for d in self.dmus], dtype=float).reshape(self.n, self.s)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {d.id: k for k, d in enumerate(self.dmus)}

    def index(self, dmu_id: str) -> int:
        try:
            return self._index[dmu_id]
        except KeyError:
            raise KeyError(f"unknown DMU id {dmu_id!r}") from None

    def __getitem__(self, dmu_id: str) -> DmuRecord:
        return self.dmus[self.index(dmu_id)]

    @cached_property
    def input_scale(self) -> np.ndarray:
        """Per-input column maxima; dividing by these puts data in (0, 1]."""
        return self.X.max(axis=0)

    @cached_property
    def output_scale(self) -> np.ndarray:
        return self.Y.max(axis=0)

    @cached_property
    def scaled_X(self) -> np.ndarray:
        return self.X / self.input_scale

    @cached_property
    def scaled_Y(self) -> np.ndarray:
        return self.Y / self.output_scale

    def digest(self) -> str:
        h = hashlib.sha256()
        for d in self.dmus:
            h.update(repr((d.id, d.inputs, d.outputs)).encode())
        return h.hexdigest()


@dataclass(frozen=True)
class VariableSummary:
    mean: float
    sd: float
    min: float
    max: float


@dataclass(frozen=True)
class SummaryStats:
    variables: dict[str, VariableSummary] = field(default_factory=dict)

    def __getitem__(self, name: str) -> VariableSummary:
        return self.variables[name]


def validate(d: Dataset) -> list[str]:
    """Every invariant violation of ``d``; an empty list means valid."""
    problems = []
    if d.n < 2:
        problems.append(f"n >= 2 required, dataset has {d.n} DMU(s)")
    if d.m < 1:
        problems.append("m >= 1 required (no input columns)")
    if d.s < 1:
        problems.append("s >= 1 required (no output columns)")
    seen: dict[str, int] = {}
    for k, rec in enumerate(d.dmus):
        if rec.id in seen:
            problems.append(f"duplicate id {rec.id!r} at rows {seen[rec.id] + 1} and {k + 1}")
        else:
            seen[rec.id] = k
        if len(rec.inputs) != d.m:
            problems.append(f"DMU {rec.id!r}: dimension mismatch, {len(rec.inputs)} inputs, expected {d.m}")
        if len(rec.outputs) != d.s:
            problems.append(f"DMU {rec.id!r}: dimension mismatch, {len(rec.outputs)} outputs, expected {d.s}")
        for kind, values in (("input", rec.inputs), ("output", rec.outputs)):
            for i, v in enumerate(values):
                if not (math.isfinite(v) and v > 0):
                    problems.append(f"DMU {rec.id!r}: {kind} {i + 1} must be strictly positive, got {v}")
    if len(d.input_names) != d.m or len(d.output_names) != d.s:
        problems.append("variable name count does not match (m, s)")
    return problems


def describe(d: Dataset) -> SummaryStats:
    """Mean, sample standard deviation, min and max of every variable."""
    out = {}
    columns = [(name, d.X[:, i]) for i, name in enumerate(d.input_names)]
    columns += [(name, d.Y[:, r]) for r, name in enumerate(d.output_names)]
    for name, col in columns:
        sd = float(np.std(col, ddof=1)) if len(col) > 1 else 0.0
        out[name] = VariableSummary(float(np.mean(col)), sd, float(col.min()), float(col.max()))
    return SummaryStats(out)


def _roles_from_header(header: Sequence[str]) -> dict[str, str]:
    roles = {}
    for k, col in enumerate(header):
        if col.startswith("in:"):
            roles[col] = "input"
        elif col.startswith("out:"):
            roles[col] = "output"
        elif k == 0:
            roles[col] = "id"
    return roles


def load_csv(
    path: str | Path,
    schema: Optional[Mapping[str, str]] = None,
    rts: str = VARIABLE,
) -> Dataset:
    """Read a CSV of DMUs.

    Without ``schema`` the first column is the id and columns prefixed
    ``in:`` / ``out:`` are inputs / outputs. A schema maps column names
    to ``"id"``, ``"input"`` or ``"output"``; unmapped columns are ignored.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise DataError(f"{path}: no rows (empty file)")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DataError(f"{path}: no rows below the header")

    roles = dict(schema) if schema is not None else _roles_from_header(header)
    for col, role in roles.items():
        if role not in ("id", "input", "output"):
            raise DataError(f"column {col!r}: unknown role {role!r}")
        if col not in header:
            raise DataError(f"missing column {col!r} in header")
    id_cols = [c for c, r in roles.items() if r == "id"]
    in_cols = [c for c in header if roles.get(c) == "input"]
    out_cols = [c for c in header if roles.get(c) == "output"]
    if len(id_cols) != 1:
        raise DataError(f"exactly one id column required, found {len(id_cols)}")
    if not in_cols:
        raise DataError("no input columns (prefix headers with 'in:' or pass a schema)")
    if not out_cols:
        raise DataError("no output columns (prefix headers with 'out:' or pass a schema)")

    pos = {c: header.index(c) for c in header}
    id_pos = pos[id_cols[0]]
    records = []
    seen: dict[str, int] = {}
    for line, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"row {line}: expected {len(header)} cells, found {len(row)}")
        dmu_id = row[id_pos].strip()
        if dmu_id in seen:
            raise DataError(f"row {line}: duplicate id {dmu_id!r} (first seen at row {seen[dmu_id]})")
        seen[dmu_id] = line

        def number(col):
            cell = row[pos[col]].strip()
            try:
                value = float(cell)
            except ValueError:
                raise DataError(f"row {line}, column {col!r}: non-numeric value {cell!r}") from None
            if not math.isfinite(value) or value <= 0:
                raise DataError(f"row {line}, column {col!r}: value {cell} must be strictly positive")
            return value

        records.append(
            DmuRecord(dmu_id, tuple(number(c) for c in in_cols), tuple(number(c) for c in out_cols))
        )

    names_in = tuple(c[3:] if c.startswith("in:") else c for c in in_cols)
    names_out = tuple(c[4:] if c.startswith("out:") else c for c in out_cols)
    return Dataset(tuple(records), len(in_cols), len(out_cols), rts, names_in, names_out)


def export_csv(d: Dataset, path: str | Path, id_column: str = "id") -> None:
    """Write ``d`` in the prefixed-header layout :func:`load_csv` reads by default."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([id_column] + [f"in:{n}" for n in d.input_names] + [f"out:{n}" for n in d.output_names])
        for rec in d.dmus:
            w.writerow([rec.id] + [repr(v) for v in rec.inputs] + [repr(v) for v in rec.outputs])

"""Peer-similarity measures: weighted L1 distance, Hausdorff radius and mix sines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .dataset import Dataset, DmuRecord

L1 = "l1"
MIX = "mix"


def _check_dims(a: DmuRecord, b: DmuRecord) -> None:
    if len(a.inputs) != len(b.inputs) or len(a.outputs) != len(b.outputs):
        raise ValueError(f"dimension mismatch between {a.id!r} and {b.id!r}")


def weighted_l1(origin: DmuRecord, other: DmuRecord) -> float:
    """L1 distance with each coordinate divided by the origin's value.

    Not symmetric: the origin's own data sets the weights.
    """
    _check_dims(origin, other)
    x0 = np.asarray(origin.inputs)
    y0 = np.asarray(origin.outputs)
    return float(
        np.sum(np.abs(x0 - np.asarray(other.inputs)) / x0)
        + np.sum(np.abs(y0 - np.asarray(other.outputs)) / y0)
    )


def hausdorff_to_set(origin: DmuRecord, peers: Iterable[DmuRecord]) -> float:
    """Largest weighted L1 distance from ``origin`` to any peer."""
    peers = list(peers)
    if not peers:
        raise ValueError("peer set must be nonempty")
    return max(weighted_l1(origin, p) for p in peers)


def projection_distance(
    x0: Sequence[float],
    y0: Sequence[float],
    x_hat: Sequence[float],
    y_hat: Sequence[float],
    orientation: Optional[str] = None,
) -> float:
    """Relative improvement from actual ``(x0, y0)`` to target ``(x_hat, y_hat)``.

    ``sum (x0 - x_hat)/x0 + sum (y_hat - y0)/y0``; ``orientation="output"``
    or ``"input"`` keeps only that side.
    """
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    total = 0.0
    if orientation in (None, "input"):
        total += float(np.sum((x0 - np.asarray(x_hat, dtype=float)) / x0))
    if orientation in (None, "output"):
        total += float(np.sum((np.asarray(y_hat, dtype=float) - y0) / y0))
    return total


def mix_sine(a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    cos = float(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))
    # near-parallel vectors can push cos^2 slightly above 1
    sin2 = min(max(1.0 - cos * cos, 0.0), 1.0)
    return float(np.sqrt(sin2))


def mix_distance(origin: DmuRecord, other: DmuRecord) -> float:
    """Input-mix sine plus output-mix sine."""
    _check_dims(origin, other)
    return mix_sine(origin.inputs, other.inputs) + mix_sine(origin.outputs, other.outputs)


def mix_hausdorff_to_set(origin: DmuRecord, peers: Iterable[DmuRecord]) -> float:
    peers = list(peers)
    if not peers:
        raise ValueError("peer set must be nonempty")
    return max(mix_distance(origin, p) for p in peers)


@dataclass(frozen=True)
class DistanceMatrix:
    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]
    entries: np.ndarray
    kind: str = L1

    def __getitem__(self, key: tuple[str, str]) -> float:
        r, c = key
        return float(self.entries[self.row_ids.index(r), self.col_ids.index(c)])

    def row(self, row_id: str) -> dict[str, float]:
        k = self.row_ids.index(row_id)
        return dict(zip(self.col_ids, (float(v) for v in self.entries[k])))

    def hausdorff(self, row_id: str, peers: Iterable[str]) -> float:
        """Largest entry of ``row_id`` over the ``peers`` columns."""
        peers = list(peers)
        if not peers:
            raise ValueError("peer set must be nonempty")
        return max(self[row_id, p] for p in peers)


def distance_matrix(
    d: Dataset,
    E: Sequence[str],
    kind: str = L1,
    rows: Optional[Sequence[str]] = None,
) -> DistanceMatrix:
    """Distances from each row DMU (default: all) to each member of ``E``."""
    if kind not in (L1, MIX):
        raise ValueError(f"unknown distance kind {kind!r}")
    rows = list(d.ids) if rows is None else list(rows)
    measure = weighted_l1 if kind == L1 else mix_distance
    row_recs = [d[r] for r in rows]
    col_recs = [d[c] for c in E]
    entries = np.array([[measure(o, p) for p in col_recs] for o in row_recs], dtype=float)
    return DistanceMatrix(tuple(rows), tuple(E), entries.reshape(len(rows), len(col_recs)), kind)

"""Efficiency status of each DMU and the set E of extreme efficient DMUs.

Both tests run on data divided by per-variable maxima, so the 1e-6
thresholds are scale-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .dataset import CONSTANT, VARIABLE, Dataset
from .lp import LpBuilder, LpStatus, NumericalBreakdown, solve_lp

SLACK_TOL = 1e-6


class Status(str, Enum):
    EFFICIENT = "efficient"
    EXTREME_EFFICIENT = "extreme_efficient"
    NONEXTREME_EFFICIENT = "nonextreme_efficient"
    INEFFICIENT = "inefficient"

    @property
    def is_efficient(self) -> bool:
        return self is not Status.INEFFICIENT


@dataclass(frozen=True)
class FrontierClassification:
    status: dict[str, Status]
    slacks: dict[str, np.ndarray] = field(repr=False)
    E: tuple[str, ...] = ()

    def efficient_ids(self) -> list[str]:
        return [k for k, s in self.status.items() if s.is_efficient]

    def inefficient_ids(self) -> list[str]:
        return [k for k, s in self.status.items() if s is Status.INEFFICIENT]


def additive_slack(
    d: Dataset,
    x: Sequence[float],
    y: Sequence[float],
    orientation: Optional[str] = None,
    rts: Optional[str] = None,
) -> tuple[float, np.ndarray]:
    """Largest unweighted slack sum of ``(x, y)`` against the whole PPS.

    Returns the optimum and the slack vector ``(s-, s+)``, both in units of
    the per-variable maxima. ``orientation="output"`` counts only output
    slacks with inputs capped at ``x``; ``"input"`` counts only input
    slacks with outputs floored at ``y``. Zero means efficient in that
    sense.
    """
    rts = d.rts if rts is None else rts
    xs = np.asarray(x, dtype=float) / d.input_scale
    ys = np.asarray(y, dtype=float) / d.output_scale
    X, Y = d.scaled_X, d.scaled_Y
    lp = LpBuilder()
    lam = [lp.add_var(f"lambda_{j}") for j in range(d.n)]
    sm = [lp.add_var(f"s-_{i}") for i in range(d.m)]
    sp = [lp.add_var(f"s+_{r}") for r in range(d.s)]
    for i in range(d.m):
        row = {lam[j]: X[j, i] for j in range(d.n)}
        row[sm[i]] = 1.0
        lp.add_row(row, "=", xs[i])
    for r in range(d.s):
        row = {lam[j]: Y[j, r] for j in range(d.n)}
        row[sp[r]] = -1.0
        lp.add_row(row, "=", ys[r])
    if rts == VARIABLE:
        lp.add_row({k: 1.0 for k in lam}, "=", 1.0)
    weights = {}
    if orientation in (None, "input"):
        weights.update({k: 1.0 for k in sm})
    if orientation in (None, "output"):
        weights.update({k: 1.0 for k in sp})
    lp.set_objective(weights, maximize=True)
    sol = solve_lp(lp.build())
    if sol.status is not LpStatus.OPTIMAL:
        raise NumericalBreakdown(f"additive model ended {sol.status.value}")
    return float(sol.objective), sol.x[len(lam):].copy()


def classify_efficiency(d: Dataset) -> FrontierClassification:
    """Efficient / inefficient status of each DMU by the additive model."""
    status = {}
    slacks = {}
    for rec in d.dmus:
        value, s = additive_slack(d, rec.inputs, rec.outputs)
        slacks[rec.id] = s * np.concatenate([d.input_scale, d.output_scale])
        status[rec.id] = Status.EFFICIENT if value <= SLACK_TOL else Status.INEFFICIENT
    return FrontierClassification(status, slacks)


def _equivalent(d: Dataset, a: int, b: int) -> bool:
    """Same point of the PPS generator set: identical, or on one ray under CRS."""
    va = np.concatenate([d.scaled_X[a], d.scaled_Y[a]])
    vb = np.concatenate([d.scaled_X[b], d.scaled_Y[b]])
    if d.rts == CONSTANT:
        va = va / np.linalg.norm(va)
        vb = vb / np.linalg.norm(vb)
    return bool(np.allclose(va, vb, rtol=0, atol=1e-12))


def representable(d: Dataset, k: int, others: Sequence[int]) -> bool:
    """Whether DMU ``k`` is a (convex, under VRS) combination of ``others``."""
    if not others:
        return False
    X, Y = d.scaled_X, d.scaled_Y
    lp = LpBuilder()
    lam = [lp.add_var(f"lambda_{j}") for j in others]
    for i in range(d.m):
        lp.add_row({v: X[j, i] for v, j in zip(lam, others)}, "=", X[k, i])
    for r in range(d.s):
        lp.add_row({v: Y[j, r] for v, j in zip(lam, others)}, "=", Y[k, r])
    if d.rts == VARIABLE:
        lp.add_row({v: 1.0 for v in lam}, "=", 1.0)
    lp.set_objective({})
    return solve_lp(lp.build()).status is LpStatus.OPTIMAL


def extreme_efficient_set(d: Dataset, c: FrontierClassification) -> tuple[str, ...]:
    """Ids (dataset order) of efficient DMUs not representable by the others.

    Among duplicates (or, under CRS, DMUs on a common ray) only the first
    occurrence can enter E.
    """
    E = []
    for k, rec in enumerate(d.dmus):
        if not c.status[rec.id].is_efficient:
            continue
        if any(_equivalent(d, j, k) for j in range(k)):
            continue
        others = [j for j in range(d.n) if j != k and not (j > k and _equivalent(d, j, k))]
        if not representable(d, k, others):
            E.append(rec.id)
    return tuple(E)


def classify(d: Dataset) -> FrontierClassification:
    """Full classification: efficiency, extremity and E."""
    base = classify_efficiency(d)
    E = extreme_efficient_set(d, base)
    members = set(E)
    status = {
        k: (
            Status.INEFFICIENT
            if s is Status.INEFFICIENT
            else Status.EXTREME_EFFICIENT if k in members else Status.NONEXTREME_EFFICIENT
        )
        for k, s in base.status.items()
    }
    return replace(base, status=status, E=E)

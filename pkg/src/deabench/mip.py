"""Branch-and-bound over LP relaxations with binaries and SOS1 pairs.

A pair ``(p, q)`` requires at least one of its two terms to vanish. A term
is either a variable index or :class:`Complement` of a binary, standing for
``1 - x``; zeroing a complement fixes the binary to one. Pairs are enforced
by disjunction (branch ``p = 0`` versus ``q = 0``) rather than big-M rows.

Search is depth-first: after a node branches, one child is explored at
once and the other waits in a heap ordered by the parent's bound. When a
dive ends, the open node with the best bound is resumed.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .lp import LinearProgram, LpEngine, LpStatus, WarmStart

INTEGRALITY_TOL = 1e-6
COMPLEMENTARITY_TOL = 1e-6
PRUNE_TOL = 1e-9
NODE_LIMIT = 100_000


class NodeLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Complement:
    """``1 - x[index]`` for a binary variable."""

    index: int


Term = Union[int, Complement]


@dataclass(frozen=True)
class MixedProgram:
    base: LinearProgram
    binaries: tuple[int, ...] = ()
    sos1_pairs: tuple[tuple[Term, Term], ...] = ()

    def __post_init__(self):
        n = self.base.n_vars
        for j in self.binaries:
            if not 0 <= j < n:
                raise ValueError(f"binary index {j} out of range")
        for pair in self.sos1_pairs:
            for t in pair:
                k = t.index if isinstance(t, Complement) else t
                if not 0 <= k < n:
                    raise ValueError(f"pair index {k} out of range")
                if isinstance(t, Complement) and k not in self.binaries:
                    raise ValueError(f"complemented term {k} must be a binary")


@dataclass
class MipSolution:
    status: LpStatus
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    nodes: int = 0
    incumbent_history: list[tuple[int, float]] = field(default_factory=list)
    root_warm: Optional[WarmStart] = None


def _term_value(x, t: Term) -> float:
    if isinstance(t, Complement):
        return 1.0 - x[t.index]
    return x[t]


def _zero_term(lower, upper, t: Term) -> bool:
    """Tighten bounds so that term ``t`` is zero; False if that is impossible."""
    if isinstance(t, Complement):
        if upper[t.index] < 1.0:
            return False
        lower[t.index] = 1.0
        return True
    if lower[t] > 0.0 or upper[t] < 0.0:
        return False
    lower[t] = 0.0
    upper[t] = 0.0
    return True


@dataclass
class _Node:
    lower: np.ndarray
    upper: np.ndarray
    bound: float
    warm: Optional[WarmStart]


def solve_mip(
    program: MixedProgram,
    node_limit: int = NODE_LIMIT,
    incumbent: Optional[np.ndarray] = None,
    lower: Optional[np.ndarray] = None,
    upper: Optional[np.ndarray] = None,
    cutoff: Optional[float] = None,
    warm: Optional[WarmStart] = None,
    engine: Optional[LpEngine] = None,
) -> MipSolution:
    """Global minimum (or maximum) of ``program`` by branch-and-bound.

    ``incumbent`` may seed the search with a known feasible point; it is
    trusted, not re-checked. ``lower`` / ``upper`` replace the variable
    bounds of ``program.base``. With a ``cutoff`` only points whose
    objective beats it are sought; the result is infeasible if none does.
    When one program is solved repeatedly under different bounds, pass its
    ``engine`` and the previous ``root_warm`` as ``warm`` to skip the cold
    start at the root.
    """
    lp = program.base
    sign = -1.0 if lp.maximize else 1.0
    engine = LpEngine(lp) if engine is None else engine
    binaries = np.array(program.binaries, dtype=int)
    lower0 = np.array(lp.lower if lower is None else lower, dtype=float)
    upper0 = np.array(lp.upper if upper is None else upper, dtype=float)
    if len(binaries):
        lower0[binaries] = np.maximum(lower0[binaries], 0.0)
        upper0[binaries] = np.minimum(upper0[binaries], 1.0)

    best_x: Optional[np.ndarray] = None
    best_val = np.inf if cutoff is None else sign * cutoff
    history: list[tuple[int, float]] = []
    if incumbent is not None:
        best_x = np.asarray(incumbent, dtype=float).copy()
        best_val = sign * float(lp.c @ best_x)
        history.append((0, sign * best_val))

    counter = itertools.count()
    heap: list[tuple[float, int, _Node]] = []
    current: Optional[_Node] = _Node(lower0, upper0, -np.inf, warm)
    nodes = 0
    root_warm = None

    while current is not None or heap:
        if current is None:
            bound, _, current = heapq.heappop(heap)
            if bound >= best_val - PRUNE_TOL:
                current = None
                continue
        node = current
        current = None
        nodes += 1
        if nodes > node_limit:
            raise NodeLimitExceeded(f"branch-and-bound exceeded {node_limit} nodes")

        sol = engine.solve(node.lower, node.upper, warm=node.warm)
        if nodes == 1:
            root_warm = sol.warm
        if sol.status is LpStatus.INFEASIBLE:
            continue
        if sol.status is LpStatus.UNBOUNDED:
            raise ValueError("LP relaxation is unbounded")
        val = sign * sol.objective
        if val >= best_val - PRUNE_TOL:
            continue
        x = sol.x

        branch = _pick_pair(x, program.sos1_pairs)
        if branch is None:
            branch = _pick_binary(x, binaries)
        if branch is None:
            best_x = x.copy()
            if len(binaries):
                best_x[binaries] = np.round(best_x[binaries])
            best_val = val
            history.append((nodes, sign * val))
            continue

        children = []
        for fix in branch:
            lo = node.lower.copy()
            hi = node.upper.copy()
            if fix(lo, hi):
                children.append(_Node(lo, hi, val, sol.warm))
        if not children:
            continue
        current = children[0]
        for child in children[1:]:
            heapq.heappush(heap, (val, next(counter), child))

    if best_x is None:
        return MipSolution(LpStatus.INFEASIBLE, nodes=nodes, incumbent_history=history, root_warm=root_warm)
    return MipSolution(
        LpStatus.OPTIMAL,
        x=best_x,
        objective=sign * best_val,
        nodes=nodes,
        incumbent_history=history,
        root_warm=root_warm,
    )


def _pick_pair(x, pairs: Sequence[tuple[Term, Term]]):
    # branch on the largest product: it mixes unit-scale weights with
    # unbounded gaps better than the smaller term alone
    worst = 0.0
    chosen = None
    for p, q in pairs:
        vp = abs(_term_value(x, p))
        vq = abs(_term_value(x, q))
        if min(vp, vq) <= COMPLEMENTARITY_TOL:
            continue
        viol = vp * vq
        if viol > worst:
            worst = viol
            # dive first into the side that moves the relaxation least
            first, second = (p, q) if vp <= vq else (q, p)
            chosen = (first, second)
    if chosen is None:
        return None
    first, second = chosen
    return (
        lambda lo, hi: _zero_term(lo, hi, first),
        lambda lo, hi: _zero_term(lo, hi, second),
    )


def _pick_binary(x, binaries: np.ndarray):
    if not len(binaries):
        return None
    vals = x[binaries]
    frac = np.abs(vals - np.round(vals))
    k = int(np.argmax(frac))
    if frac[k] <= INTEGRALITY_TOL:
        return None
    j = int(binaries[k])

    def down(lo, hi):
        if lo[j] > 0.0:
            return False
        hi[j] = 0.0
        return True

    def up(lo, hi):
        if hi[j] < 1.0:
            return False
        lo[j] = 1.0
        return True

    return (up, down) if vals[k] >= 0.5 else (down, up)

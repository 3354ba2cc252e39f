"""Dense bounded-variable revised simplex.

Variables carry their own bounds (lower may be ``-inf``, upper may be
``+inf``), so free variables and box constraints need no extra rows.
Inequality rows receive one slack column each. A cold start runs a
phase-1 over signed artificial columns; a warm start takes a previous
basis and restores primal feasibility with the dual simplex, which is
what branch-and-bound uses after tightening a bound.

The basis is refactorized at every iteration. Problems here have a few
dozen rows, so an LU of the basis costs less than the Python around it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.linalg.lapack import dgetrf, dgetri

FEAS_TOL = 1e-7
OPT_TOL = 1e-7

_PIVOT_TOL = 1e-9
_PRICE_TOL = 1e-9
_DEGENERATE_STEP = 1e-12

INF = float("inf")


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class NumericalBreakdown(RuntimeError):
    """Raised when the simplex cannot meet its residual tolerances."""


@dataclass(frozen=True)
class LinearProgram:
    """Dense LP: optimize ``c @ x`` subject to ``A x (senses) b`` and bounds.

    ``senses`` holds one of ``"<="``, ``"="``, ``">="`` per row.
    """

    c: np.ndarray
    A: np.ndarray
    senses: tuple[str, ...]
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    names: tuple[str, ...] = ()
    maximize: bool = False

    def __post_init__(self):
        n = len(self.c)
        if self.A.ndim != 2 or self.A.shape[1] != n:
            raise ValueError(f"constraint rows must have {n} coefficients, got shape {self.A.shape}")
        if self.A.shape[0] != len(self.b) or len(self.senses) != len(self.b):
            raise ValueError("row count mismatch between A, senses and b")
        if len(self.lower) != n or len(self.upper) != n:
            raise ValueError("bounds must have one entry per variable")
        if np.any(self.lower > self.upper):
            bad = int(np.argmax(self.lower > self.upper))
            raise ValueError(f"variable {bad} has lower bound above upper bound")
        for s in self.senses:
            if s not in ("<=", "=", ">="):
                raise ValueError(f"unknown constraint sense {s!r}")

    @property
    def n_vars(self) -> int:
        return len(self.c)

    @property
    def n_rows(self) -> int:
        return len(self.b)


class LpBuilder:
    """Incremental construction of a :class:`LinearProgram`.

    >>> lp = LpBuilder()
    >>> x = lp.add_var("x", lower=3.0)
    >>> lp.set_objective({x: 1.0})
    >>> solve_lp(lp.build()).x[0]
    3.0
    """

    def __init__(self):
        self._names: list[str] = []
        self._lower: list[float] = []
        self._upper: list[float] = []
        self._rows: list[dict[int, float]] = []
        self._senses: list[str] = []
        self._rhs: list[float] = []
        self._obj: dict[int, float] = {}
        self._maximize = False

    def add_var(self, name: str, lower: float = 0.0, upper: float = INF) -> int:
        self._names.append(name)
        self._lower.append(float(lower))
        self._upper.append(float(upper))
        return len(self._names) - 1

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float) -> int:
        self._rows.append(dict(coeffs))
        self._senses.append(sense)
        self._rhs.append(float(rhs))
        return len(self._rows) - 1

    def set_objective(self, coeffs: dict[int, float], maximize: bool = False) -> None:
        self._obj = dict(coeffs)
        self._maximize = maximize

    def build(self) -> LinearProgram:
        n = len(self._names)
        A = np.zeros((len(self._rows), n))
        for i, row in enumerate(self._rows):
            for j, a in row.items():
                A[i, j] += a
        c = np.zeros(n)
        for j, a in self._obj.items():
            c[j] += a
        return LinearProgram(
            c=c,
            A=A,
            senses=tuple(self._senses),
            b=np.array(self._rhs, dtype=float),
            lower=np.array(self._lower, dtype=float),
            upper=np.array(self._upper, dtype=float),
            names=tuple(self._names),
            maximize=self._maximize,
        )


@dataclass
class LpSolution:
    status: LpStatus
    x: Optional[np.ndarray] = None
    duals: Optional[np.ndarray] = None
    reduced_costs: Optional[np.ndarray] = None
    objective: Optional[float] = None
    basis: tuple[int, ...] = ()
    iterations: int = 0
    warm: Optional["WarmStart"] = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass(frozen=True)
class WarmStart:
    """Final basis of a solve, reusable when only bounds change."""

    basis: np.ndarray
    at_upper: np.ndarray


class _Singular(Exception):
    pass


class _Cycling(Exception):
    pass


def _nonbasic_values(lb, ub, at_upper):
    x = np.where(at_upper, ub, lb)
    return np.where(np.isfinite(x), x, 0.0)


class _Simplex:
    """Working state of one simplex run over ``A x = b, lb <= x <= ub``."""

    def __init__(self, A, b, c, lb, ub, basis, at_upper, bland=False):
        self.A = A
        self.b = b
        self.c = c
        self.lb = lb
        self.ub = ub
        self.basis = np.array(basis, dtype=int)
        self.at_upper = np.array(at_upper, dtype=bool)
        m, N = A.shape
        self.bland = bland
        self.iterations = 0
        self.max_iter = 50 * (m + N) + 1000
        self.degenerate_limit = 2 * (m + N)
        self._degenerate = 0
        self.free = ~np.isfinite(lb) & ~np.isfinite(ub)
        self.fixed = lb == ub
        self._lb0 = np.where(np.isfinite(lb), lb, 0.0)
        self._ub0 = np.where(np.isfinite(ub), ub, 0.0)
        self._refresh()

    def _refresh(self):
        # the bases here are small and dense, so an explicit inverse rebuilt
        # from a fresh LU every pivot is both cheap and stable
        lu, piv, info = dgetrf(self.A[:, self.basis])
        if info < 0:
            raise _Singular()
        pivots = np.abs(lu.diagonal())
        if not np.isfinite(pivots).all() or pivots.min() <= 1e-11 * max(1.0, pivots.max()):
            raise _Singular()
        Binv, info = dgetri(lu, piv)
        if info != 0:
            raise _Singular()
        self.Binv = Binv
        self.is_basic = np.zeros(self.A.shape[1], dtype=bool)
        self.is_basic[self.basis] = True
        x = np.where(self.at_upper, self._ub0, self._lb0)
        x[self.basis] = 0.0
        x[self.basis] = Binv @ (self.b - self.A @ x)
        self.x = x
        y = self.c[self.basis] @ Binv
        d = self.c - y @ self.A
        d[self.basis] = 0.0
        self.y = y
        self.d = d

    def _count_step(self, step):
        self.iterations += 1
        if self.iterations > self.max_iter:
            raise _Cycling()
        if step <= _DEGENERATE_STEP:
            self._degenerate += 1
            if self._degenerate > self.degenerate_limit:
                self.bland = True
        self._refresh()

    # -- primal ---------------------------------------------------------
    def primal(self) -> LpStatus:
        while True:
            d = self.d
            movable = ~self.is_basic & ~self.fixed
            can_up = movable & (~self.at_upper | self.free) & (d < -_PRICE_TOL)
            can_down = movable & (self.at_upper | self.free) & (d > _PRICE_TOL)
            eligible = can_up | can_down
            if not eligible.any():
                return LpStatus.OPTIMAL
            if self.bland:
                q = int(np.flatnonzero(eligible)[0])
            else:
                q = int(np.argmax(np.where(eligible, np.abs(d), -1.0)))
            direction = 1.0 if can_up[q] else -1.0

            w = self.Binv @ self.A[:, q]
            rate = -direction * w
            xB = self.x[self.basis]
            lbB = self.lb[self.basis]
            ubB = self.ub[self.basis]
            ratios = np.full(len(w), INF)
            dec = (rate < -_PIVOT_TOL) & np.isfinite(lbB)
            inc = (rate > _PIVOT_TOL) & np.isfinite(ubB)
            ratios[dec] = (xB[dec] - lbB[dec]) / -rate[dec]
            ratios[inc] = (ubB[inc] - xB[inc]) / rate[inc]
            ratios = np.maximum(ratios, 0.0)

            flip = self.ub[q] - self.lb[q] if not self.free[q] else INF
            best = ratios.min() if len(ratios) else INF
            if not np.isfinite(best) and not np.isfinite(flip):
                return LpStatus.UNBOUNDED
            if flip <= best:
                self.at_upper[q] = direction > 0
                self._count_step(flip)
                continue

            ties = np.flatnonzero(ratios <= best + 1e-12)
            if self.bland:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(ties[np.argmax(np.abs(w[ties]))])
            leaving = self.basis[r]
            self.at_upper[leaving] = rate[r] > 0
            self.basis[r] = q
            self.at_upper[q] = False
            self._count_step(best)

    # -- dual -----------------------------------------------------------
    def dual_feasible(self) -> bool:
        """Put boxed nonbasics on the bound their reduced cost favours."""
        d = self.d
        nb = ~self.is_basic & ~self.fixed
        bad_low = nb & ~self.at_upper & (d < -OPT_TOL)
        bad_up = nb & self.at_upper & (d > OPT_TOL)
        if np.any(bad_low & ~np.isfinite(self.ub)) or np.any(bad_up & ~np.isfinite(self.lb)):
            return False
        if np.any(nb & self.free & (np.abs(d) > OPT_TOL)):
            return False
        if bad_low.any() or bad_up.any():
            self.at_upper[bad_low] = True
            self.at_upper[bad_up] = False
            self._refresh()
        return True

    def dual(self) -> LpStatus:
        while True:
            xB = self.x[self.basis]
            lbB = self.lb[self.basis]
            ubB = self.ub[self.basis]
            below = lbB - xB
            above = xB - ubB
            infeas = np.maximum(below, above)
            if infeas.max(initial=0.0) <= 1e-9:
                return LpStatus.OPTIMAL
            if self.bland:
                cand = np.flatnonzero(infeas > 1e-9)
                r = int(cand[np.argmin(self.basis[cand])])
            else:
                r = int(np.argmax(infeas))
            to_lower = below[r] > above[r]

            alpha = self.Binv[r] @ self.A
            movable = ~self.is_basic & ~self.fixed
            up_ok = movable & (~self.at_upper | self.free)
            down_ok = movable & (self.at_upper | self.free)
            if to_lower:
                eligible = (up_ok & (alpha < -_PIVOT_TOL)) | (down_ok & (alpha > _PIVOT_TOL))
            else:
                eligible = (up_ok & (alpha > _PIVOT_TOL)) | (down_ok & (alpha < -_PIVOT_TOL))
            if not eligible.any():
                return LpStatus.INFEASIBLE
            idx = np.flatnonzero(eligible)
            ratios = np.abs(self.d[idx]) / np.abs(alpha[idx])
            best = ratios.min()
            ties = idx[ratios <= best + 1e-12]
            if self.bland:
                q = int(ties.min())
            else:
                q = int(ties[np.argmax(np.abs(alpha[ties]))])
            leaving = self.basis[r]
            step = abs(infeas[r])
            self.at_upper[leaving] = not to_lower
            self.basis[r] = q
            self.at_upper[q] = False
            self._count_step(step)

    # -- artificial clean-up ------------------------------------------------
    def drive_out(self, first_artificial: int) -> None:
        for r in range(len(self.basis)):
            if self.basis[r] < first_artificial:
                continue
            alpha = self.Binv[r] @ self.A
            alpha[self.is_basic] = 0.0
            alpha[first_artificial:] = 0.0
            q = int(np.argmax(np.abs(alpha)))
            if abs(alpha[q]) <= 1e-7:
                continue  # redundant row; the artificial stays basic at zero
            self.at_upper[self.basis[r]] = False
            self.basis[r] = q
            self.at_upper[q] = False
            self._refresh()


class LpEngine:
    """Standard-form image of a :class:`LinearProgram`, solvable many times
    under different variable bounds (the branch-and-bound use case)."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        n = lp.n_vars
        m = lp.n_rows
        ineq = [i for i, s in enumerate(lp.senses) if s != "="]
        S = np.zeros((m, len(ineq)))
        for k, i in enumerate(ineq):
            S[i, k] = 1.0 if lp.senses[i] == "<=" else -1.0
        self.n = n
        self.m = m
        self.A = np.hstack([lp.A.astype(float), S])
        self.b = lp.b.astype(float)
        c = -lp.c if lp.maximize else lp.c
        self.c = np.concatenate([c.astype(float), np.zeros(len(ineq))])
        self.slack_lb = np.zeros(len(ineq))
        self.slack_ub = np.full(len(ineq), INF)
        # columns with a single nonzero can start basic in place of an artificial
        nz = self.A != 0.0
        single = np.flatnonzero(nz.sum(axis=0) == 1)
        self._unit_cols = list(zip(single.tolist(), nz[:, single].argmax(axis=0).tolist()))

    def solve(
        self,
        lower: Optional[np.ndarray] = None,
        upper: Optional[np.ndarray] = None,
        warm: Optional[WarmStart] = None,
    ) -> LpSolution:
        lower = self.lp.lower if lower is None else lower
        upper = self.lp.upper if upper is None else upper
        if np.any(lower > upper):
            return LpSolution(LpStatus.INFEASIBLE)
        lb = np.concatenate([lower, self.slack_lb])
        ub = np.concatenate([upper, self.slack_ub])
        if self.m == 0:
            return self._solve_unconstrained(lb, ub)

        attempts = []
        if warm is not None:
            attempts.append(("warm", False))
        attempts += [("cold", False), ("cold", True)]
        last_error = None
        for mode, bland in attempts:
            try:
                if mode == "warm":
                    result = self._warm(lb, ub, warm)
                    if result is None:
                        continue
                else:
                    result = self._cold(lb, ub, bland)
            except (_Singular, _Cycling) as exc:
                last_error = exc
                continue
            if result.status is not LpStatus.OPTIMAL or self._acceptable(result, lb, ub):
                return result
            last_error = None
        raise NumericalBreakdown(
            "simplex could not satisfy residual tolerances"
            + (f" ({type(last_error).__name__})" if last_error else "")
        )

    def _solve_unconstrained(self, lb, ub):
        c = self.c
        x = np.where(c > 0, lb, np.where(c < 0, ub, np.where(np.isfinite(lb), lb, np.where(np.isfinite(ub), ub, 0.0))))
        if not np.all(np.isfinite(x)):
            return LpSolution(LpStatus.UNBOUNDED)
        return self._package(x, np.zeros(0), c.copy(), (), 0, None)

    def _cold(self, lb, ub, bland):
        m, N = self.A.shape
        at_upper = ~np.isfinite(lb) & np.isfinite(ub)
        x = _nonbasic_values(lb, ub, at_upper)
        resid = self.b - self.A @ x
        sign = np.where(resid >= 0, 1.0, -1.0)
        A1 = np.hstack([self.A, np.diag(sign)])
        lb1 = np.concatenate([lb, np.zeros(m)])
        ub1 = np.concatenate([ub, np.full(m, INF)])
        c1 = np.concatenate([np.zeros(N), np.ones(m)])
        basis = np.arange(N, N + m)
        for j, r in self._unit_cols:
            if basis[r] < N:
                continue
            value = x[j] + resid[r] / self.A[r, j]
            if lb[j] - FEAS_TOL <= value <= ub[j] + FEAS_TOL:
                basis[r] = j
        at_upper1 = np.concatenate([at_upper, np.zeros(m, dtype=bool)])
        sx = _Simplex(A1, self.b, c1, lb1, ub1, basis, at_upper1, bland=bland)
        sx.primal()
        infeasibility = float(sx.x[N:].sum())
        if infeasibility > FEAS_TOL * max(1.0, float(np.abs(self.b).max(initial=0.0))):
            return LpSolution(LpStatus.INFEASIBLE, iterations=sx.iterations)
        sx.drive_out(N)
        sx.ub = np.concatenate([ub, np.zeros(m)])
        sx.fixed = sx.lb == sx.ub
        sx.free = ~np.isfinite(sx.lb) & ~np.isfinite(sx.ub)
        sx.c = np.concatenate([self.c, np.zeros(m)])
        sx._refresh()
        status = sx.primal()
        if status is LpStatus.UNBOUNDED:
            return LpSolution(LpStatus.UNBOUNDED, iterations=sx.iterations)
        warm = None
        if np.all(sx.basis < N):
            warm = WarmStart(sx.basis.copy(), sx.at_upper[:N].copy())
        return self._package(sx.x[:N], sx.y, sx.d[:N], tuple(int(i) for i in sx.basis), sx.iterations, warm)

    def _warm(self, lb, ub, warm):
        if len(warm.basis) != self.m:
            return None
        # bounds may have loosened since the basis was saved: a nonbasic can
        # only rest on a finite bound
        at_upper = (warm.at_upper & np.isfinite(ub)) | (~np.isfinite(lb) & np.isfinite(ub))
        try:
            sx = _Simplex(self.A, self.b, self.c, lb, ub, warm.basis, at_upper)
        except _Singular:
            return None
        if not sx.dual_feasible():
            return None
        status = sx.dual()
        if status is LpStatus.INFEASIBLE:
            return LpSolution(LpStatus.INFEASIBLE, iterations=sx.iterations)
        status = sx.primal()
        if status is LpStatus.UNBOUNDED:
            return LpSolution(LpStatus.UNBOUNDED, iterations=sx.iterations)
        warm = WarmStart(sx.basis.copy(), sx.at_upper.copy())
        return self._package(sx.x, sx.y, sx.d, tuple(int(i) for i in sx.basis), sx.iterations, warm)

    def _package(self, x_full, y, d_full, basis, iterations, warm):
        n = self.n
        x = x_full[:n].copy()
        obj = float(self.lp.c @ x)
        sign = -1.0 if self.lp.maximize else 1.0
        sol = LpSolution(
            status=LpStatus.OPTIMAL,
            x=x,
            duals=sign * np.asarray(y, dtype=float),
            reduced_costs=sign * np.asarray(d_full[:n], dtype=float),
            objective=obj,
            basis=basis,
            iterations=iterations,
            warm=warm,
        )
        sol._x_full = np.asarray(x_full, dtype=float)
        sol._d_full = np.asarray(d_full, dtype=float)
        return sol

    def _acceptable(self, sol, lb, ub) -> bool:
        x = sol._x_full
        N = self.A.shape[1]
        x = x[:N]
        scale = 1.0 + np.abs(self.b).max(initial=0.0)
        if np.abs(self.A @ x - self.b).max(initial=0.0) > FEAS_TOL * scale:
            return False
        lo_tol = FEAS_TOL * (1 + np.abs(np.where(np.isfinite(lb), lb, 0.0)))
        hi_tol = FEAS_TOL * (1 + np.abs(np.where(np.isfinite(ub), ub, 0.0)))
        if np.any(x < lb - lo_tol) or np.any(x > ub + hi_tol):
            return False
        d = sol._d_full[:N]
        fixed = lb == ub
        at_lb = x <= lb + lo_tol
        at_ub = x >= ub - hi_tol
        cscale = 1.0 + np.abs(self.c).max(initial=0.0)
        bad = (~fixed) & (((d < -OPT_TOL * cscale) & ~at_ub) | ((d > OPT_TOL * cscale) & ~at_lb))
        return not bad.any()


def solve_lp(
    lp: LinearProgram,
    lower: Optional[Sequence[float]] = None,
    upper: Optional[Sequence[float]] = None,
) -> LpSolution:
    """Solve ``lp``, optionally overriding the variable bounds."""
    lo = None if lower is None else np.asarray(lower, dtype=float)
    hi = None if upper is None else np.asarray(upper, dtype=float)
    return LpEngine(lp).solve(lo, hi)

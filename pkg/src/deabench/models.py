"""Benchmarking models: closest targets plus most-similar reference sets.

Every model is assembled as one :class:`~deabench.mip.MixedProgram` over
data divided by per-variable maxima. Slack ratios ``s/x0`` and the peer
distances are unaffected by that scaling, and the ``v >= 1, u >= 1``
normalization of the supporting hyperplane is still only a choice of scale
for a strictly positive normal vector.

The five models differ along a few axes (see :data:`_SHAPES`):

* how deviations from the evaluated unit enter: as slacks that count in
  the projection distance, or as free input reductions / output expansions
  complementary to their hyperplane coefficient;
* the lower bounds on the hyperplane coefficients;
* returns to scale (convexity row and the offset ``u0``);
* the peer term (weighted L1 or mix sines) and how it is linked to ``lambda``;
* the weights of the two objective terms.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Optional, Sequence

import numpy as np

from .dataset import CONSTANT, VARIABLE, Dataset
from .frontier import SLACK_TOL, additive_slack
from .lp import INF, LinearProgram, LpBuilder, LpEngine, LpStatus, solve_lp
from .metrics import mix_distance, weighted_l1
from .mip import Complement, MixedProgram, MipSolution, solve_mip

CHECK_TOL = 1e-6
REFINE_SLACK = 1e-9


class ModelKind(str, Enum):
    CLOSEST = "closest"
    BI_VRS = "bi_vrs"
    ORIENTED_OUTPUT = "oriented_output"
    ORIENTED_INPUT = "oriented_input"
    BI_CRS = "bi_crs"

    @property
    def rts(self) -> str:
        return CONSTANT if self is ModelKind.BI_CRS else VARIABLE


class IncompatibleModel(ValueError):
    pass


class SolverFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class _Shape:
    inputs: str  # "slack" or "reduction"
    outputs: str
    v_lower: float
    u_lower: float
    peer: Optional[str]  # None, "l1" or "mix"

    def weights(self, kind: ModelKind, alpha: float, m: int, s: int) -> tuple[float, float]:
        """Objective weights of (projection distance, peer radius)."""
        if kind is ModelKind.CLOSEST:
            return 1.0, 0.0
        if kind is ModelKind.BI_VRS:
            return alpha, 1.0 - alpha
        if kind is ModelKind.ORIENTED_OUTPUT:
            return alpha / s, (1.0 - alpha) / (m + s)
        if kind is ModelKind.ORIENTED_INPUT:
            return alpha / m, (1.0 - alpha) / (m + s)
        return alpha / (m + s), (1.0 - alpha) / 2.0


_SHAPES = {
    ModelKind.CLOSEST: _Shape("slack", "slack", 1.0, 1.0, None),
    ModelKind.BI_VRS: _Shape("slack", "slack", 1.0, 1.0, "l1"),
    ModelKind.ORIENTED_OUTPUT: _Shape("reduction", "slack", 0.0, 1.0, "l1"),
    ModelKind.ORIENTED_INPUT: _Shape("slack", "reduction", 1.0, 0.0, "l1"),
    ModelKind.BI_CRS: _Shape("slack", "slack", 1.0, 1.0, "mix"),
}


@dataclass(frozen=True)
class SolveOptions:
    alpha: float = 1.0
    lambda_threshold: float = 1e-6
    endpoint_refine: bool = True

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.lambda_threshold <= 0:
            raise ValueError("lambda_threshold must be positive")


@dataclass(frozen=True)
class Hyperplane:
    """``-v.X + u.Y + u0 + delta_j = 0`` for every member j of E.

    ``v``, ``u``, ``u0`` and ``delta`` refer to data divided by the
    per-variable maxima, where the coefficient bounds hold. ``raw_*`` are
    the same hyperplane for unscaled data, rescaled so that its smallest
    bounded coefficient equals one.
    """

    v: tuple[float, ...]
    u: tuple[float, ...]
    u0: Optional[float]
    delta: dict[str, float]
    raw_v: tuple[float, ...] = ()
    raw_u: tuple[float, ...] = ()
    raw_u0: Optional[float] = None


@dataclass(frozen=True)
class Targets:
    inputs: tuple[float, ...]
    outputs: tuple[float, ...]


@dataclass(frozen=True)
class BenchmarkSolution:
    dmu_id: str
    model: ModelKind
    alpha: float
    targets: Targets
    input_slacks: tuple[float, ...]
    output_slacks: tuple[float, ...]
    lambdas: dict[str, float]
    reference_set: tuple[str, ...]
    hyperplane: Hyperplane
    d_proj: float
    d_H: float
    objective: float
    status: str = "optimal"
    nodes: int = 0

    @property
    def is_self_benchmark(self) -> bool:
        return self.status == "self"

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["model"] = self.model.value
        out["lambda"] = out.pop("lambdas")
        out["reference_set"] = list(self.reference_set)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BenchmarkSolution":
        h = data["hyperplane"]
        hp = Hyperplane(
            v=tuple(h["v"]),
            u=tuple(h["u"]),
            u0=h["u0"],
            delta=dict(h["delta"]),
            raw_v=tuple(h.get("raw_v", ())),
            raw_u=tuple(h.get("raw_u", ())),
            raw_u0=h.get("raw_u0"),
        )
        t = data["targets"]
        return cls(
            dmu_id=data["dmu_id"],
            model=ModelKind(data["model"]),
            alpha=float(data["alpha"]),
            targets=Targets(tuple(t["inputs"]), tuple(t["outputs"])),
            input_slacks=tuple(data["input_slacks"]),
            output_slacks=tuple(data["output_slacks"]),
            lambdas={k: float(v) for k, v in data["lambda"].items()},
            reference_set=tuple(data["reference_set"]),
            hyperplane=hp,
            d_proj=float(data["d_proj"]),
            d_H=float(data["d_H"]),
            objective=float(data["objective"]),
            status=data.get("status", "optimal"),
            nodes=int(data.get("nodes", 0)),
        )


# -- assembly ---------------------------------------------------------------


@dataclass
class _Assembly:
    kind: ModelKind
    shape: _Shape
    k: int
    E: tuple[str, ...]
    E_idx: np.ndarray
    lp: LinearProgram
    program: MixedProgram
    lam: list[int]
    delta: list[int]
    xin: list[int]
    xout: list[int]
    v: list[int]
    u: list[int]
    u0: Optional[int]
    z: Optional[int]
    I: list[int]
    proj: dict[int, float]
    proj_w: float
    peer_w: float
    dist: Optional[np.ndarray] = None


def _check_inputs(d: Dataset, E: Sequence[str], dmu_id: str, kind: ModelKind) -> None:
    if d.rts != kind.rts:
        raise IncompatibleModel(
            f"model {kind.value} requires {kind.rts} returns to scale, dataset is {d.rts}"
        )
    d.index(dmu_id)
    if not E:
        raise ValueError("E must be nonempty")
    for e in E:
        d.index(e)


@lru_cache(maxsize=4096)
def peer_distances(d: Dataset, E: tuple[str, ...], dmu_id: str, kind: str) -> np.ndarray:
    """Per-member peer scalars of one evaluated DMU, computed once per grid."""
    origin = d[dmu_id]
    measure = weighted_l1 if kind == "l1" else mix_distance
    return np.array([measure(origin, d[e]) for e in E], dtype=float)


def _assemble(d: Dataset, E: tuple[str, ...], dmu_id: str, kind: ModelKind, alpha: float) -> _Assembly:
    shape = _SHAPES[kind]
    k = d.index(dmu_id)
    E_idx = np.array([d.index(e) for e in E], dtype=int)
    X = d.scaled_X[E_idx]
    Y = d.scaled_Y[E_idx]
    x0 = d.scaled_X[k]
    y0 = d.scaled_Y[k]
    m, s, nE = d.m, d.s, len(E)
    vrs = kind.rts == VARIABLE
    proj_w, peer_w = shape.weights(kind, alpha, m, s)

    lp = LpBuilder()
    lam = [lp.add_var(f"lambda[{e}]") for e in E]
    delta = [lp.add_var(f"delta[{e}]") for e in E]
    xin = [lp.add_var(f"{'s-' if shape.inputs == 'slack' else 't'}[{i}]") for i in range(m)]
    xout = [lp.add_var(f"{'s+' if shape.outputs == 'slack' else 't'}[{r}]") for r in range(s)]
    v = [lp.add_var(f"v[{i}]", lower=shape.v_lower) for i in range(m)]
    u = [lp.add_var(f"u[{r}]", lower=shape.u_lower) for r in range(s)]
    u0 = lp.add_var("u0", lower=-INF) if vrs else None
    I: list[int] = []
    z = None
    if shape.peer is not None:
        I = [lp.add_var(f"I[{e}]", upper=1.0) for e in E]
        z = lp.add_var("z")

    for i in range(m):
        row = {lam[j]: X[j, i] for j in range(nE)}
        row[xin[i]] = 1.0
        lp.add_row(row, "=", x0[i])
    for r in range(s):
        row = {lam[j]: Y[j, r] for j in range(nE)}
        row[xout[r]] = -1.0
        lp.add_row(row, "=", y0[r])
    if vrs:
        lp.add_row({j: 1.0 for j in lam}, "=", 1.0)
    for j in range(nE):
        row = {v[i]: -X[j, i] for i in range(m)}
        row.update({u[r]: Y[j, r] for r in range(s)})
        if u0 is not None:
            row[u0] = 1.0
        row[delta[j]] = 1.0
        lp.add_row(row, "=", 0.0)

    pairs: list[tuple] = [(lam[j], delta[j]) for j in range(nE)]
    if shape.inputs == "reduction":
        pairs += [(v[i], xin[i]) for i in range(m)]
    if shape.outputs == "reduction":
        pairs += [(u[r], xout[r]) for r in range(s)]

    dist = None
    if shape.peer is not None:
        dist = peer_distances(d, E, dmu_id, shape.peer)
        for j in range(nE):
            if vrs:
                lp.add_row({lam[j]: 1.0, I[j]: -1.0}, "<=", 0.0)
            else:
                pairs.append((lam[j], Complement(I[j])))
            lp.add_row({I[j]: dist[j], z: -1.0}, "<=", 0.0)

    proj: dict[int, float] = {}
    if shape.inputs == "slack":
        proj.update({xin[i]: 1.0 / x0[i] for i in range(m)})
    if shape.outputs == "slack":
        proj.update({xout[r]: 1.0 / y0[r] for r in range(s)})
    objective = {j: proj_w * c for j, c in proj.items()}
    if z is not None:
        objective[z] = peer_w
    lp.set_objective(objective)
    base = lp.build()
    program = MixedProgram(base, tuple(I), tuple(pairs))
    return _Assembly(kind, shape, k, E, E_idx, base, program, lam, delta, xin, xout, v, u, u0, z, I, proj, proj_w, peer_w, dist)


def _threshold_search(
    asm: _Assembly, target: Optional[float] = None, refine: bool = True
) -> tuple[np.ndarray, int]:
    """Optimal point of a model with a peer term, refined toward a small radius.

    The radius ``z`` only matters through the largest peer distance among
    the members allowed into the reference set, so it takes one of the
    values ``dist_j``. For a threshold ``tau`` the indicators are fixed
    (``I_j = 1`` iff ``dist_j <= tau``), ``z = tau``, and what is left is a
    pairs-only program minimizing the projection distance ``P(tau)``.
    ``P`` is nonincreasing in ``tau`` and bounded below by ``P`` over all of
    E, which prunes the scan. Among thresholds whose scalarized value is
    within ``REFINE_SLACK`` of the optimum (or of ``target``), the smallest
    is returned: the minimum radius at that value, or the minimum
    projection distance when ``alpha = 0``. Without ``refine`` the largest
    optimal threshold is kept instead.
    """
    base = asm.lp
    gated = np.zeros(base.n_vars, dtype=bool)
    gated[asm.I] = True
    gated[asm.z] = True
    # with I and z fixed, their linking rows are bounds and can go
    rows = ~np.any(base.A[:, gated] != 0.0, axis=1)
    keep = np.flatnonzero(~gated)
    new_index = {int(old): k for k, old in enumerate(keep)}
    c = np.zeros(base.n_vars)
    for j, coef in asm.proj.items():
        c[j] = coef
    reduced = LinearProgram(
        c=c[keep],
        A=base.A[rows][:, keep],
        senses=tuple(sn for sn, r in zip(base.senses, rows) if r),
        b=base.b[rows],
        lower=base.lower[keep],
        upper=base.upper[keep],
    )
    pairs = tuple(
        (new_index[p], new_index[q])
        for p, q in asm.program.sos1_pairs
        if not isinstance(p, Complement) and not isinstance(q, Complement)
    )
    program = MixedProgram(reduced, (), pairs)
    engine = LpEngine(reduced)
    warm = None
    lam_new = [new_index[j] for j in asm.lam]
    taus = np.unique(asm.dist)
    nodes = 0

    def project(tau: float, cutoff: Optional[float]):
        nonlocal nodes, warm
        upper = reduced.upper.astype(float).copy()
        allowed = asm.dist <= tau
        for j in np.flatnonzero(~allowed):
            upper[lam_new[j]] = 0.0
        sol = solve_mip(program, upper=upper, cutoff=cutoff, warm=warm, engine=engine)
        nodes += sol.nodes
        warm = sol.root_warm or warm
        if sol.status is not LpStatus.OPTIMAL:
            return None
        x = np.zeros(base.n_vars)
        x[keep] = sol.x
        x[asm.I] = allowed.astype(float)
        x[asm.z] = tau
        return float(sol.objective), x

    def value(tau, p):
        return asm.proj_w * p + asm.peer_w * tau

    full = project(float(taus[-1]), None)
    if full is None:
        raise SolverFailure("mixed program infeasible; every benchmarking model should be feasible")
    p_min = full[0]
    found = {float(taus[-1]): full}
    best = value(taus[-1], p_min) if target is None else target

    if asm.peer_w == 0.0 and not refine:
        return _fix_radius(asm, full[1], float(taus[-1])), nodes
    if asm.peer_w == 0.0:
        # P(tau) is monotone: bisect for the first threshold reaching P over E
        lo, hi = 0, len(taus) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            res = project(float(taus[mid]), (best + 2 * REFINE_SLACK) / asm.proj_w)
            if res is not None and value(taus[mid], res[0]) <= best + REFINE_SLACK:
                found[float(taus[mid])] = res
                hi = mid
            else:
                lo = mid + 1
        tau = float(taus[lo])
        return _fix_radius(asm, found[tau][1], tau), nodes

    for tau in taus[:-1]:
        tau = float(tau)
        if value(tau, p_min) > best + REFINE_SLACK:
            break
        cutoff = None
        if asm.proj_w > 0.0:
            cutoff = (best + 2 * REFINE_SLACK - asm.peer_w * tau) / asm.proj_w
        res = project(tau, cutoff)
        if res is None:
            continue
        found[tau] = res
        if target is None:
            best = min(best, value(tau, res[0]))
    for tau in sorted(found, reverse=not refine):
        if value(tau, found[tau][0]) <= best + REFINE_SLACK:
            return _fix_radius(asm, found[tau][1], tau), nodes
    raise SolverFailure("no solution within the refinement budget")


def _fix_radius(asm: _Assembly, x: np.ndarray, tau: float) -> np.ndarray:
    x = x.copy()
    x[asm.z] = tau
    return x


def _run(program: MixedProgram, incumbent=None) -> MipSolution:
    sol = solve_mip(program, incumbent=incumbent)
    if sol.status is not LpStatus.OPTIMAL:
        raise SolverFailure("mixed program infeasible; every benchmarking model should be feasible")
    return sol


# -- decoding ---------------------------------------------------------------


def _normalized_raw(d: Dataset, shape: _Shape, v, u, u0):
    raw_v = np.asarray(v) / d.input_scale
    raw_u = np.asarray(u) / d.output_scale
    bounded = []
    if shape.v_lower > 0:
        bounded.extend(raw_v)
    if shape.u_lower > 0:
        bounded.extend(raw_u)
    scale = min(bounded) if bounded else 1.0
    if scale <= 0:
        scale = 1.0
    return (
        tuple(float(a) for a in raw_v / scale),
        tuple(float(a) for a in raw_u / scale),
        None if u0 is None else float(u0) / scale,
    )


def _decode(asm: _Assembly, d: Dataset, x: np.ndarray, alpha: float, opts: SolveOptions, nodes: int) -> BenchmarkSolution:
    rec = d.dmus[asm.k]
    lam = {e: float(x[j]) for e, j in zip(asm.E, asm.lam)}
    rs = tuple(e for e in asm.E if lam[e] > opts.lambda_threshold)
    sin = x[asm.xin] * d.input_scale
    sout = x[asm.xout] * d.output_scale
    targets = Targets(
        tuple(float(a) for a in np.asarray(rec.inputs) - sin),
        tuple(float(a) for a in np.asarray(rec.outputs) + sout),
    )
    d_proj = float(sum(coef * x[j] for j, coef in asm.proj.items()))
    if asm.shape.peer == "mix":
        d_H = max((mix_distance(rec, d[e]) for e in rs), default=0.0)
    else:
        d_H = max((weighted_l1(rec, d[e]) for e in rs), default=0.0)
    z = float(x[asm.z]) if asm.z is not None else 0.0
    objective = asm.proj_w * d_proj + asm.peer_w * z
    v = x[asm.v]
    u = x[asm.u]
    u0 = float(x[asm.u0]) if asm.u0 is not None else None
    raw_v, raw_u, raw_u0 = _normalized_raw(d, asm.shape, v, u, u0)
    hp = Hyperplane(
        v=tuple(float(a) for a in v),
        u=tuple(float(a) for a in u),
        u0=u0,
        delta={e: float(x[j]) for e, j in zip(asm.E, asm.delta)},
        raw_v=raw_v,
        raw_u=raw_u,
        raw_u0=raw_u0,
    )
    return BenchmarkSolution(
        dmu_id=rec.id,
        model=asm.kind,
        alpha=alpha,
        targets=targets,
        input_slacks=tuple(float(a) for a in sin),
        output_slacks=tuple(float(a) for a in sout),
        lambdas=lam,
        reference_set=rs,
        hyperplane=hp,
        d_proj=d_proj,
        d_H=float(d_H),
        objective=float(objective),
        status="optimal",
        nodes=nodes,
    )


def _self_solution(d: Dataset, E: tuple[str, ...], dmu_id: str, kind: ModelKind, alpha: float) -> BenchmarkSolution:
    """An extreme efficient DMU benchmarks against itself at zero cost."""
    shape = _SHAPES[kind]
    rec = d[dmu_id]
    E_idx = [d.index(e) for e in E]
    X = d.scaled_X[E_idx]
    Y = d.scaled_Y[E_idx]
    lp = LpBuilder()
    v = [lp.add_var(f"v[{i}]", lower=shape.v_lower) for i in range(d.m)]
    u = [lp.add_var(f"u[{r}]", lower=shape.u_lower) for r in range(d.s)]
    u0 = lp.add_var("u0", lower=-INF) if kind.rts == VARIABLE else None
    delta = []
    for j, e in enumerate(E):
        dj = lp.add_var(f"delta[{e}]", upper=0.0 if e == dmu_id else INF)
        delta.append(dj)
        row = {v[i]: -X[j, i] for i in range(d.m)}
        row.update({u[r]: Y[j, r] for r in range(d.s)})
        if u0 is not None:
            row[u0] = 1.0
        row[dj] = 1.0
        lp.add_row(row, "=", 0.0)
    lp.set_objective({j: 1.0 for j in v + u})
    sol = solve_lp(lp.build())
    if sol.status is not LpStatus.OPTIMAL:
        raise SolverFailure(f"no supporting hyperplane through extreme efficient DMU {dmu_id!r}")
    x = sol.x
    hv = x[v]
    hu = x[u]
    hu0 = float(x[u0]) if u0 is not None else None
    raw_v, raw_u, raw_u0 = _normalized_raw(d, shape, hv, hu, hu0)
    hp = Hyperplane(
        v=tuple(float(a) for a in hv),
        u=tuple(float(a) for a in hu),
        u0=hu0,
        delta={e: float(x[j]) for e, j in zip(E, delta)},
        raw_v=raw_v,
        raw_u=raw_u,
        raw_u0=raw_u0,
    )
    return BenchmarkSolution(
        dmu_id=dmu_id,
        model=kind,
        alpha=alpha,
        targets=Targets(rec.inputs, rec.outputs),
        input_slacks=(0.0,) * d.m,
        output_slacks=(0.0,) * d.s,
        lambdas={e: (1.0 if e == dmu_id else 0.0) for e in E},
        reference_set=(dmu_id,),
        hyperplane=hp,
        d_proj=0.0,
        d_H=0.0,
        objective=0.0,
        status="self",
    )


# -- public solves ------------------------------------------------------------


def solve(
    kind: ModelKind | str,
    d: Dataset,
    E: Sequence[str],
    dmu_id: str,
    opts: Optional[SolveOptions] = None,
) -> BenchmarkSolution:
    """Benchmark ``dmu_id`` with model ``kind`` against the extreme efficient set ``E``."""
    kind = ModelKind(kind)
    opts = opts or SolveOptions()
    E = tuple(E)
    _check_inputs(d, E, dmu_id, kind)
    alpha = 1.0 if kind is ModelKind.CLOSEST else float(opts.alpha)
    if dmu_id in E:
        return _self_solution(d, E, dmu_id, kind, alpha)
    asm = _assemble(d, E, dmu_id, kind, alpha)
    if asm.z is None:
        sol = _run(asm.program)
        return _decode(asm, d, sol.x, alpha, opts, sol.nodes)
    x, nodes = _threshold_search(asm, refine=opts.endpoint_refine)
    return _decode(asm, d, x, alpha, opts, nodes)


def solve_closest(d: Dataset, E: Sequence[str], dmu_id: str) -> BenchmarkSolution:
    return solve(ModelKind.CLOSEST, d, E, dmu_id)


def solve_bi_vrs(d: Dataset, E: Sequence[str], dmu_id: str, opts: Optional[SolveOptions] = None) -> BenchmarkSolution:
    return solve(ModelKind.BI_VRS, d, E, dmu_id, opts)


def solve_oriented_output(d: Dataset, E: Sequence[str], dmu_id: str, opts: Optional[SolveOptions] = None) -> BenchmarkSolution:
    return solve(ModelKind.ORIENTED_OUTPUT, d, E, dmu_id, opts)


def solve_oriented_input(d: Dataset, E: Sequence[str], dmu_id: str, opts: Optional[SolveOptions] = None) -> BenchmarkSolution:
    return solve(ModelKind.ORIENTED_INPUT, d, E, dmu_id, opts)


def solve_bi_crs(d: Dataset, E: Sequence[str], dmu_id: str, opts: Optional[SolveOptions] = None) -> BenchmarkSolution:
    return solve(ModelKind.BI_CRS, d, E, dmu_id, opts)


def endpoint_refine(
    sol: BenchmarkSolution,
    d: Dataset,
    E: Sequence[str],
    opts: Optional[SolveOptions] = None,
) -> BenchmarkSolution:
    """Among solutions whose scalarized objective stays within 1e-9 of
    ``sol.objective``, pick one minimizing the term the scalarization
    neglects: the peer radius, or at ``alpha = 0`` the projection distance.
    """
    opts = opts or SolveOptions(alpha=sol.alpha)
    E = tuple(E)
    if sol.is_self_benchmark or sol.model is ModelKind.CLOSEST:
        return sol
    asm = _assemble(d, E, sol.dmu_id, sol.model, sol.alpha)
    x, nodes = _threshold_search(asm, target=sol.objective)
    return _decode(asm, d, x, sol.alpha, opts, nodes)


# -- validation ---------------------------------------------------------------


def validate_solution(sol: BenchmarkSolution, d: Dataset, E: Sequence[str], tol: float = CHECK_TOL) -> list[str]:
    """Every violated solution invariant (empty when the solution is sound).

    Quantities are compared after dividing each variable by its dataset
    maximum, the space in which the model is solved.
    """
    shape = _SHAPES[sol.model]
    problems = []
    E = tuple(E)
    rec = d[sol.dmu_id]
    xs = d.input_scale
    ys = d.output_scale
    x0 = np.asarray(rec.inputs) / xs
    y0 = np.asarray(rec.outputs) / ys
    xt = np.asarray(sol.targets.inputs) / xs
    yt = np.asarray(sol.targets.outputs) / ys

    if np.any(xt > x0 + tol) or np.any(yt < y0 - tol):
        problems.append("domination: targets do not dominate the evaluated DMU")

    unknown = set(sol.lambdas) - set(E)
    if unknown:
        problems.append(f"recombination: lambda on non-members of E {sorted(unknown)}")
    lam = np.array([sol.lambdas.get(e, 0.0) for e in E])
    idx = [d.index(e) for e in E]
    X = d.scaled_X[idx]
    Y = d.scaled_Y[idx]
    if np.any(lam < -tol):
        problems.append("recombination: negative lambda")
    if np.abs(lam @ X - xt).max() > tol or np.abs(lam @ Y - yt).max() > tol:
        problems.append("recombination: targets differ from the lambda combination of E")
    if sol.model.rts == VARIABLE and abs(lam.sum() - 1.0) > tol:
        problems.append(f"convexity: sum of lambda is {lam.sum():.9g}, expected 1")

    for e in sol.reference_set:
        if e not in E:
            problems.append(f"reference set: {e!r} is not extreme efficient")
        elif sol.lambdas.get(e, 0.0) <= 0.0:
            problems.append(f"reference set: {e!r} has no weight")

    hp = sol.hyperplane
    v = np.asarray(hp.v)
    u = np.asarray(hp.u)
    u0 = 0.0 if hp.u0 is None else hp.u0
    if sol.model.rts == CONSTANT and hp.u0 not in (None, 0.0):
        problems.append("hyperplane: CRS hyperplane must not carry an offset")
    if np.any(v < shape.v_lower - tol) or np.any(u < shape.u_lower - tol):
        problems.append("coefficient bounds: hyperplane coefficients below their lower bounds")
    delta = np.array([hp.delta.get(e, np.nan) for e in E])
    if np.any(np.isnan(delta)):
        problems.append("hyperplane: missing residual for some member of E")
    else:
        resid = -X @ v + Y @ u + u0 + delta
        if np.abs(resid).max() > tol:
            problems.append(f"hyperplane residual {np.abs(resid).max():.3g} exceeds tolerance")
        if np.any(delta < -tol):
            problems.append("hyperplane: negative delta (hyperplane does not support the PPS)")
        if np.any(lam * delta > tol):
            problems.append("complementarity: lambda_j * delta_j > 0 for some member of E")
    if shape.inputs == "reduction" and np.any(v * (np.asarray(sol.input_slacks) / xs) > tol):
        problems.append("complementarity: v_i * t_i > 0")
    if shape.outputs == "reduction" and np.any(u * (np.asarray(sol.output_slacks) / ys) > tol):
        problems.append("complementarity: u_r * t_r > 0")

    measure = mix_distance if shape.peer == "mix" else weighted_l1
    for e in sol.reference_set:
        if e in E and measure(rec, d[e]) > sol.d_H + tol:
            problems.append(f"peer radius: d_H below the distance to {e!r}")

    if shape.inputs == "reduction":
        value, _ = additive_slack(d, rec.inputs, sol.targets.outputs, orientation="output", rts=sol.model.rts)
    elif shape.outputs == "reduction":
        value, _ = additive_slack(d, sol.targets.inputs, rec.outputs, orientation="input", rts=sol.model.rts)
    else:
        value, _ = additive_slack(d, sol.targets.inputs, sol.targets.outputs, rts=sol.model.rts)
    if value > SLACK_TOL:
        problems.append(f"on-frontier: target is not efficient (additive slack {value:.3g})")
    return problems

"""Even-power rewriting of plans and numerical probes of GRK optimality.

Scans run in the large-block limit: every segment is described by its phase
(``2 j theta1`` for G1, ``2 j theta2`` for G2) and G1 segments also carry a
parity ``(-1)**j``. Phases turn into query counts through the leading-order
conversion ``j1 = phase * sqrt(N) / 2`` and ``j2 = phase * sqrt(N/K) / 2``.
The last unknown phase of every sequence is solved analytically: the ``<u|``
amplitude is ``A cos x + B sin x + C`` in it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from partialsearch.core import IterationPlan
from partialsearch.planner import asymptotic_queries, optimal_params
from partialsearch.reduced import g1_rotation, g2_rotation

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


# --------------------------------------------------------------------------
# even-power normalization


def _merge(steps):
    out: list[list] = []
    for kind, power in steps:
        if power == 0 and kind != "Ga":
            continue
        if out and out[-1][0] == kind and kind != "Ga":
            out[-1][1] += power
        else:
            out.append([kind, power])
    return out


def normalize_even(plan: IterationPlan) -> IterationPlan:
    """Rewrite a G1/G2 plan using only even powers of G1 plus ``Ga`` factors.

    If the total number of G1 factors is odd, one G1 is appended on the right
    (it acts first, on ``|s1>``, which it nearly fixes). Odd G1 segments then
    pair up left to right; for each pair the identity

        G1 G2^k1 G1^(2m1) G2^k2 ... G2^kr G1 = Ga^k1 G1^(2m1-2) Ga^k2 ... Ga^kr

    is exact, so only the parity fix changes the action.
    """
    if any(k == "Ga" for k, _ in plan.steps):
        raise ValueError("normalize_even expects a plan over G1 and G2 only")
    steps = _merge(plan.steps)
    if sum(p for k, p in steps if k == "G1") % 2:
        steps = _merge([tuple(s) for s in steps] + [("G1", 1)])

    odd = [i for i, (k, p) in enumerate(steps) if k == "G1" and p % 2]
    out = [list(s) for s in steps]
    for left, right in zip(odd[0::2], odd[1::2]):
        out[left][1] -= 1
        out[right][1] -= 1
        for i in range(left + 1, right):
            if out[i][0] == "G2":
                out[i][0] = "Ga"
            else:
                out[i][1] -= 2
    return IterationPlan(tuple((k, p) for k, p in out if p > 0 or k == "Ga"))


# --------------------------------------------------------------------------
# limit-model helpers


def _affine_parts(matrix_of_phase):
    """``M(x) = P0 + cos(x) Pc + sin(x) Ps`` for a phase-parametrised matrix."""
    m0, m1, m2 = matrix_of_phase(0.0), matrix_of_phase(math.pi / 2), matrix_of_phase(math.pi)
    p0 = (m0 + m2) / 2
    return p0, (m0 - m2) / 2, m1 - p0


def smallest_root(A, B, C):
    """Smallest ``x`` in ``[0, 2 pi)`` with ``A cos x + B sin x + C = 0`` (NaN if none)."""
    A, B, C = np.broadcast_arrays(*(np.asarray(z, dtype=float) for z in (A, B, C)))
    R = np.hypot(A, B)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = -C / R
    ok = (R > 1e-15) & (np.abs(ratio) <= 1 + 1e-12)
    delta = np.arctan2(B, A)
    spread = np.arccos(np.clip(ratio, -1.0, 1.0))
    r1 = np.mod(delta + spread, TWO_PI)
    r2 = np.mod(delta - spread, TWO_PI)
    r1 = np.where(r1 > TWO_PI - 1e-13, 0.0, r1)
    r2 = np.where(r2 > TWO_PI - 1e-13, 0.0, r2)
    return np.where(ok, np.minimum(r1, r2), np.nan)


@dataclass(frozen=True)
class LimitModel:
    """Large-block three-dimensional model for ``K`` blocks."""

    K: int

    @property
    def gamma(self) -> float:
        return math.asin(1 / math.sqrt(self.K))

    def s1(self) -> np.ndarray:
        g = self.gamma
        return np.array([0.0, math.sin(g), math.cos(g)])

    def g1(self, phase: float, parity: int) -> np.ndarray:
        return g1_rotation(phase, self.gamma, parity)

    def g1_parts(self, parity: int):
        return _affine_parts(lambda x: g1_rotation(x, self.gamma, parity))

    def cost(self, g1_phase, g2_phase):
        """Queries divided by ``sqrt(N)``."""
        return 0.5 * np.asarray(g1_phase) + 0.5 * math.sin(self.gamma) * np.asarray(g2_phase)


def _g2_batch(v: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """``g2_rotation(phase) @ v`` for every phase: (..., 3) x (n,) -> (..., n, 3)."""
    c, s = np.cos(phases), np.sin(phases)
    t, n, u = v[..., 0, None], v[..., 1, None], v[..., 2, None]
    rt = c * t + s * n
    return np.stack([rt, -s * t + c * n, np.broadcast_to(u, rt.shape)], axis=-1)


# --------------------------------------------------------------------------
# three-segment scan from |s1>


@dataclass
class ScanReport:
    K: int
    grid_step: float
    best_plan: tuple[float, ...]
    best_queries: float
    grk_queries: float
    counterexamples: list = field(default_factory=list)
    N: int | None = None
    units: str = "queries"
    records: list = field(default_factory=list)
    excluded: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "K": self.K, "N": self.N, "grid_step": self.grid_step, "units": self.units,
            "best_plan": list(self.best_plan), "best_queries": self.best_queries,
            "grk_queries": self.grk_queries, "counterexamples": self.counterexamples,
            "excluded": self.excluded, "records": self.records,
        }


def _grk_first_phase(model: LimitModel, g2_phase):
    """Phase of the first G1 in ``G1 G2 G1^j1 |s1>`` making ``<u|d> = 0``."""
    last_row = model.g1(0.0, -1)[2]
    p0, pc, ps = model.g1_parts(1)
    s1 = model.s1()
    vecs = np.stack([p0 @ s1, pc @ s1, ps @ s1])  # constant, cos, sin parts
    rotated = _g2_batch(vecs, np.atleast_1d(g2_phase))  # (3, n, 3)
    C, A, B = (rotated[i] @ last_row for i in range(3))
    return smallest_root(A, B, C)


def scan_three_segment(K: int, N: int, grid_step: float, keep_records: bool = False) -> ScanReport:
    """Minimise ``j1 + j2`` over ``G1 G2^j2 G1^j1 |s1>`` with ``<u|d> = 0``.

    ``grid_step`` is in units of ``j2``. The best grid cell is refined with a
    bounded 1-D search along the zero curve.
    """
    if K < 3:
        raise ValueError("scan_three_segment needs K >= 3")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    model = LimitModel(K)
    j1_per_phase = math.sqrt(N) / 2
    j2_per_phase = math.sqrt(N / K) / 2
    j2_grid = np.arange(0.0, math.pi * j2_per_phase, grid_step)
    phi1 = _grk_first_phase(model, j2_grid / j2_per_phase)
    queries = phi1 * j1_per_phase + j2_grid
    if np.all(np.isnan(queries)):
        raise RuntimeError("no zero-amplitude three-segment plan on the grid")
    i = int(np.nanargmin(queries))

    def total(j2):
        p = _grk_first_phase(model, j2 / j2_per_phase)[0]
        return np.inf if np.isnan(p) else p * j1_per_phase + j2

    lo, hi = max(j2_grid[i] - grid_step, 0.0), j2_grid[i] + grid_step
    res = minimize_scalar(total, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    j2 = float(res.x)
    j1 = float(_grk_first_phase(model, j2 / j2_per_phase)[0] * j1_per_phase)
    best = j1 + j2
    grk = asymptotic_queries(N, K)

    d = (model.g1(0.0, -1) @ g2_rotation(j2 / j2_per_phase)
         @ model.g1(j1 / j1_per_phase, 1) @ model.s1())
    if abs(d[2]) > 1e-9:
        log.warning("refined three-segment plan has |<u|d>| = %.3g", abs(d[2]))

    counter = [
        {"j1": float(q - j), "j2": float(j), "queries": float(q)}
        for j, q in zip(j2_grid, queries)
        if not math.isnan(q) and q < grk - grid_step
    ]
    records = [
        {"j2": float(j), "j1": (None if math.isnan(q) else float(q - j)),
         "queries": (None if math.isnan(q) else float(q))}
        for j, q in zip(j2_grid, queries)
    ] if keep_records else []
    return ScanReport(K=K, N=N, grid_step=grid_step, best_plan=(j1, j2), best_queries=best,
                      grk_queries=grk, counterexamples=counter, records=records)


# --------------------------------------------------------------------------
# conjecture probe


@dataclass
class _Best:
    cost: float
    params: tuple  # (psi, phi1, phi2, phi3, p1, p3)


def _three_segment_costs(model: LimitModel, start: np.ndarray, phi1: np.ndarray, phi2: np.ndarray,
                         p1: int, p3: int):
    """Cost and last phase of ``G1^(phi3,p3) G2^phi2 G1^(phi1,p1) |start>`` on a grid."""
    P0, Pc, Ps = model.g1_parts(p1)
    v1 = (np.outer(np.ones_like(phi1), P0 @ start) + np.outer(np.cos(phi1), Pc @ start)
          + np.outer(np.sin(phi1), Ps @ start))  # (n1, 3)
    v2 = _g2_batch(v1, phi2)  # (n1, n2, 3)
    Q0, Qc, Qs = model.g1_parts(p3)
    C, A, B = v2 @ Q0[2], v2 @ Qc[2], v2 @ Qs[2]
    phi3 = smallest_root(A, B, C)
    cost = model.cost(phi1[:, None] + phi3, phi2[None, :])
    return cost, phi3


def _min_three_segment(model: LimitModel, start: np.ndarray, bound: float, step: float,
                       refine: bool = True) -> _Best | None:
    grid = np.arange(0.0, bound, step)
    candidates = []
    for p1 in (1, -1):
        for p3 in (1, -1):
            cost, phi3 = _three_segment_costs(model, start, grid, grid, p1, p3)
            if np.all(np.isnan(cost)):
                continue
            i, k = np.unravel_index(np.nanargmin(cost), cost.shape)
            candidates.append(_Best(float(cost[i, k]), (0.0, grid[i], grid[k], float(phi3[i, k]), p1, p3)))
    if not candidates:
        return None
    if refine:
        candidates = [_refine3(model, start, c, bound) for c in candidates]
    return min(candidates, key=lambda c: c.cost)


def _refine3(model, start, cand: _Best, bound) -> _Best:
    _, a, b, _, p1, p3 = cand.params

    def f(x):
        if x[0] < 0 or x[1] < 0 or x[0] > bound or x[1] > bound:
            return np.inf
        cost, _ = _three_segment_costs(model, start, np.array([x[0]]), np.array([x[1]]), p1, p3)
        c = cost[0, 0]
        return np.inf if np.isnan(c) else float(c)

    res = minimize(f, [a, b], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "initial_simplex": _simplex([a, b])})
    if not res.fun < cand.cost:
        return cand
    cost, phi3 = _three_segment_costs(model, start, np.array([res.x[0]]), np.array([res.x[1]]), p1, p3)
    return _Best(float(cost[0, 0]), (0.0, float(res.x[0]), float(res.x[1]), float(phi3[0, 0]), p1, p3))


def _simplex(x0, scale=0.02):
    x0 = np.asarray(x0, dtype=float)
    pts = [x0]
    for i in range(len(x0)):
        e = np.zeros_like(x0)
        e[i] = scale
        pts.append(x0 + e)
    return np.array(pts)


def _min_four_segment(model: LimitModel, start: np.ndarray, ceiling: float, bound: float,
                      step: float) -> _Best:
    """Cheapest ``G1 G2 G1 G2^psi`` solution; ``psi = 0`` reproduces three segments."""
    sg = math.sin(model.gamma)
    psi_max = min(bound, 2 * ceiling / sg)
    best = None
    for psi in np.arange(step, psi_max, step):
        w = g2_rotation(psi) @ start
        inner = _min_three_segment(model, w, bound, step, refine=False)
        if inner is None:
            continue
        c = 0.5 * sg * psi + inner.cost
        if best is None or c < best.cost:
            best = _Best(c, (psi,) + inner.params[1:])
    if best is None:
        return _Best(math.inf, ())
    psi, a, b, _, p1, p3 = best.params

    def f(x):
        if min(x) < 0 or max(x) > bound:
            return np.inf
        w = g2_rotation(x[0]) @ start
        cost, _ = _three_segment_costs(model, w, np.array([x[1]]), np.array([x[2]]), p1, p3)
        c = cost[0, 0]
        return np.inf if np.isnan(c) else float(c + 0.5 * sg * x[0])

    res = minimize(f, [psi, a, b], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "initial_simplex": _simplex([psi, a, b])})
    if res.fun < best.cost:
        x = res.x
        w = g2_rotation(x[0]) @ start
        _, phi3 = _three_segment_costs(model, w, np.array([x[1]]), np.array([x[2]]), p1, p3)
        best = _Best(float(res.fun), (float(x[0]), float(x[1]), float(x[2]), float(phi3[0, 0]), p1, p3))
    return best


def random_unit_vectors(n: int, seed: int = 0) -> np.ndarray:
    v = np.random.default_rng(seed).normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def probe_start(model: LimitModel, start: np.ndarray, bound: float, step: float,
                tol: float | None = None) -> dict:
    """Compare the cheapest three- and four-segment solutions from one start."""
    start = np.asarray(start, dtype=float)
    start = start / np.linalg.norm(start)
    rec = {"start": [float(x) for x in start]}
    if abs(start[2]) < 1e-12:
        rec["excluded"] = "<u|phi> is already zero"
        return rec
    three = _min_three_segment(model, start, bound, step)
    if three is None:
        rec["excluded"] = "no three-segment solution within bounds"
        return rec
    four = _min_four_segment(model, start, three.cost, bound, step)
    if four.cost < three.cost - (step if tol is None else tol):
        # re-check the three-segment minimum on a finer grid before reporting
        finer = _min_three_segment(model, start, bound, step / 2)
        if finer is not None and finer.cost < three.cost:
            three = finer
    rec.update(
        three_cost=three.cost, three_plan=_plan_dict(three),
        four_cost=min(four.cost, three.cost), four_plan=_plan_dict(four) if four.params else None,
        gap=three.cost - min(four.cost, three.cost),
    )
    return rec


def _plan_dict(b: _Best) -> dict:
    psi, phi1, phi2, phi3, p1, p3 = b.params
    return {"g2_first": psi, "g1_first": phi1, "g2": phi2, "g1_last": phi3,
            "parity_first": p1, "parity_last": p3}


def conjecture_probe(K: int, j_bounds: float = TWO_PI, grid_step: float = 0.05,
                     n_starts: int = 20, seed: int = 0, include_s1: bool = True,
                     search_step: float | None = None) -> ScanReport:
    """Look for starts where a four-segment (local-global-local-global) solution
    beats every three-segment (global-local-global) one.

    Costs are queries divided by ``sqrt(N)`` and ``j_bounds`` caps every
    segment phase. Minima are located on a phase grid of ``search_step``
    (default ``max(grid_step, 0.05)``) and then polished by Nelder-Mead; a
    start counts as a counterexample when the four-segment optimum is cheaper
    by more than ``grid_step``. Counterexamples are collected, never asserted
    absent.
    """
    if search_step is None:
        search_step = max(grid_step, 0.05)
    if K < 2:
        raise ValueError("need K >= 2")
    if j_bounds <= 0 or not math.isfinite(j_bounds):
        raise ValueError("j_bounds must be finite and positive")
    model = LimitModel(K)
    starts = list(random_unit_vectors(n_starts, seed))
    if include_s1:
        starts.insert(0, model.s1())
    records, excluded, counter = [], [], []
    for idx, start in enumerate(starts):
        rec = probe_start(model, start, j_bounds, search_step, tol=grid_step)
        rec["index"] = idx
        if "excluded" in rec:
            log.info("start %d excluded: %s", idx, rec["excluded"])
            excluded.append({"index": idx, "start": rec["start"], "reason": rec["excluded"]})
            continue
        records.append(rec)
        if rec["gap"] > grid_step:
            counter.append(rec)
    p = optimal_params(K)
    grk = math.pi / 4 - p.query_coefficient / math.sqrt(K)
    first = records[0] if records else None
    return ScanReport(
        K=K, grid_step=grid_step, units="queries/sqrt(N)",
        best_plan=tuple(first["three_plan"].values()) if first else (),
        best_queries=first["three_cost"] if first else math.nan,
        grk_queries=grk, counterexamples=counter, records=records, excluded=excluded,
    )

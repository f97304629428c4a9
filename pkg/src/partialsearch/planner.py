"""Optimal GRK parameters, integer iteration counts, query accounting and runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from partialsearch import reduced, statevector
from partialsearch.core import DegenerateGeometry, IterationPlan, SearchSpace

REPRESENTATIONS = ("full", "reduced_exact", "reduced_asymptotic")


@dataclass(frozen=True)
class OptimalParams:
    K: int
    eta: float
    alpha: float

    @property
    def query_coefficient(self) -> float:
        """``eta - alpha``: the saving is this times ``sqrt(N/K)``."""
        return self.eta - self.alpha


def optimal_params(K: int) -> OptimalParams:
    """Solve ``tan(2 eta / sqrt K) (K-2) = sqrt(3K-4)`` and ``cos(2 alpha) = (K-2)/(2(K-1))``.

    ``atan2`` keeps ``K = 2`` (where ``K - 2 = 0``) on the continuous branch.
    """
    if K < 2:
        raise ValueError(f"need K >= 2, got {K}")
    eta = 0.5 * math.sqrt(K) * math.atan2(math.sqrt(3 * K - 4), K - 2)
    alpha = 0.5 * math.acos((K - 2) / (2 * (K - 1)))
    return OptimalParams(K=K, eta=eta, alpha=alpha)


def continuous_counts(space: SearchSpace) -> tuple[float, float]:
    p = optimal_params(space.n_blocks)
    root_n = math.sqrt(space.n_items)
    root_b = math.sqrt(space.block_size)
    return math.pi / 4 * root_n - p.eta * root_b, p.alpha * root_b


def asymptotic_queries(n_items: int, n_blocks: int) -> float:
    """Large-block limit of ``j1 + j2`` (the trailing ``+1`` is dropped)."""
    p = optimal_params(n_blocks)
    return math.pi / 4 * math.sqrt(n_items) - p.query_coefficient * math.sqrt(n_items / n_blocks)


def _round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def grk_plan(j1: int, j2: int) -> IterationPlan:
    return IterationPlan((("G1", 1), ("G2", j2), ("G1", j1)))


def _exact_u_amplitude(space: SearchSpace, j1: int, j2: int) -> float:
    d = reduced.plan_matrix(grk_plan(j1, j2), space, "exact") @ reduced.reduced_state("s1", space)
    return float(d[2])


def iteration_counts(space: SearchSpace, refine: bool = False) -> tuple[int, int]:
    """Integer ``(j1, j2)`` for ``space``: continuous counts rounded half away from zero.

    With ``refine=True``, the shifts ``(j1 + d, j2 - d)``, ``d in {-1, 0, 1}``
    (same query count) are also tried and the one with the smallest exact
    ``|<u|d>|`` is kept; ties go to the smaller ``j1``.
    """
    c1, c2 = continuous_counts(space)
    if c1 < 0:
        raise DegenerateGeometry(f"continuous j1 = {c1:.3f} < 0 for N={space.n_items}, K={space.n_blocks}")
    j1, j2 = _round_half_away(c1), _round_half_away(c2)
    if not refine:
        return j1, j2
    best = None
    for d in (-1, 0, 1):
        cand = (j1 + d, j2 - d)
        if min(cand) < 0:
            continue
        score = abs(_exact_u_amplitude(space, *cand))
        key = (score, cand[0])
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def query_count(plan: IterationPlan) -> int:
    """One oracle call per G1 or G2 factor; ``Ga^j`` expands to ``G1 G2^j G1``."""
    return sum(p + 2 if k == "Ga" else p for k, p in plan.steps)


@dataclass
class GrkRun:
    j1: int
    j2: int
    representation: str
    final_state: np.ndarray
    u_amplitude: float
    target_block_probability: float
    queries: int
    continuous: bool = False
    block_probabilities: np.ndarray | None = None
    full_state: np.ndarray | None = field(default=None, repr=False)

    @property
    def non_target_probability(self) -> float:
        return 1.0 - self.target_block_probability


def limit_grk_state(K: int) -> np.ndarray:
    """``|d>`` for ``b -> inf`` at the continuous optimum.

    Phases: ``2 j1 theta1 -> pi/2 - 2 eta/sqrt K``, ``2 j2 theta2 -> 2 alpha``,
    the final single ``G1`` tends to the reflection at phase 0, and ``|s1>``
    tends to ``(0, sin g, cos g)``.
    """
    p = optimal_params(K)
    g = math.asin(1 / math.sqrt(K))
    s1 = np.array([0.0, math.sin(g), math.cos(g)])
    first = reduced.g1_rotation(math.pi / 2 - 2 * p.eta / math.sqrt(K), g, -1)
    middle = reduced.g2_rotation(2 * p.alpha)
    last = reduced.g1_rotation(0.0, g, -1)
    return last @ middle @ first @ s1


def run_grk(space: SearchSpace, use: str = "full", continuous: bool = False,
            counts: tuple[int, int] | None = None, refine: bool = False) -> GrkRun:
    """Run ``G1 G2^j2 G1^j1 |s1>`` in the chosen representation.

    ``continuous=True`` (asymptotic representation only) evaluates the
    large-block limit at the exact continuous optimum instead of integer counts.
    """
    if use not in REPRESENTATIONS:
        raise ValueError(f"unknown representation {use!r}; expected one of {REPRESENTATIONS}")
    j1, j2 = counts if counts is not None else iteration_counts(space, refine)
    plan = grk_plan(j1, j2)
    blocks = full = None
    if continuous:
        if use != "reduced_asymptotic":
            raise ValueError("continuous=True needs use='reduced_asymptotic'")
        d = limit_grk_state(space.n_blocks)
    elif use == "full":
        full = statevector.run_sequence(space, plan)
        d, _ = statevector.project_reduced(space, full)
        blocks = statevector.block_probabilities(space, full)
    else:
        model = "exact" if use == "reduced_exact" else "asymptotic"
        d = reduced.plan_matrix(plan, space, model) @ reduced.reduced_state("s1", space)
    if blocks is not None:
        p_target = float(blocks[space.target_block])
    else:
        p_target = float(d[0] ** 2 + d[1] ** 2)
    return GrkRun(
        j1=j1, j2=j2, representation=use, final_state=d, u_amplitude=float(d[2]),
        target_block_probability=p_target, queries=query_count(plan), continuous=continuous,
        block_probabilities=blocks, full_state=full,
    )

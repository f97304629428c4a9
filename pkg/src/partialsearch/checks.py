"""Invariant suites run by ``partialsearch verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from partialsearch import group, reduced, statevector
from partialsearch.core import Angles, IterationPlan, SearchSpace, make_space
from partialsearch.planner import query_count

SUITES = ("lie", "group", "oracle", "spectra")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "name": self.name, "residual": self.residual,
                "tolerance": self.tolerance, "passed": self.passed}


def random_su2(rng: np.random.Generator) -> np.ndarray:
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    return q[0] * np.eye(2) - 1j * (q[1] * group.SIGMA_X + q[2] * group.SIGMA_Y + q[3] * group.SIGMA_Z)


def random_plan(rng: np.random.Generator, max_queries: int = 20) -> IterationPlan:
    steps = []
    budget = int(rng.integers(0, max_queries + 1))
    while budget > 0:
        kind = str(rng.choice(["G1", "G2", "Ga"]))
        if kind == "Ga":
            if budget < 2:
                continue
            power = int(rng.integers(0, budget - 1))
            budget -= power + 2
        else:
            power = int(rng.integers(1, budget + 1))
            budget -= power
        steps.append((kind, power))
    plan = IterationPlan(tuple(steps))
    assert query_count(plan) <= max_queries
    return plan


def lie_suite(gamma: float = math.pi / 6, samples: int = 20) -> list[Check]:
    out = [Check("lie", f"relation gamma={gamma!r}", group.lie_relation_residual(gamma), 1e-15)]
    for g in np.linspace(math.pi / 4 / samples, math.pi / 4, samples):
        out.append(Check("lie", f"relation gamma={g:.6f}", group.lie_relation_residual(float(g)), 1e-15))
    return out


def group_suite(gamma: float = math.pi / 6, theta2: float = 0.01, samples: int = 50, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    angles = Angles.limit(gamma, theta2)
    j1_max = math.pi / (4 * angles.theta1)
    worst_rel = max(group.group_relation_residual(float(j1), gamma, angles.theta1, theta2)
                    for j1 in np.linspace(0, j1_max, samples + 1)[1:-1].tolist() + [0.0])
    cover = homo = 0.0
    for _ in range(100):
        u, v = random_su2(rng), random_su2(rng)
        cover = max(cover, np.abs(group.so3_of_su2(-u) - group.so3_of_su2(u)).max())
        homo = max(homo, np.abs(group.so3_of_su2(u @ v) - group.so3_of_su2(u) @ group.so3_of_su2(v)).max())
    return [
        Check("group", "group relation (principal branch)", float(worst_rel), 1e-10),
        Check("group", "covering map so3(-u) = so3(u)", float(cover), 1e-12),
        Check("group", "homomorphism so3(uv) = so3(u) so3(v)", float(homo), 1e-12),
    ]


def oracle_suite(space: SearchSpace | None = None, n_plans: int = 50, seed: int = 0) -> list[Check]:
    space = space or make_space(64, 4, 0)
    rng = np.random.default_rng(seed)
    traj_err = resid = 0.0
    for _ in range(n_plans):
        plan = random_plan(rng)
        full = statevector.run_sequence(space, plan, trajectory=True)
        red = reduced.reduced_trajectory(space, plan)
        for psi, v in zip(full, red):
            coeffs, r = statevector.project_reduced(space, psi)
            traj_err = max(traj_err, np.abs(coeffs - v).max())
            resid = max(resid, r)
    return [
        Check("oracle", f"reduced vs full trajectory N={space.n_items} K={space.n_blocks}", float(traj_err), 1e-12),
        Check("oracle", "subspace residual", float(resid), 1e-12),
    ]


def spectra_suite(space: SearchSpace | None = None) -> list[Check]:
    space = space or make_space(64, 4, 0)
    out = []
    for kind, powers in (("G1_full", [1]), ("G2", [1, 3]), ("G1_power", [1, 2, 7, 10]), ("Ga", [1, 4])):
        for p in powers:
            es = reduced.spectrum(kind, space, p)
            r = es.residuals(reduced.spectrum_matrix(kind, space, p))
            out.append(Check("spectra", f"{kind} power={p}", float(r.max()), 1e-10))
    return out


def run_suite(name: str, **kw) -> list[Check]:
    if name == "all":
        return [c for s in SUITES for c in run_suite(s, **kw)]
    if name == "lie":
        return lie_suite(kw.get("gamma", math.pi / 6))
    if name == "group":
        return group_suite(kw.get("gamma", math.pi / 6), seed=kw.get("seed", 0))
    if name == "oracle":
        return oracle_suite(kw.get("space"), seed=kw.get("seed", 0))
    if name == "spectra":
        return spectra_suite(kw.get("space"))
    raise ValueError(f"unknown suite {name!r}")

"""3x3 real matrices of the searches in the (|t>, |ntt>, |u>) basis.

Two flavours of the global iteration live here and are kept apart on purpose:

* ``exact_matrix("G1", space)`` is the finite-b restriction of ``-I_s1 I_t``;
* ``asymptotic_g1_power`` is the large-block closed form, in which the
  rotation part is parametrised by ``2 j1 theta1`` and the fixed axis
  ``(0, cos g, -sin g)`` picks up the sign ``(-1)**j1``.

The ``*_rotation`` helpers take a continuous phase instead of an integer
power; the power functions are thin wrappers over them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from partialsearch.core import Angles, IterationPlan, SearchSpace

REDUCED_NAMES = ("s1", "s2", "t", "ntt", "u")


def reflection(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.eye(len(v)) - 2.0 * np.outer(v, v) / (v @ v)


def reduced_state(name: str, space: SearchSpace) -> np.ndarray:
    a = space.angles
    if name == "s1":
        sg, cg = math.sin(a.gamma), math.cos(a.gamma)
        return np.array([sg * math.sin(a.theta2), sg * math.cos(a.theta2), cg])
    if name == "s2":
        return np.array([math.sin(a.theta2), math.cos(a.theta2), 0.0])
    if name in ("t", "ntt", "u"):
        return np.eye(3)[("t", "ntt", "u").index(name)]
    raise ValueError(f"unknown reduced state {name!r}; expected one of {REDUCED_NAMES}")


def exact_matrix(kind: str, space: SearchSpace) -> np.ndarray:
    """Finite-b matrix of ``G1 = -I_s1 I_t`` or ``G2 = -I_s2 I_t``."""
    flip_t = reflection([1.0, 0.0, 0.0])
    if kind == "G1":
        return -reflection(reduced_state("s1", space)) @ flip_t
    if kind == "G2":
        # I_s2 reflects |u> too, since |u> is uniform inside every non-target block
        is2 = reflection(reduced_state("s2", space)) - 2.0 * np.diag([0.0, 0.0, 1.0])
        return -is2 @ flip_t
    raise ValueError(f"exact_matrix supports G1 and G2, got {kind!r}")


def g1_rotation(phase: float, gamma: float, parity: int = 1) -> np.ndarray:
    """Large-block ``G1^j`` with ``phase = 2 j theta1`` and ``parity = (-1)**j``."""
    c, s = math.cos(phase), math.sin(phase)
    sg, cg = math.sin(gamma), math.cos(gamma)
    p = float(parity)
    return np.array([
        [c, s * sg, s * cg],
        [-s * sg, p * cg**2 + c * sg**2, sg * cg * (-p + c)],
        [-s * cg, sg * cg * (-p + c), p * sg**2 + c * cg**2],
    ])


def g2_rotation(phase: float) -> np.ndarray:
    """``G2^j`` with ``phase = 2 j theta2``; exact at every block size."""
    c, s = math.cos(phase), math.sin(phase)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def ga_rotation(phase: float, gamma: float) -> np.ndarray:
    """Large-block ``Ga^j = G1 G2^j G1`` with ``phase = 2 j theta2``."""
    c, s = math.cos(phase), math.sin(phase)
    c2, s2 = math.cos(2 * gamma), math.sin(2 * gamma)
    return np.array([
        [c, -c2 * s, s2 * s],
        [c2 * s, s2**2 + c2**2 * c, s2 * c2 * (1 - c)],
        [-s2 * s, s2 * c2 * (1 - c), c2**2 + s2**2 * c],
    ])


def asymptotic_g1_power(j1: int, gamma: float, theta1: float) -> np.ndarray:
    if j1 < 0:
        raise ValueError("j1 must be nonnegative")
    return g1_rotation(2 * j1 * theta1, gamma, -1 if j1 % 2 else 1)


def g2_power(j2: int, theta2: float) -> np.ndarray:
    if j2 < 0:
        raise ValueError("j2 must be nonnegative")
    return g2_rotation(2 * j2 * theta2)


def ga_power(ja: int, gamma: float, theta2: float) -> np.ndarray:
    if ja < 0:
        raise ValueError("ja must be nonnegative")
    return ga_rotation(2 * ja * theta2, gamma)


def grk_closed_form_entries(K: int) -> tuple[float, float]:
    """The pair ``(a, b)`` of the GRK matrix ``((0,a,b),(0,b,-a),(-1,0,0))``."""
    a = 1 / (2 * math.sqrt(K - 1)) - 0.5 * math.sqrt((3 * K - 4) / K)
    b = 0.5 + 0.5 * math.sqrt((3 * K - 4) / (K * (K - 1)))
    return a, b


def grk_matrix(K: int) -> np.ndarray:
    """Closed-form large-block matrix of ``G1 G2^j2 G1^j1`` at the optimal counts."""
    if K < 2:
        raise ValueError(f"GRK matrix needs K >= 2, got {K}")
    a, b = grk_closed_form_entries(K)
    return np.array([[0.0, a, b], [0.0, b, -a], [-1.0, 0.0, 0.0]])


def matrix_for_step(kind: str, power: int, space: SearchSpace, model: str = "exact") -> np.ndarray:
    """Matrix of one plan step; ``model`` is ``"exact"`` or ``"asymptotic"``."""
    a = space.angles
    if model == "exact":
        if kind == "Ga":
            g1 = exact_matrix("G1", space)
            return g1 @ g2_power(power, a.theta2) @ g1
        if kind == "G1":
            return np.linalg.matrix_power(exact_matrix("G1", space), power)
        return g2_power(power, a.theta2)
    if model == "asymptotic":
        if kind == "Ga":
            return ga_power(power, a.gamma, a.theta2)
        if kind == "G1":
            return asymptotic_g1_power(power, a.gamma, a.theta1)
        return g2_power(power, a.theta2)
    raise ValueError(f"unknown model {model!r}")


def plan_matrix(plan: IterationPlan, space: SearchSpace, model: str = "exact") -> np.ndarray:
    M = np.eye(3)
    for kind, power in plan.steps:
        M = M @ matrix_for_step(kind, power, space, model)
    return M


def reduced_trajectory(space: SearchSpace, plan: IterationPlan, start: np.ndarray | None = None) -> list[np.ndarray]:
    """Exact reduced states after every single oracle call (initial state first)."""
    v = reduced_state("s1", space) if start is None else np.asarray(start, dtype=float)
    g1 = exact_matrix("G1", space)
    g2 = exact_matrix("G2", space)
    out = [v]
    for kind, power in plan.application_order():
        singles = ["G1"] + ["G2"] * power + ["G1"] if kind == "Ga" else [kind] * power
        for op in singles:
            v = (g1 if op == "G1" else g2) @ v
            out.append(v)
    return out


@dataclass(frozen=True)
class EigenSystem3:
    """Closed-form eigenpairs; ``vectors[:, k]`` belongs to ``values[k]``."""

    values: np.ndarray
    vectors: np.ndarray
    labels: tuple[str, str, str]

    def residuals(self, M: np.ndarray) -> np.ndarray:
        return np.linalg.norm(M @ self.vectors - self.vectors * self.values, axis=0)


SPECTRUM_KINDS = ("G1_full", "G2", "G1_power", "Ga")


def spectrum(kind: str, space: SearchSpace, power: int = 1) -> EigenSystem3:
    """Closed-form eigenpairs of ``exact G1`` (``G1_full``), ``G2^p``,
    asymptotic ``G1^p`` (``G1_power``) and ``Ga^p``."""
    a: Angles = space.angles
    r2 = 1 / math.sqrt(2)
    sg, cg = math.sin(a.gamma), math.cos(a.gamma)
    if kind == "G1_full":
        N, b, K = space.n_items, space.block_size, space.n_blocks
        x, y = math.sqrt((b - 1) / (N - 1)), math.sqrt(b * (K - 1) / (N - 1))
        lam = np.exp(2j * a.theta1)
        vecs = np.array([[r2, r2, 0.0], [1j * r2 * x, -1j * r2 * x, y], [1j * r2 * y, -1j * r2 * y, -x]])
        return EigenSystem3(np.array([lam, lam.conjugate(), -1.0]), vecs, ("psi1+", "psi1-", "psi1_0"))
    if kind == "G2":
        lam = np.exp(2j * a.theta2 * power)
        vecs = np.array([[r2, r2, 0.0], [1j * r2, -1j * r2, 0.0], [0.0, 0.0, 1.0]])
        return EigenSystem3(np.array([lam, lam.conjugate(), 1.0]), vecs, ("v2+", "v2-", "v2_0"))
    if kind == "G1_power":
        lam = np.exp(2j * a.theta1 * power)
        vecs = np.array([[r2, r2, 0.0], [1j * r2 * sg, -1j * r2 * sg, cg], [1j * r2 * cg, -1j * r2 * cg, -sg]])
        return EigenSystem3(np.array([lam, lam.conjugate(), (-1.0) ** power]), vecs, ("v1+", "v1-", "v1_0"))
    if kind == "Ga":
        lam = np.exp(2j * a.theta2 * power)
        c2, s2 = math.cos(2 * a.gamma), math.sin(2 * a.gamma)
        vecs = np.array([[r2, r2, 0.0], [-1j * r2 * c2, 1j * r2 * c2, s2], [1j * r2 * s2, -1j * r2 * s2, c2]])
        return EigenSystem3(np.array([lam, lam.conjugate(), 1.0]), vecs, ("u2+", "u2-", "u2_0"))
    raise ValueError(f"unknown spectrum kind {kind!r}; expected one of {SPECTRUM_KINDS}")


def spectrum_matrix(kind: str, space: SearchSpace, power: int = 1) -> np.ndarray:
    """The matrix whose eigenpairs ``spectrum(kind, ...)`` describes."""
    a = space.angles
    if kind == "G1_full":
        return exact_matrix("G1", space)
    if kind == "G2":
        return g2_power(power, a.theta2)
    if kind == "G1_power":
        return asymptotic_g1_power(power, a.gamma, a.theta1)
    if kind == "Ga":
        return ga_power(power, a.gamma, a.theta2)
    raise ValueError(f"unknown spectrum kind {kind!r}")

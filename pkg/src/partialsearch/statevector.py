"""Exact N-dimensional simulation of the search operators.

Every reflection is applied as a rank-one (or block-wise rank-one) update, so
one operator costs O(N) and N = 2**20 runs comfortably on a laptop. Amplitudes
are stored as complex so eigenvector checks can use the same container.
"""

from __future__ import annotations

import numpy as np

from partialsearch.core import IterationPlan, SearchSpace

OPERATOR_KINDS = ("I_t", "I_s1", "I_s2", "G1", "G2")


def uniform_state(space: SearchSpace) -> np.ndarray:
    return np.full(space.n_items, 1.0 / np.sqrt(space.n_items), dtype=complex)


def basis_state(space: SearchSpace, item: int) -> np.ndarray:
    psi = np.zeros(space.n_items, dtype=complex)
    psi[item] = 1.0
    return psi


def _check(space: SearchSpace, state: np.ndarray) -> np.ndarray:
    state = np.asarray(state)
    if state.shape != (space.n_items,):
        raise ValueError(f"state has shape {state.shape}, expected ({space.n_items},)")
    return state


def _flip_target(space, psi):
    out = psi.astype(complex, copy=True)
    out[space.target_index] *= -1
    return out


def _reflect_s1(psi):
    return psi - 2.0 * psi.mean()


def _reflect_s2(space, psi):
    blocks = psi.reshape(space.n_blocks, space.block_size)
    return (blocks - 2.0 * blocks.mean(axis=1, keepdims=True)).reshape(-1)


def apply_operator(kind: str, space: SearchSpace, state: np.ndarray) -> np.ndarray:
    """Apply one of ``I_t, I_s1, I_s2, G1, G2`` and return a new state."""
    psi = _check(space, state).astype(complex, copy=False)
    if kind == "I_t":
        return _flip_target(space, psi)
    if kind == "I_s1":
        return _reflect_s1(psi)
    if kind == "I_s2":
        return _reflect_s2(space, psi)
    if kind == "G1":
        return -_reflect_s1(_flip_target(space, psi))
    if kind == "G2":
        return -_reflect_s2(space, _flip_target(space, psi))
    raise ValueError(f"unknown operator {kind!r}; expected one of {OPERATOR_KINDS}")


def apply_power(kind: str, power: int, space: SearchSpace, state: np.ndarray) -> np.ndarray:
    """``G1^p``, ``G2^p`` or ``Ga^p = G1 G2^p G1``."""
    psi = _check(space, state).astype(complex, copy=True)
    if kind == "Ga":
        psi = apply_operator("G1", space, psi)
        psi = apply_power("G2", power, space, psi)
        return apply_operator("G1", space, psi)
    for _ in range(power):
        psi = apply_operator(kind, space, psi)
    return psi


def run_sequence(space: SearchSpace, plan: IterationPlan, state: np.ndarray | None = None,
                 trajectory: bool = False):
    """Apply ``plan`` right to left. Starts from the uniform state by default.

    With ``trajectory=True`` returns the list of states after every single
    oracle call (the initial state first) instead of only the final state.
    """
    psi = uniform_state(space) if state is None else _check(space, state).astype(complex)
    states = [psi]
    for kind, power in plan.application_order():
        if kind == "Ga":
            singles = ["G1"] + ["G2"] * power + ["G1"]
        else:
            singles = [kind] * power
        for op in singles:
            psi = apply_operator(op, space, psi)
            states.append(psi)
    return states if trajectory else psi


def norm(state: np.ndarray) -> float:
    """Euclidean norm via a pairwise sum; ``np.linalg.norm`` drifts ~1e-12 at N = 2**20."""
    return float(np.sqrt(np.sum(np.abs(state) ** 2)))


def reduced_basis(space: SearchSpace) -> np.ndarray:
    """Rows are |t>, |ntt>, |u> as length-N real vectors."""
    N, b, t = space.n_items, space.block_size, space.target_index
    tb = space.target_block
    basis = np.zeros((3, N))
    basis[0, t] = 1.0
    basis[1, tb * b:(tb + 1) * b] = 1.0 / np.sqrt(b - 1)
    basis[1, t] = 0.0
    basis[2, :] = 1.0 / np.sqrt(N - b)
    basis[2, tb * b:(tb + 1) * b] = 0.0
    return basis


def project_reduced(space: SearchSpace, state: np.ndarray) -> tuple[np.ndarray, float]:
    """Coefficients on (|t>, |ntt>, |u>) and the norm of what is left over.

    Coefficients are the real parts of the overlaps; any imaginary part is
    counted in the residual.
    """
    psi = _check(space, state)
    b, t = space.block_size, space.target_index
    tb = space.target_block
    blocks = psi.reshape(space.n_blocks, b)
    a = psi[t]
    ntt = (blocks[tb].sum() - a) / np.sqrt(b - 1)
    u = (psi.sum() - blocks[tb].sum()) / np.sqrt(space.n_items - b)
    coeffs = np.real(np.array([a, ntt, u]))
    residual = norm(psi - coeffs @ reduced_basis(space))
    return coeffs, residual


def block_probabilities(space: SearchSpace, state: np.ndarray) -> np.ndarray:
    psi = _check(space, state)
    return (np.abs(psi) ** 2).reshape(space.n_blocks, space.block_size).sum(axis=1)


def target_probability(space: SearchSpace, state: np.ndarray) -> float:
    return float(abs(_check(space, state)[space.target_index]) ** 2)

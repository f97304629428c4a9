"""so(3) generators, SU(2) images of the searches, the covering map and the
two-axis decomposition.

Axis alignment: the reduced basis (|t>, |ntt>, |u>) maps to the Pauli axes
(x, y, z) with no permutation and no sign change, i.e. the alignment matrix is
the 3x3 identity (``BASIS_ALIGNMENT``). With this choice ``so3_of_su2`` of the
printed SU(2) images reproduces ``g2_rotation``, ``ga_rotation`` and the even
branch of ``g1_rotation`` exactly.

Everything here works in the large-block model: ``theta1 = sin(gamma) theta2``
unless explicit angles are passed in.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm
from scipy.spatial.transform import Rotation

from partialsearch.core import Angles

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

T_X = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
T_Y = np.array([[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
T_Z = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])

BASIS_ALIGNMENT = np.eye(3)

# G1^(2j) ~ I + 4 theta2 j T_G1;  G2^j ~ I + 2 theta2 j T_G2;  Ga^j ~ I + 2 theta2 j T_Ga
LIE_PREFACTOR = {"G1": 4.0, "G2": 2.0, "Ga": 2.0}


class NotUnitary(ValueError):
    pass


class NoSolution(ValueError):
    pass


class ConstraintUnsolvable(ValueError):
    pass


def lie_generator(kind: str, gamma: float) -> np.ndarray:
    sg, cg = math.sin(gamma), math.cos(gamma)
    if kind == "G1":
        return np.array([[0.0, sg**2, sg * cg], [-sg**2, 0.0, 0.0], [-sg * cg, 0.0, 0.0]])
    if kind == "G2":
        return T_Z.copy()
    if kind == "Ga":
        c2, s2 = math.cos(2 * gamma), math.sin(2 * gamma)
        return np.array([[0.0, -c2, s2], [c2, 0.0, 0.0], [-s2, 0.0, 0.0]])
    raise ValueError(f"unknown generator kind {kind!r}")


def lie_relation_norm(t_ga: np.ndarray, t_g2: np.ndarray, t_g1: np.ndarray) -> float:
    return float(np.linalg.norm(t_ga + t_g2 - 2 * t_g1))


def lie_relation_residual(gamma: float) -> float:
    """Frobenius norm of ``T_Ga + T_G2 - 2 T_G1``."""
    return lie_relation_norm(lie_generator("Ga", gamma), lie_generator("G2", gamma), lie_generator("G1", gamma))


def linearized(kind: str, j: float, gamma: float, theta2: float) -> np.ndarray:
    """First-order form ``I + prefactor * theta2 * j * T``; for G1, ``j`` counts pairs."""
    return np.eye(3) + LIE_PREFACTOR[kind] * theta2 * j * lie_generator(kind, gamma)


def generator_components(T: np.ndarray) -> np.ndarray:
    """Coefficients ``(a_x, a_y, a_z)`` of an antisymmetric ``T`` on ``T_X, T_Y, T_Z``."""
    return np.array([T[1, 2], T[2, 0], T[0, 1]])


def algebra_to_su2(T: np.ndarray) -> np.ndarray:
    """``a . T  ->  (i/2) a . sigma``."""
    a = generator_components(T)
    return 0.5j * sum(c * s for c, s in zip(a, PAULI))


def su2_of(kind: str, j: float, angles: Angles) -> np.ndarray:
    """SU(2) image of ``G1^j``, ``G2^j`` or ``Ga^j`` (half-angle arguments ``j theta``)."""
    sg, cg = math.sin(angles.gamma), math.cos(angles.gamma)
    if kind == "G1":
        x = j * angles.theta1
        c, s = math.cos(x), math.sin(x)
        return np.array([[c + 1j * sg * s, -cg * s], [cg * s, c - 1j * sg * s]])
    if kind == "G2":
        x = j * angles.theta2
        return np.diag([np.exp(1j * x), np.exp(-1j * x)])
    if kind == "Ga":
        x = j * angles.theta2
        c, s = math.cos(x), math.sin(x)
        c2, s2 = math.cos(2 * angles.gamma), math.sin(2 * angles.gamma)
        return np.array([[c - 1j * c2 * s, -s2 * s], [s2 * s, c + 1j * c2 * s]])
    raise ValueError(f"unknown search kind {kind!r}")


def is_su2(u: np.ndarray, tol: float = 1e-9) -> bool:
    u = np.asarray(u)
    return (u.shape == (2, 2)
            and np.abs(u @ u.conj().T - np.eye(2)).max() <= tol
            and abs(np.linalg.det(u) - 1) <= tol)


def so3_of_su2(u: np.ndarray) -> np.ndarray:
    """``R`` with ``u (r . sigma) u^-1 = (R r) . sigma``."""
    u = np.asarray(u, dtype=complex)
    if not is_su2(u):
        raise NotUnitary("input is not a 2x2 unitary with determinant 1")
    ud = u.conj().T
    return np.array([[0.5 * np.trace(PAULI[i] @ u @ PAULI[k] @ ud).real for k in range(3)] for i in range(3)])


def su2_of_so3(R: np.ndarray) -> np.ndarray:
    """One of the two preimages of a proper rotation."""
    x, y, z, w = Rotation.from_matrix(R).as_quat()
    return w * np.eye(2) - 1j * (x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)


def axis_rotation(n: np.ndarray, angle: float) -> np.ndarray:
    """``R_n(angle) = exp(-i angle/2 n . sigma)``."""
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    ns = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    return math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * ns


def partner_j2(j1: float, angles: Angles) -> float:
    """Principal-branch solution of ``sin(gamma) tan(j2 theta2) = tan(j1 theta1)``."""
    x = j1 * angles.theta1
    if not -math.pi / 2 < x < math.pi / 2 or abs(math.cos(x)) < 1e-12:
        raise ConstraintUnsolvable(f"j1 theta1 = {x} is off the principal branch")
    return math.atan(math.tan(x) / math.sin(angles.gamma)) / angles.theta2


def group_relation_sides(j1: float, angles: Angles, j2: float | None = None):
    if j2 is None:
        j2 = partner_j2(j1, angles)
    u1 = su2_of("G1", j1, angles)
    lhs = u1 @ su2_of("Ga", -j2, angles) @ u1
    return lhs, su2_of("G2", j2, angles)


def group_relation_residual(j1: float, gamma: float, theta1: float, theta2: float,
                            j2: float | None = None) -> float:
    """Max-entry distance between ``u1^j1 ua^-j2 u1^j1`` and ``u2^j2``."""
    lhs, rhs = group_relation_sides(j1, Angles(theta1, theta2, gamma), j2)
    return float(np.abs(lhs - rhs).max())


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def two_axis_decompose(R: np.ndarray, n, m) -> tuple[float, float, float]:
    """Angles with ``R = R_n(lam) R_m(theta) R_n(gam)`` exactly in SU(2).

    Closed form in the frame where ``n`` is the z axis and ``m`` lies in the
    xz plane. When ``n`` and ``m`` are not perpendicular only part of SU(2)
    is reachable and ``NoSolution`` is raised outside it.
    """
    R = np.asarray(R, dtype=complex)
    if not is_su2(R):
        raise NotUnitary("input is not in SU(2)")
    n, m = _unit(n), _unit(m)
    cross = np.cross(n, m)
    sin_beta = float(np.linalg.norm(cross))
    if sin_beta < 1e-8:
        raise NoSolution("axes are (nearly) parallel")
    cos_beta = float(n @ m)
    e1 = (m - cos_beta * n) / sin_beta
    W = su2_of_so3(np.array([e1, np.cross(n, e1), n]))
    Rp = W @ R @ W.conj().T
    a, b = Rp[0, 0], Rp[0, 1]
    ratio = abs(b) / sin_beta
    if ratio > 1 + 1e-12:
        raise NoSolution(f"rotation not reachable with these axes (|b|/sin(beta) = {ratio:.6g})")
    # atan2 keeps full precision near a half-turn where asin does not
    half = math.atan2(ratio, math.sqrt(max(abs(a) ** 2 - cos_beta**2, 0.0)) / sin_beta)
    rho = complex(math.cos(half), -math.sin(half) * cos_beta)
    total = 2 * (np.angle(rho) - np.angle(a)) if abs(a) > 1e-14 else 0.0
    diff = -2 * np.angle(1j * b) if abs(b) > 1e-14 else 0.0
    return float((total + diff) / 2), 2 * half, float((total - diff) / 2)


def two_axis_compose(n, m, lam: float, theta: float, gam: float) -> np.ndarray:
    return axis_rotation(n, lam) @ axis_rotation(m, theta) @ axis_rotation(n, gam)


def exp_so3(T: np.ndarray) -> np.ndarray:
    return expm(T)

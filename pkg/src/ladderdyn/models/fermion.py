"""Two-mode fermionic predator/prey baseline on a 4-dimensional Fock space.

``b_1 = sigma^- (x) 1`` and ``b_3 = sigma_z (x) sigma^-`` (Jordan-Wigner).  The
number state ``|n_1 n_3>`` sits at index ``2 n_1 + n_3``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

__all__ = [
    "FermiPP",
    "fermi_matrices",
    "fermi_hamiltonian",
    "number_state",
    "fermi_density",
    "fermi_density_matrix",
    "fermi_phases",
    "fermi_mode_propagator",
]

_SM = np.array([[0.0, 1.0], [0.0, 0.0]])
_SZ = np.diag([1.0, -1.0])
_I2 = np.eye(2)


@dataclass(frozen=True)
class FermiPP:
    omega1: float = 2.0
    omega3: float = 1.0
    lam: float = 0.5
    n1: int = 1
    n3: int = 0

    def __post_init__(self):
        if not (self.omega1 > 0 and self.omega3 > 0):
            raise ValueError("omega1 and omega3 must be positive")
        if self.n1 not in (0, 1) or self.n3 not in (0, 1):
            raise ValueError("fermionic occupations must be 0 or 1")
        if self.delta == 0:
            raise ValueError("delta = sqrt((omega1-omega3)^2 + 4 lam^2) must be nonzero")

    @property
    def delta(self) -> float:
        return float(np.hypot(self.omega1 - self.omega3, 2 * self.lam))


def fermi_matrices() -> tuple[np.ndarray, np.ndarray]:
    """Annihilation operators ``(b_1, b_3)`` as 4x4 real matrices."""
    return np.kron(_SM, _I2), np.kron(_SZ, _SM)


def fermi_hamiltonian(m: FermiPP) -> np.ndarray:
    b1, b3 = fermi_matrices()
    n1, n3 = b1.T @ b1, b3.T @ b3
    return m.omega1 * n1 + m.omega3 * n3 + m.lam * (b1.T @ b3 + b3.T @ b1)


def number_state(n1: int, n3: int) -> np.ndarray:
    """``(b_1^dagger)^n1 (b_3^dagger)^n3`` applied to the vacuum."""
    b1, b3 = fermi_matrices()
    v = np.zeros(4)
    v[0] = 1.0
    for _ in range(n3):
        v = b3.T @ v
    for _ in range(n1):
        v = b1.T @ v
    return v


def fermi_density(m: FermiPP, t):
    """Closed-form mean densities ``(n_1(t), n_3(t))``."""
    t = np.asarray(t, dtype=float)
    d2 = (m.omega1 - m.omega3) ** 2
    tot = d2 + 4 * m.lam ** 2
    c2 = np.cos(0.5 * m.delta * t) ** 2
    s2 = np.sin(0.5 * m.delta * t) ** 2
    n1 = m.n1 * d2 / tot + 4 * m.lam ** 2 / tot * (m.n1 * c2 + m.n3 * s2)
    n3 = m.n3 * d2 / tot + 4 * m.lam ** 2 / tot * (m.n3 * c2 + m.n1 * s2)
    return n1, n3


def fermi_density_matrix(m: FermiPP, t):
    """Same densities from ``exp(-iHt)`` acting on the number state."""
    H = fermi_hamiltonian(m)
    b1, b3 = fermi_matrices()
    num1, num3 = b1.T @ b1, b3.T @ b3
    phi = number_state(m.n1, m.n3).astype(complex)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out1, out3 = np.empty(ts.size), np.empty(ts.size)
    for i, tt in enumerate(ts):
        psi = expm(-1j * H * tt) @ phi
        out1[i] = np.vdot(psi, num1 @ psi).real
        out3[i] = np.vdot(psi, num3 @ psi).real
    if np.ndim(t) == 0:
        return float(out1[0]), float(out3[0])
    return out1, out3


def fermi_phases(m: FermiPP, t):
    """The auxiliary functions ``Phi_+(t)`` and ``Phi_-(t)``."""
    t = np.asarray(t, dtype=float)
    env = np.exp(-0.5j * t * (m.omega1 + m.omega3))
    return 2 * env * np.cos(0.5 * m.delta * t), -2j * env * np.sin(0.5 * m.delta * t)


def fermi_mode_propagator(m: FermiPP, t: float) -> np.ndarray:
    """2x2 matrix ``U`` with ``(b_1(t), b_3(t)) = U (b_1, b_3)``, assembled from ``Phi_+-``.

    ``n_j(t)`` on a number state is ``sum_l |U_jl|^2 n_l``.
    """
    pp, pm = fermi_phases(m, t)
    r = (m.omega1 - m.omega3) / m.delta
    g = m.lam / m.delta
    return np.array([[0.5 * (pp + r * pm), g * pm],
                     [g * pm, 0.5 * (pp - r * pm)]])

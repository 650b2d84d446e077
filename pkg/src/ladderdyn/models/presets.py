"""Predator/prey presets built from the translation ladder operators.

Mode 1 is the predator, mode 3 the prey and mode 2 (cubic model only) the
mediating agent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..algebra import OperatorExpr, ShiftWord, shift_op, x_op
from ..dynamics import SolvableModel

__all__ = [
    "QuadraticPP",
    "CubicPP3",
    "GatedPP",
    "DegenerateFrequencyError",
    "build_hamiltonian",
    "amplitude_delta",
    "envelope_V",
    "quadratic_mean_reference",
    "cubic_mean_reference",
    "gated_perturbative_x1",
]

INV_SQRT_E = math.exp(-0.5)


class DegenerateFrequencyError(ValueError):
    """A closed form was requested at a resonant (zero) frequency."""


def _positive(name: str, value: float):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class QuadraticPP:
    """``omega_1 x_1 + omega_3 x_3 + lam (T_1^-1 T_3 + T_3^-1 T_1)``."""

    omega1: float = 3.0
    omega3: float = 1.0
    lam: float = 3.0

    def __post_init__(self):
        _positive("omega1", self.omega1)
        _positive("omega3", self.omega3)

    @property
    def Omega(self) -> float:
        return self.omega1 - self.omega3

    @property
    def degenerate(self) -> bool:
        return self.Omega == 0

    def build(self) -> SolvableModel:
        return SolvableModel(
            {1: self.omega1, 3: self.omega3},
            [(self.lam, ShiftWord.of({1: -1, 3: 1})), (self.lam, ShiftWord.of({1: 1, 3: -1}))],
        )


@dataclass(frozen=True)
class CubicPP3:
    """Three-agent model with interactions ``T_1^-1 (lam1 T_2 + lam2 T_2^-1) T_3 + h.c.``"""

    omega1: float = 3.5
    omega2: float = 0.5
    omega3: float = 1.0
    lam1: float = 2.0
    lam2: float = 1.0

    def __post_init__(self):
        for name in ("omega1", "omega2", "omega3"):
            _positive(name, getattr(self, name))

    @classmethod
    def from_frequencies(cls, Omega1: float, Omega2: float, lam1: float, lam2: float,
                         omega3: float = 1.0) -> "CubicPP3":
        """Pick positive free frequencies that realize ``Omega1 < Omega2``.

        ``omega2 = (Omega2 - Omega1)/2`` and ``omega1 - omega3 = (Omega1 + Omega2)/2``;
        ``omega3`` is raised when needed to keep ``omega1`` positive.
        """
        if not Omega2 > Omega1:
            raise ValueError("positive frequencies force Omega2 > Omega1")
        diff = 0.5 * (Omega1 + Omega2)
        omega3 = max(omega3, 1.0 - diff)
        return cls(omega3 + diff, 0.5 * (Omega2 - Omega1), omega3, lam1, lam2)

    @property
    def Omega1(self) -> float:
        return self.omega1 - self.omega2 - self.omega3

    @property
    def Omega2(self) -> float:
        return self.omega1 + self.omega2 - self.omega3

    def build(self) -> SolvableModel:
        return SolvableModel(
            {1: self.omega1, 2: self.omega2, 3: self.omega3},
            [
                (self.lam1, ShiftWord.of({1: -1, 2: 1, 3: 1})),
                (self.lam1, ShiftWord.of({1: 1, 2: -1, 3: -1})),
                (self.lam2, ShiftWord.of({1: -1, 2: -1, 3: 1})),
                (self.lam2, ShiftWord.of({1: 1, 2: 1, 3: -1})),
            ],
        )

    def factored_interaction(self) -> OperatorExpr:
        """The same interaction written as ``T_1^-1 (lam1 T_2 + lam2 T_2^-1) T_3 + h.c.``"""
        T1, T2, T3 = shift_op(1), shift_op(2), shift_op(3)
        T1d, T2d, T3d = shift_op(1, -1), shift_op(2, -1), shift_op(3, -1)
        return (T1d * (self.lam1 * T2 + self.lam2 * T2d) * T3
                + T1 * (self.lam1 * T2d + self.lam2 * T2) * T3d)


@dataclass(frozen=True)
class GatedPP:
    """``omega_1 x_1 + omega_3 x_3 + lam (x_1 T_1^-1 T_3 + T_1 T_3^-1 x_1)``.

    The interaction vanishes on states without predators, so the model sits
    outside the solvable class.
    """

    omega1: float = 2.0
    omega3: float = 1.0
    lam: float = 0.1

    def __post_init__(self):
        _positive("omega1", self.omega1)
        _positive("omega3", self.omega3)

    @property
    def Omega(self) -> float:
        return self.omega1 - self.omega3

    def build(self) -> OperatorExpr:
        x1 = x_op(1)
        T1, T3 = shift_op(1), shift_op(3)
        T1d, T3d = shift_op(1, -1), shift_op(3, -1)
        return (self.omega1 * x1 + self.omega3 * x_op(3)
                + self.lam * (x1 * T1d * T3 + T1 * T3d * x1))


def build_hamiltonian(preset):
    """Solvable presets give a :class:`SolvableModel`, the gated one a raw expression."""
    return preset.build()


def _check_cubic(m: CubicPP3):
    if m.Omega1 == 0 or m.Omega2 == 0:
        raise DegenerateFrequencyError("closed form needs Omega1 and Omega2 nonzero")


def amplitude_delta(m: CubicPP3) -> float:
    """``2 (lam1/|Omega1| + lam2/|Omega2|)``: the supremum of the range of ``V``.

    It is attained only when both cosines can reach -1 at the same time.
    """
    _check_cubic(m)
    return 2.0 * (m.lam1 / abs(m.Omega1) + m.lam2 / abs(m.Omega2))


def envelope_V(m: CubicPP3, t):
    _check_cubic(m)
    t = np.asarray(t, dtype=float)
    return (m.lam1 / m.Omega1 * (np.cos(m.Omega1 * t) - 1)
            + m.lam2 / m.Omega2 * (np.cos(m.Omega2 * t) - 1))


def quadratic_mean_reference(m: QuadraticPP, k1: float, k3: float, t):
    """Closed-form mean densities ``(x_1(t), x_3(t))`` of the quadratic model."""
    if m.Omega == 0:
        raise DegenerateFrequencyError("the oscillating closed form needs omega1 != omega3")
    t = np.asarray(t, dtype=float)
    dev = 2 * m.lam / (m.Omega * math.sqrt(math.e)) * (np.cos(m.Omega * t) - 1)
    return k1 - dev, k3 + dev


def cubic_mean_reference(m: CubicPP3, k1: float, k2: float, k3: float, t):
    """Closed-form mean densities ``(x_1, x_2, x_3)`` of the three-agent model."""
    _check_cubic(m)
    t = np.asarray(t, dtype=float)
    a = m.lam1 / m.Omega1 * (np.cos(m.Omega1 * t) - 1)
    b = m.lam2 / m.Omega2 * (np.cos(m.Omega2 * t) - 1)
    f = 2 * math.exp(-0.75)
    return k1 - f * (a + b), k2 + f * (a - b), k3 + f * (a + b)


def gated_perturbative_x1(m: GatedPP, k1: float, t):
    """First order in ``lam`` of the gated model's predator density."""
    if m.Omega == 0:
        raise DegenerateFrequencyError("perturbative solution needs omega1 != omega3")
    t = np.asarray(t, dtype=float)
    return k1 - 2 * m.lam / (m.Omega * math.sqrt(math.e)) * (k1 + 0.5) * (np.cos(m.Omega * t) - 1)

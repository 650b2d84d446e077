"""Shifted-Gaussian product states and their closed-form expectation values.

The reference function is the unit-width Gaussian ``pi**-0.25 * exp(-x**2/2)``;
``phi_k`` is that profile translated to center ``k`` in every mode.  For a
normal term ``c * x^n * T^m`` the per-mode factor of ``<phi_k, x^n T^m phi_k>``
is ``exp(-m**2/4) * M_n(k - m/2)`` with ``M_n`` the moments of a unit-width
normalized Gaussian.  Other profiles would only change these two functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .algebra import OperatorExpr

__all__ = [
    "GaussianState",
    "MissingModeError",
    "gaussian_moment",
    "expectation",
    "state_inner",
]


class MissingModeError(KeyError):
    """An expression or second state references a mode the state lacks."""


@dataclass(frozen=True)
class GaussianState:
    """Product of unit-width Gaussians centred at ``centers[j]``.

    Normalized by construction.  Centers are arbitrary finite reals; presets
    restrict themselves to nonnegative values.
    """

    centers: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(j): float(k) for j, k in dict(self.centers).items()}
        for j, k in clean.items():
            if j < 0:
                raise ValueError(f"mode index must be nonnegative, got {j}")
            if not math.isfinite(k):
                raise ValueError(f"center of mode {j} is not finite: {k}")
        object.__setattr__(self, "centers", dict(sorted(clean.items())))

    @classmethod
    def of(cls, **centers: float) -> "GaussianState":
        """``GaussianState.of(k1=1, k3=0)`` convenience constructor."""
        return cls({int(name.lstrip("k")): v for name, v in centers.items()})

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(self.centers)

    def center(self, j: int) -> float:
        try:
            return self.centers[j]
        except KeyError:
            raise MissingModeError(f"state has no center for mode {j}") from None

    def __hash__(self):
        return hash(tuple(self.centers.items()))


def gaussian_moment(n: int, c):
    """Moments of ``exp(-(x - c)**2) / sqrt(pi)``.

    Uses ``M_0 = 1``, ``M_1 = c`` and ``M_n = c M_{n-1} + (n-1)/2 M_{n-2}``.
    ``c`` may be a scalar or an array.
    """
    if n < 0:
        raise ValueError("moment order must be nonnegative")
    prev = np.ones_like(c, dtype=float) if isinstance(c, np.ndarray) else 1.0
    if n == 0:
        return prev
    cur = c
    for k in range(2, n + 1):
        prev, cur = cur, c * cur + 0.5 * (k - 1) * prev
    return cur


def expectation(state: GaussianState, a: OperatorExpr) -> complex:
    """Exact ``<phi_k, a phi_k>`` for a normal-ordered expression."""
    total = 0j
    for term in a.terms():
        value = term.coeff
        xp = term.xpart.as_dict()
        sh = term.shift.as_dict()
        for j in set(xp) | set(sh):
            m = sh.get(j, 0)
            k = state.center(j)
            value *= math.exp(-0.25 * m * m) * gaussian_moment(xp.get(j, 0), k - 0.5 * m)
        total += value
    return total


def state_inner(a: GaussianState, b: GaussianState) -> float:
    """Overlap ``<phi_a, phi_b>`` of two product Gaussians on the same modes."""
    if set(a.modes) != set(b.modes):
        raise MissingModeError(f"mode sets differ: {a.modes} vs {b.modes}")
    d2 = sum((a.centers[j] - b.centers[j]) ** 2 for j in a.modes)
    return math.exp(-0.25 * d2)

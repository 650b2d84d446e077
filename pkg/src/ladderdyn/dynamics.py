"""Exact Heisenberg dynamics for Hamiltonians of the form

    H = sum_j omega_j x_j + sum_k alpha_k W_k

with ``W_k`` pure shift words and the interaction Hermitian.

Shift words commute with each other, so each evolves freely:
``W(t) = exp(i Omega_W t) W`` with ``Omega_W = -sum_j m_j omega_j``.
Since ``[W, x_j] = m_j W``, the position equations integrate termwise:

    x_j(t) = x_j + sum_k (alpha_k m_j(k) / Omega_k) (exp(i Omega_k t) - 1) W_k,

and a resonant word (``Omega_k == 0``) contributes ``i alpha_k m_j(k) t W_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .algebra import (
    OperatorExpr,
    ShiftWord,
    commutator,
    evaluate_weighted,
    is_hermitian,
    word_op,
    x_op,
)
from .states import GaussianState, expectation

__all__ = [
    "NotSolvableError",
    "SolvableModel",
    "Oscillatory",
    "Secular",
    "TrajectoryTerm",
    "ClosedFormTrajectory",
    "heisenberg_rhs",
    "word_frequency",
    "evolve_positions",
    "conserved_linear",
    "mean_trajectory",
    "negative_excursions",
]

# a word frequency below this is treated as resonant
RESONANCE_TOL = 1e-12


class NotSolvableError(ValueError):
    """The Hamiltonian lies outside the exactly solvable class."""


def heisenberg_rhs(H: OperatorExpr, A: OperatorExpr) -> OperatorExpr:
    """``i [H, A]``, the Heisenberg time derivative of ``A``."""
    return commutator(H, A).scale(1j)


def word_frequency(w: ShiftWord, omegas: Mapping[int, float]) -> float:
    """Free-evolution frequency of a shift word, ``W(t) = exp(i Omega t) W``.

    ``T_1^-1 T_3`` gives ``omega_1 - omega_3``.
    """
    total = 0.0
    for j, m in w.exponents:
        if j not in omegas:
            raise KeyError(f"no free frequency for mode {j}")
        total -= m * omegas[j]
    return total


@dataclass(frozen=True)
class SolvableModel:
    """Free frequencies plus a Hermitian list of shift-word interactions."""

    omegas: Mapping[int, float]
    interaction: Sequence[tuple[complex, ShiftWord]] = field(default_factory=tuple)

    def __post_init__(self):
        omegas = {int(j): float(w) for j, w in dict(self.omegas).items()}
        for j, w in omegas.items():
            if not w > 0:
                raise ValueError(f"omega_{j} must be positive, got {w}")
        terms = []
        for coeff, word in self.interaction:
            if not isinstance(word, ShiftWord):
                word = ShiftWord.of(word)
            missing = set(word.modes) - set(omegas)
            if missing:
                raise ValueError(f"interaction word {word} uses modes without a frequency: {sorted(missing)}")
            terms.append((complex(coeff), word))
        object.__setattr__(self, "omegas", dict(sorted(omegas.items())))
        object.__setattr__(self, "interaction", tuple(terms))
        if not is_hermitian(self.interaction_expr()):
            raise NotSolvableError("interaction is not Hermitian")

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(self.omegas)

    def interaction_expr(self) -> OperatorExpr:
        return evaluate_weighted((c, word_op(w)) for c, w in self.interaction)

    def hamiltonian(self) -> OperatorExpr:
        free = evaluate_weighted((w, x_op(j)) for j, w in self.omegas.items())
        return free + self.interaction_expr()

    @classmethod
    def from_hamiltonian(cls, H: OperatorExpr) -> "SolvableModel":
        """Split ``H`` into free and interaction parts, rejecting anything else."""
        omegas: dict[int, float] = {}
        interaction = []
        for term in H.terms():
            if term.shift.is_identity:
                if term.xpart.degree == 0:
                    interaction.append((term.coeff, term.shift))
                    continue
                if term.xpart.degree != 1:
                    raise NotSolvableError(f"nonlinear free term {term.xpart}")
                if abs(term.coeff.imag) > 1e-12:
                    raise NotSolvableError("free frequencies must be real")
                (j, _), = term.xpart.powers
                omegas[j] = term.coeff.real
            elif term.xpart.degree:
                raise NotSolvableError(
                    f"position operator inside interaction word {term.xpart}*{term.shift}; "
                    "use the grid oracle")
            else:
                interaction.append((term.coeff, term.shift))
        return cls(omegas, interaction)


@dataclass(frozen=True)
class Oscillatory:
    """Time profile ``exp(i freq t) - 1``."""

    freq: float

    def value(self, t):
        return np.expm1(1j * self.freq * np.asarray(t, dtype=float))

    def rate(self, t):
        return 1j * self.freq * np.exp(1j * self.freq * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class Secular:
    """Time profile ``t`` (resonant word)."""

    def value(self, t):
        return np.asarray(t, dtype=float) + 0j

    def rate(self, t):
        return np.ones_like(np.asarray(t, dtype=float)) + 0j


Profile = Union[Oscillatory, Secular]


@dataclass(frozen=True)
class TrajectoryTerm:
    coeff: complex
    word: ShiftWord
    profile: Profile


@dataclass(frozen=True)
class ClosedFormTrajectory:
    """``x_j(t) = x_j + sum coeff * profile(t) * word``."""

    mode: int
    constant: OperatorExpr
    terms: tuple[TrajectoryTerm, ...]

    def at(self, t: float) -> OperatorExpr:
        pieces = [(1.0, self.constant)]
        pieces += [(complex(term.coeff * term.profile.value(t)), word_op(term.word)) for term in self.terms]
        return evaluate_weighted(pieces)

    def derivative_at(self, t: float) -> OperatorExpr:
        return evaluate_weighted(
            (complex(term.coeff * term.profile.rate(t)), word_op(term.word)) for term in self.terms)

    def mean(self, state: GaussianState, times) -> np.ndarray:
        return mean_trajectory(self, state, times)


def _as_model(model: SolvableModel | OperatorExpr) -> SolvableModel:
    if isinstance(model, SolvableModel):
        return model
    return SolvableModel.from_hamiltonian(model)


def evolve_positions(model: SolvableModel | OperatorExpr) -> dict[int, ClosedFormTrajectory]:
    """Closed-form ``x_j(t)`` for every mode of a solvable model."""
    model = _as_model(model)
    out = {}
    for j in model.modes:
        terms = []
        for alpha, word in model.interaction:
            m = word.get(j)
            if m == 0:
                continue
            freq = word_frequency(word, model.omegas)
            if abs(freq) <= RESONANCE_TOL:
                terms.append(TrajectoryTerm(1j * alpha * m, word, Secular()))
            else:
                terms.append(TrajectoryTerm(alpha * m / freq, word, Oscillatory(freq)))
        out[j] = ClosedFormTrajectory(j, x_op(j), tuple(terms))
    return out


def conserved_linear(model: SolvableModel | OperatorExpr) -> tuple[tuple[int, ...], np.ndarray]:
    """Basis of coefficient vectors ``alpha`` with ``[H, sum alpha_j x_j] = 0``.

    Returns ``(modes, basis)`` where each row of ``basis`` is one vector in
    ``modes`` order.  The basis is the exact rational null space of the word
    exponent matrix, so ``(1, 0, 1)`` comes back as such rather than
    orthonormalized.
    """
    import sympy

    model = _as_model(model)
    modes = model.modes
    rows = [[w.get(j) for j in modes] for _, w in model.interaction if not w.is_identity]
    if not rows:
        return modes, np.eye(len(modes))
    null = sympy.Matrix(rows).nullspace()
    if not null:
        return modes, np.zeros((0, len(modes)))
    basis = np.array([[float(v) for v in vec] for vec in null])
    return modes, basis


def mean_trajectory(traj: ClosedFormTrajectory, state: GaussianState, times,
                    imag_tol: float = 1e-12) -> np.ndarray:
    """Expectation of ``x_j(t)`` on ``state`` at each of ``times``."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    values = np.full(times.shape, expectation(state, traj.constant), dtype=complex)
    for term in traj.terms:
        w_mean = expectation(state, word_op(term.word))
        values += term.coeff * w_mean * term.profile.value(times)
    scale = max(1.0, float(np.max(np.abs(values))))
    if np.max(np.abs(values.imag)) > imag_tol * scale:
        raise ValueError("mean trajectory has a non-negligible imaginary part; "
                         "the trajectory is not Hermitian")
    return values.real


def negative_excursions(series: Iterable[float], times) -> list[float]:
    """Times at which a mean trajectory dips below zero.

    A diagnostic only; negative values are not an error.
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(list(series), dtype=float)
    return [float(t) for t in times[series < 0]]

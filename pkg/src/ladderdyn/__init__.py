"""Translation-ladder operator algebra and exactly solvable Heisenberg dynamics.

Observables are polynomials in positions ``x_j`` and unit translations ``T_j``
with ``T_j x_j = (x_j + 1) T_j``.  For Hamiltonians linear in the ``x_j`` plus a
Hermitian combination of shift words the position operators evolve in closed
form; mean values on shifted Gaussians follow from Hermite-type moments.  A
grid propagator and a 4x4 fermionic model serve as independent checks.
"""

from .algebra import (
    NormalTerm,
    OperatorExpr,
    ShiftWord,
    XMonomial,
    adjoint,
    anticommutator,
    commutator,
    identity,
    is_hermitian,
    mul,
    shift_op,
    word_op,
    x_op,
    zero,
)
from .dynamics import (
    ClosedFormTrajectory,
    NotSolvableError,
    SolvableModel,
    conserved_linear,
    evolve_positions,
    heisenberg_rhs,
    mean_trajectory,
    negative_excursions,
    word_frequency,
)
from .oracle import GridConfig, TruncationError, discretize_state, propagate
from .states import GaussianState, MissingModeError, expectation, gaussian_moment, state_inner
from .syntax import ExprSyntaxError, format_expr, parse_expr

__version__ = "0.1.0"

__all__ = [
    "NormalTerm", "OperatorExpr", "ShiftWord", "XMonomial", "adjoint", "anticommutator",
    "commutator", "identity", "is_hermitian", "mul", "shift_op", "word_op", "x_op", "zero",
    "ClosedFormTrajectory", "NotSolvableError", "SolvableModel", "conserved_linear",
    "evolve_positions", "heisenberg_rhs", "mean_trajectory", "negative_excursions",
    "word_frequency",
    "GridConfig", "TruncationError", "discretize_state", "propagate",
    "GaussianState", "MissingModeError", "expectation", "gaussian_moment", "state_inner",
    "ExprSyntaxError", "format_expr", "parse_expr",
]

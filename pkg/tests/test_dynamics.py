import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ladderdyn import (
    GaussianState,
    NotSolvableError,
    ShiftWord,
    SolvableModel,
    commutator,
    conserved_linear,
    evolve_positions,
    expectation,
    heisenberg_rhs,
    is_hermitian,
    mean_trajectory,
    negative_excursions,
    shift_op,
    word_frequency,
    x_op,
)
from ladderdyn.dynamics import Oscillatory, Secular
from ladderdyn.models import GatedPP

x1, x3 = x_op(1), x_op(3)
T1, T3 = shift_op(1), shift_op(3)


@st.composite
def solvable_models(draw):
    modes = (1, 2, 3)
    omegas = {j: draw(st.floats(0.25, 4.0)) for j in modes}
    pairs = draw(st.lists(
        st.tuples(st.builds(complex, st.floats(-2, 2), st.floats(-2, 2)),
                  st.dictionaries(st.sampled_from(modes), st.integers(-2, 2), min_size=1, max_size=3)),
        min_size=1, max_size=3))
    interaction = []
    for alpha, exps in pairs:
        w = ShiftWord.of(exps)
        if w.is_identity:
            continue
        interaction += [(alpha, w), (np.conj(alpha), w.inverse())]
    return SolvableModel(omegas, interaction)


def test_word_frequency_examples():
    om = {1: 3.0, 2: 0.5, 3: 1.0}
    assert word_frequency(ShiftWord.of({1: -1, 3: 1}), om) == pytest.approx(2.0)
    assert word_frequency(ShiftWord.of({1: -1, 2: 1, 3: 1}), om) == pytest.approx(1.5)
    assert word_frequency(ShiftWord.of({1: -1, 2: -1, 3: 1}), om) == pytest.approx(2.5)
    assert word_frequency(ShiftWord(), om) == 0.0
    with pytest.raises(KeyError):
        word_frequency(ShiftWord.of({4: 1}), om)


def test_free_word_evolution_phase():
    # i[H0, W] = i Omega_W W for H0 = sum omega_j x_j
    om = {1: 3.0, 3: 1.0}
    H0 = 3.0 * x1 + 1.0 * x3
    W = T1.dag() * T3
    assert heisenberg_rhs(H0, W).allclose(1j * word_frequency(ShiftWord.of({1: -1, 3: 1}), om) * W)


def test_quadratic_trajectory_structure():
    # alpha m / Omega: lam=3, Omega=2 gives -3/2 on T1^-1 T3 in x1(t)
    model = SolvableModel({1: 3.0, 3: 1.0}, [(3.0, {1: -1, 3: 1}), (3.0, {1: 1, 3: -1})])
    traj = evolve_positions(model)[1]
    coeffs = {t.word: (t.coeff, t.profile) for t in traj.terms}
    c, prof = coeffs[ShiftWord.of({1: -1, 3: 1})]
    assert c == pytest.approx(-1.5)
    assert prof == Oscillatory(2.0)
    c, prof = coeffs[ShiftWord.of({1: 1, 3: -1})]
    assert c == pytest.approx(-1.5)
    assert prof == Oscillatory(-2.0)


@settings(max_examples=40, deadline=None)
@given(solvable_models(), st.floats(-5, 5))
def test_closed_form_solves_heisenberg_equation(model, t):
    H = model.hamiltonian()
    for j, traj in evolve_positions(model).items():
        residual = traj.derivative_at(t) - heisenberg_rhs(H, traj.at(t))
        assert residual.is_zero(tol=1e-9), (j, residual)


@settings(max_examples=30, deadline=None)
@given(solvable_models(), st.floats(-3, 3))
def test_derivative_matches_finite_difference(model, t):
    h = 1e-5
    for traj in evolve_positions(model).values():
        fd = (traj.at(t + h) - traj.at(t - h)) / (2 * h)
        assert fd.allclose(traj.derivative_at(t), atol=1e-6 * max(1.0, fd.max_abs_coeff()))


@settings(max_examples=30, deadline=None)
@given(solvable_models(), st.floats(-5, 5))
def test_evolved_positions_stay_hermitian(model, t):
    for j, traj in evolve_positions(model).items():
        assert traj.at(0.0).allclose(x_op(j))
        assert is_hermitian(traj.at(t))


@settings(max_examples=30, deadline=None)
@given(solvable_models(), st.fixed_dictionaries({j: st.floats(-3, 3) for j in (1, 2, 3)}))
def test_conserved_combinations(model, centers):
    H = model.hamiltonian()
    modes, basis = conserved_linear(model)
    state = GaussianState(centers)
    trajs = evolve_positions(model)
    times = np.linspace(0, 4, 9)
    for alpha in basis:
        q = sum((a * x_op(j) for a, j in zip(alpha, modes)), 0 * x1)
        assert commutator(H, q).is_zero(tol=1e-9)
        total = sum(a * mean_trajectory(trajs[j], state, times) for a, j in zip(alpha, modes))
        np.testing.assert_allclose(total, total[0], atol=1e-9 * max(1.0, abs(total[0])))


def test_mean_trajectory_matches_expectation_of_operator():
    model = SolvableModel({1: 2.0, 2: 0.7, 3: 1.0},
                          [(1 + 1j, {1: -1, 2: 1, 3: 1}), (1 - 1j, {1: 1, 2: -1, 3: -1})])
    state = GaussianState.of(k1=2.0, k2=-1.0, k3=0.5)
    trajs = evolve_positions(model)
    times = np.array([0.0, 0.3, 1.7])
    for traj in trajs.values():
        direct = [expectation(state, traj.at(t)).real for t in times]
        np.testing.assert_allclose(mean_trajectory(traj, state, times), direct, atol=1e-13)


def test_resonant_word_gives_secular_term_with_constant_mean():
    model = SolvableModel({1: 1.0, 3: 1.0}, [(0.8, {1: -1, 3: 1}), (0.8, {1: 1, 3: -1})])
    traj = evolve_positions(model)[1]
    assert all(isinstance(t.profile, Secular) for t in traj.terms)
    H = model.hamiltonian()
    assert (traj.derivative_at(2.0) - heisenberg_rhs(H, traj.at(2.0))).is_zero(tol=1e-12)
    means = mean_trajectory(traj, GaussianState.of(k1=1.0, k3=4.0), np.linspace(0, 50, 11))
    np.testing.assert_allclose(means, 1.0, atol=1e-12)


def test_from_hamiltonian_round_trip():
    model = SolvableModel({1: 3.0, 3: 1.0}, [(3.0, {1: -1, 3: 1}), (3.0, {1: 1, 3: -1})])
    again = SolvableModel.from_hamiltonian(model.hamiltonian())
    assert again.omegas == model.omegas
    assert again.hamiltonian() == model.hamiltonian()


def test_rejections():
    with pytest.raises(NotSolvableError):
        SolvableModel.from_hamiltonian(GatedPP().build())
    with pytest.raises(NotSolvableError):
        SolvableModel({1: 1.0, 3: 1.0}, [(1.0, {1: -1, 3: 1})])
    with pytest.raises(ValueError):
        SolvableModel({1: 0.0, 3: 1.0})
    with pytest.raises(ValueError):
        SolvableModel({1: 1.0}, [(1.0, {3: 1}), (1.0, {3: -1})])
    with pytest.raises(NotSolvableError):
        SolvableModel.from_hamiltonian(x1 * x1 + x3)


def test_conserved_linear_of_free_model_is_everything():
    modes, basis = conserved_linear(SolvableModel({1: 1.0, 3: 2.0}))
    assert modes == (1, 3)
    np.testing.assert_array_equal(basis, np.eye(2))


def test_negative_excursions_reports_times():
    t = np.linspace(0, 1, 5)
    assert negative_excursions([1.0, -0.1, 0.5, -2.0, 0.0], t) == [0.25, 0.75]
    assert negative_excursions(np.ones(5), t) == []

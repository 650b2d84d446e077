import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings

from helpers import exprs
from ladderdyn import GaussianState, GridConfig, TruncationError, discretize_state, propagate
from ladderdyn import expectation, shift_op, x_op
from ladderdyn.models import QuadraticPP, quadratic_mean_reference
from ladderdyn.oracle import (
    InstabilityError,
    apply_hamiltonian,
    boundary_mass,
    grid_means,
    mean_x,
    read_trajectory,
    write_trajectory,
)

SHARED = GridConfig(extents={1: (-10.0, 10.0), 3: (-10.0, 10.0)}, cells_per_unit=4)
x1, x3 = x_op(1), x_op(3)
T1, T3 = shift_op(1), shift_op(3)


def test_config_validation():
    with pytest.raises(ValueError):
        GridConfig(cells_per_unit=3)
    with pytest.raises(ValueError):
        GridConfig(cells_per_unit=4.5)
    with pytest.raises(ValueError):
        GridConfig(boundary_mass_threshold=0.0)
    with pytest.raises(ValueError):
        GridConfig(integrator="euler")
    with pytest.raises(ValueError):
        GridConfig(half_width=1.1, cells_per_unit=4)
    with pytest.raises(ValueError):
        GridConfig(dt=0.0)
    assert GridConfig().extent_for(1, 2.4) == (-10.0, 14.0)


def test_discretized_state_moments():
    psi = discretize_state(GaussianState.of(k1=1.5, k3=-0.5), GridConfig(cells_per_unit=4))
    assert psi.norm() == pytest.approx(1.0)
    means = grid_means(psi)
    assert means[1] == pytest.approx(1.5, abs=1e-12)
    assert means[3] == pytest.approx(-0.5, abs=1e-12)
    assert mean_x(psi, 3) == pytest.approx(-0.5, abs=1e-12)
    assert boundary_mass(psi) < 1e-20
    with pytest.raises(ValueError):
        discretize_state(GaussianState.of(k1=0.0), GridConfig(half_width=3))


def test_translation_expectation_on_grid():
    # spectral accuracy of the lattice sum: e^{-1/4} for a unit shift
    psi = discretize_state(GaussianState.of(k1=0.3, k3=1.0), SHARED)
    for op, ref in [(T1, math.exp(-0.25)), (T1 * T3.dag(), math.exp(-0.5)),
                    (x1 * T1, math.exp(-0.25) * (0.3 - 0.5))]:
        assert psi.inner(apply_hamiltonian(psi, op)) == pytest.approx(ref, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(exprs(max_terms=2, modes=(1, 3)), exprs(max_terms=2, modes=(1, 3)))
def test_grid_action_respects_products(a, b):
    psi = discretize_state(GaussianState.of(k1=0.5, k3=-0.5), SHARED)
    lhs = apply_hamiltonian(apply_hamiltonian(psi, b), a).amplitudes
    rhs = apply_hamiltonian(psi, a * b).amplitudes
    scale = max(1.0, float(np.max(np.abs(rhs))))
    np.testing.assert_allclose(lhs, rhs, atol=1e-9 * scale)


@settings(max_examples=25, deadline=None)
@given(exprs(max_terms=3, modes=(1, 3)))
def test_grid_adjoint_and_gaussian_expectation(a):
    phi = discretize_state(GaussianState.of(k1=0.5, k3=-0.5), SHARED)
    psi = discretize_state(GaussianState.of(k1=-1.0, k3=0.7), SHARED)
    lhs = phi.inner(apply_hamiltonian(psi, a))
    rhs = apply_hamiltonian(phi, a.dag()).inner(psi)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))
    exact = expectation(GaussianState.of(k1=0.5, k3=-0.5), a)
    assert abs(phi.inner(apply_hamiltonian(phi, a)) - exact) <= 1e-9 * max(1.0, abs(exact))


def _quadratic_run(cfg, t):
    m = QuadraticPP(3.0, 1.0, 1.0)
    psi0 = discretize_state(GaussianState.of(k1=1.0, k3=2.0), cfg)
    res = propagate(psi0, m.build().hamiltonian(), t, cfg)
    return m, res


def test_propagation_matches_closed_form_and_conserves_norm():
    t = np.linspace(0, 1.5, 7)
    cfg = GridConfig(half_width=10, cells_per_unit=4, integrator="krylov", dt=0.05)
    m, res = _quadratic_run(cfg, t)
    ref1, ref3 = quadratic_mean_reference(m, 1.0, 2.0, t)
    np.testing.assert_allclose(res.means[1], ref1, atol=1e-6)
    np.testing.assert_allclose(res.means[3], ref3, atol=1e-6)
    assert res.norm_drift < 1e-10
    assert res.info["integrator"] == "krylov"
    assert res.info["dims"] == (81, 81)


def test_rk4_converges_at_fourth_order():
    t = np.array([0.0, 1.0])
    base = dict(half_width=8, cells_per_unit=4)
    _, ref = _quadratic_run(GridConfig(**base, integrator="krylov", dt=0.02, krylov_tol=1e-13), t)
    errs = []
    for dt in (0.05, 0.025):
        _, res = _quadratic_run(GridConfig(**base, dt=dt), t)
        errs.append(abs(res.means[1][-1] - ref.means[1][-1]))
    # the ratio approaches 16 from above (about 20 at these steps)
    assert 12 < errs[0] / errs[1] < 24


def test_rk4_and_krylov_agree():
    t = np.linspace(0, 1, 5)
    _, a = _quadratic_run(GridConfig(half_width=8, cells_per_unit=4, dt=0.01), t)
    _, b = _quadratic_run(GridConfig(half_width=8, cells_per_unit=4, integrator="krylov", dt=0.1), t)
    np.testing.assert_allclose(a.means[1], b.means[1], atol=1e-8)


def test_truncation_is_detected():
    cfg = GridConfig(half_width=5, cells_per_unit=4, integrator="krylov", dt=0.1)
    m = QuadraticPP(3.0, 1.0, 3.0)
    psi0 = discretize_state(GaussianState.of(k1=0.0, k3=0.0), cfg)
    with pytest.raises(TruncationError):
        propagate(psi0, m.build().hamiltonian(), np.linspace(0, 2, 5), cfg)


def test_instability_is_detected():
    cfg = GridConfig(half_width=8, cells_per_unit=4, dt=0.5)
    m = QuadraticPP(3.0, 1.0, 1.0)
    psi0 = discretize_state(GaussianState.of(k1=0.0, k3=0.0), cfg)
    with pytest.raises(InstabilityError):
        propagate(psi0, m.build().hamiltonian(), [0.0, 0.5, 1.0], cfg)


def test_non_hermitian_hamiltonian_is_rejected():
    psi0 = discretize_state(GaussianState.of(k1=0.0), GridConfig(cells_per_unit=4))
    with pytest.raises(ValueError):
        propagate(psi0, T1, [0.0, 1.0])
    with pytest.raises(ValueError):
        propagate(psi0, x1, [1.0, 0.5])


def test_trajectory_dump_round_trip(tmp_path):
    path = tmp_path / "traj.bin"
    t = np.linspace(0, 1, 4)
    series = {3: np.arange(4.0), 1: -np.arange(4.0)}
    write_trajectory(path, t, series)
    raw = path.read_bytes()
    assert raw[:4] == b"LDTJ"
    assert struct.unpack_from("<IIQ", raw, 4) == (1, 2, 4)
    assert struct.unpack_from("<2I", raw, 20) == (1, 3)
    assert len(raw) == 28 + 4 * 3 * 8
    t2, s2 = read_trajectory(path)
    np.testing.assert_array_equal(t2, t)
    np.testing.assert_array_equal(s2[1], series[1])
    np.testing.assert_array_equal(s2[3], series[3])
    (tmp_path / "bad.bin").write_bytes(b"XXXX")
    with pytest.raises(ValueError):
        read_trajectory(tmp_path / "bad.bin")

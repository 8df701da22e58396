import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrfcompare.group import (
    CyclicGroup,
    NotInvariantError,
    charge_projector,
    charge_weights,
    fourier_vector,
    global_unitary,
    invariance_residual,
    require_invariant,
    shift_matrix,
    shift_operator,
)
from qrfcompare.linalg import RegisterLayout, StateVector, random_density
from qrfcompare.twirl import incoherent_twirl

from conftest import S2, X, kron, ket, psi0_oracle, psi1_oracle, shift

L3 = RegisterLayout.uniform(2, 3)


def test_group_order_validation():
    with pytest.raises(ValueError):
        CyclicGroup(1)
    assert CyclicGroup(3).reduce(-1) == 2


def test_shift_is_pauli_x():
    assert np.array_equal(shift_operator(CyclicGroup(2)).matrix, X)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_shift_matrix_matches_oracle(N):
    for p in range(-N, 2 * N):
        assert np.allclose(shift_matrix(N, p), shift(N, p))


def test_global_unitary_is_xxx():
    assert np.allclose(global_unitary(1, L3).matrix, kron(X, X, X))
    assert np.allclose(global_unitary(2, L3).matrix, np.eye(8))


def test_ghz_invariant_and_psi1_flips():
    ghz = S2 * (ket("000") + ket("111"))
    u = global_unitary(1, L3).matrix
    assert np.allclose(u @ ghz, ghz)
    assert np.allclose(u @ psi1_oracle(), -psi1_oracle())
    assert np.allclose(u @ psi0_oracle(), psi0_oracle())


def test_trivial_projector_form():
    assert np.allclose(charge_projector(0, L3).matrix, (np.eye(8) + kron(X, X, X)) / 2)
    assert np.allclose(charge_projector(1, L3).matrix, (np.eye(8) - kron(X, X, X)) / 2)


def test_psi0_in_trivial_sector():
    p0 = psi0_oracle()
    assert np.allclose(charge_projector(0, L3).matrix @ p0, p0)
    assert np.allclose(charge_projector(1, L3).matrix @ p0, 0)


@pytest.mark.parametrize("N,n", [(2, 3), (3, 2), (3, 3), (4, 2)])
def test_projectors_complete_orthogonal_and_sized(N, n):
    lay = RegisterLayout.uniform(N, n)
    ps = [charge_projector(k, lay).matrix for k in range(N)]
    assert np.allclose(sum(ps), np.eye(N**n))
    for k in range(N):
        for j in range(N):
            assert np.allclose(ps[k] @ ps[j], ps[k] if k == j else 0)
        assert np.linalg.matrix_rank(ps[k]) == N ** (n - 1)
        assert np.allclose(ps[k], ps[k].conj().T)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_sector_eigenvalue_convention(N):
    lay = RegisterLayout.uniform(N, 2)
    rng = np.random.default_rng(N)
    omega = np.exp(2j * np.pi / N)
    for k in range(N):
        v = charge_projector(k, lay).matrix @ (rng.standard_normal(N * N) + 0j)
        for g in range(N):
            assert np.allclose(global_unitary(g, lay).matrix @ v, omega ** (k * g) * v)


def test_charge_weights_scenario_states():
    p0 = StateVector(L3, psi0_oracle()).projector()
    p1 = StateVector(L3, psi1_oracle()).projector()
    assert np.allclose(charge_weights(p0), [1, 0])
    assert np.allclose(charge_weights(p1), [0, 1])


def test_charge_weights_reject_non_invariant():
    with pytest.raises(NotInvariantError):
        charge_weights(StateVector.basis(L3, [0, 0, 1]).projector())


def test_fourier_vectors():
    g = CyclicGroup(2)
    assert np.allclose(fourier_vector(0, g).amplitudes, [S2, S2])
    assert np.allclose(fourier_vector(1, g).amplitudes, [S2, -S2])
    assert np.allclose(X @ fourier_vector(0, g).amplitudes, fourier_vector(0, g).amplitudes)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_fourier_vector_charge(N):
    omega = np.exp(2j * np.pi / N)
    for k in range(N):
        v = fourier_vector(k, CyclicGroup(N)).amplitudes
        assert np.allclose(shift(N) @ v, omega**k * v)
        assert abs(np.linalg.norm(v) - 1) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_twirled_states_are_invariant_and_weights_sum_to_one(N, seed):
    lay = RegisterLayout.uniform(N, 2)
    rho = incoherent_twirl(random_density(lay, np.random.default_rng(seed)))
    assert invariance_residual(rho) < 1e-12
    require_invariant(rho)
    w = charge_weights(rho)
    assert abs(w.sum() - 1) < 1e-12 and (w >= 0).all()


def test_character_exact_signs():
    g = CyclicGroup(4)
    assert g.character(1, 2) == -1
    assert g.character(2, 2) == 1
    assert abs(g.character(1, 1) - 1j) < 1e-15

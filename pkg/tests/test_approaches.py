import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrfcompare.approaches import (
    ExtraParticleState,
    MultiSectorError,
    NotPhysicalStateError,
    OperationalClass,
    controlled_change_matrix,
    disentangler,
    ep_change,
    ep_change_operator,
    extract_extra_particle,
    frame_change_matrix,
    op_canonicalize,
    op_change,
    op_frame_change,
    pn_change,
    pn_change_global,
)
from qrfcompare.frames import FrameSpec, RelativeState, reduce
from qrfcompare.linalg import DensityOperator, RegisterLayout, StateVector, random_density, random_state
from qrfcompare.twirl import coherent_twirl, incoherent_twirl

from conftest import S2, X, kron, ket, psi0_oracle, psi1_oracle

L2 = RegisterLayout.uniform(2, 2)
L3 = RegisterLayout.uniform(2, 3)
A, B, C = FrameSpec(0), FrameSpec(1), FrameSpec(2)
P0, P1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
REL_A = S2 * (ket("01") - ket("11"))
REL_B0 = S2 * (ket("01") - ket("10"))
REL_B1 = S2 * (ket("01") + ket("10"))
seeds = st.integers(0, 2**32 - 1)


def sv(a):
    return StateVector(L3, a)


def sector_state(layout, k, rng):
    return coherent_twirl(random_state(layout, rng), k).normalized()


# perspective-neutral


def test_pn_change_worked_value():
    out = pn_change(reduce(sv(psi0_oracle()), A), B)
    assert np.abs(out.body.amplitudes - REL_B0).max() < 1e-12
    assert out.registers == (0, 2)


def test_pn_rejects_psi1():
    with pytest.raises(NotPhysicalStateError, match="not a physical state"):
        pn_change_global(sv(psi1_oracle()), A, B)
    with pytest.raises(NotPhysicalStateError):
        pn_change(reduce(sv(psi1_oracle()), A), B, sector=1)


@pytest.mark.parametrize("N,n,s,t", [(2, 3, 0, 1), (2, 3, 2, 0), (3, 2, 0, 1), (3, 3, 1, 2)])
def test_frame_change_matrix_unitary(N, n, s, t):
    for k in range(N):
        w = frame_change_matrix(FrameSpec(s), FrameSpec(t), N, n, k)
        assert np.allclose(w.conj().T @ w, np.eye(N ** (n - 1)))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_pn_preserves_inner_products_and_inverts(seed):
    rng = np.random.default_rng(seed)
    a = RelativeState(A, (1, 2), random_state(L2, rng))
    b = RelativeState(A, (1, 2), random_state(L2, rng))
    ca, cb = pn_change(a, B), pn_change(b, B)
    assert abs(a.body.inner(b.body) - ca.body.inner(cb.body)) < 1e-10
    assert np.allclose(pn_change(ca, A).body.amplitudes, a.body.amplitudes)


def test_pn_density_matches_vector(rng):
    a = RelativeState(A, (1, 2), random_state(L2, rng))
    as_density = RelativeState(A, (1, 2), a.body.projector())
    assert np.allclose(pn_change(as_density, B).density().matrix, pn_change(a, B).density().matrix)


# extra-particle


def test_disentangler_oracle_at_a():
    assert np.allclose(disentangler(A, L3).matrix, kron(P0, np.eye(4)) + kron(P1, X, X))


@pytest.mark.parametrize("k,psi", [(0, psi0_oracle()), (1, psi1_oracle())])
def test_disentangler_factorizes_scenario_states(k, psi):
    chi = np.array([S2, S2 if k == 0 else -S2])
    out = disentangler(A, L3).matrix @ psi
    assert np.allclose(out, np.kron(chi, REL_A))


def test_controlled_change_oracle():
    # |0><0|_B ⊗ I_C ± |1><1|_B ⊗ X_C on the registers relative to A
    assert np.allclose(controlled_change_matrix(A, B, 3, 0), kron(P0, np.eye(2)) + kron(P1, X))
    assert np.allclose(controlled_change_matrix(A, B, 3, 1), kron(P0, np.eye(2)) - kron(P1, X))


@pytest.mark.parametrize("s,t", [(0, 1), (1, 0), (0, 2), (2, 1)])
def test_controlled_equals_reconstruct_route(s, t):
    fs, ft = FrameSpec(s), FrameSpec(t)
    for k in (0, 1):
        assert np.allclose(controlled_change_matrix(fs, ft, 3, k), frame_change_matrix(fs, ft, 2, 3, k))
    a = ep_change_operator(fs, ft, L3, "controlled").matrix
    b = ep_change_operator(fs, ft, L3, "reconstruct").matrix
    assert np.allclose(a, b)
    assert np.allclose(a.conj().T @ a, np.eye(8))


@pytest.mark.parametrize("route", ["reconstruct", "controlled"])
@pytest.mark.parametrize("k,psi,want", [(0, psi0_oracle(), REL_B0), (1, psi1_oracle(), REL_B1)])
def test_ep_change_worked_values(route, k, psi, want):
    x = extract_extra_particle(sv(psi), A)
    assert x.charge == k
    assert np.allclose(x.relative.body.amplitudes, REL_A)
    y = ep_change(x, B, route=route)
    assert y.charge == k
    assert np.abs(y.relative.body.amplitudes - want).max() < 1e-12


def test_extra_particle_rejects_mixed_sectors():
    psi = sv((psi0_oracle() + psi1_oracle()) / np.sqrt(2))
    with pytest.raises(MultiSectorError):
        extract_extra_particle(psi, A)


def test_extra_particle_state_validation():
    rel = reduce(sv(psi0_oracle()), A)
    with pytest.raises(MultiSectorError):
        ExtraParticleState(StateVector(RegisterLayout((2,)), [1, 0]), rel)


def test_controlled_route_only_for_z2():
    with pytest.raises(ValueError):
        ep_change_operator(A, B, RegisterLayout.uniform(3, 2), "controlled")


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(2, 3, 0, 1), (2, 3, 2, 1), (3, 2, 0, 1), (3, 3, 1, 0)]), seeds)
def test_ep_change_matches_global_route(case, seed):
    N, n, s, t = case
    rng = np.random.default_rng(seed)
    lay = RegisterLayout.uniform(N, n)
    k = int(rng.integers(0, N))
    psi = sector_state(lay, k, rng)
    x = extract_extra_particle(psi, FrameSpec(s))
    y = ep_change(x, FrameSpec(t))
    assert y.charge == k
    assert np.allclose(y.relative.body.amplitudes, reduce(psi, FrameSpec(t)).body.amplitudes)
    if k == 0:
        assert np.allclose(y.relative.body.amplitudes, pn_change(x.relative, FrameSpec(t)).body.amplitudes)
    back = ep_change(y, FrameSpec(s))
    assert np.allclose(back.relative.body.amplitudes, x.relative.body.amplitudes)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_ep_routes_agree_at_n2(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(0, 2))
    x = extract_extra_particle(sector_state(L3, k, rng), A)
    a = ep_change(x, C, route="reconstruct").relative.body.amplitudes
    b = ep_change(x, C, route="controlled").relative.body.amplitudes
    assert np.abs(a - b).max() < 1e-10


# operational


def test_op_collapse_and_representative():
    c0 = op_canonicalize(reduce(sv(psi0_oracle()), B), 0)
    c1 = op_canonicalize(reduce(sv(psi1_oracle()), B), 0)
    assert c0.same_as(c1)
    assert np.allclose(c0.representative.density().matrix, np.diag([0, 0.5, 0.5, 0]))


def test_op_change_worked_value():
    # class of Alice's dephased state goes to the class of Bob's
    cls = op_canonicalize(reduce(sv(psi0_oracle()), A), 1)
    assert np.allclose(cls.representative.density().matrix, np.diag([0, 0.5, 0, 0.5]))
    out = op_change(cls)
    assert out.outer == 1 and out.inner == 0
    assert np.allclose(out.representative.density().matrix, np.diag([0, 0.5, 0.5, 0]))
    assert op_frame_change(reduce(sv(psi1_oracle()), A), B).same_as(out)


def test_equal_mixture_is_in_the_class():
    mix = (np.outer(REL_B0, REL_B0) + np.outer(REL_B1, REL_B1)) / 2
    assert np.allclose(mix, np.diag([0, 0.5, 0.5, 0]))
    c = op_canonicalize(RelativeState(B, (0, 2), DensityOperator(L2, mix)), 0)
    assert c.same_as(op_canonicalize(reduce(sv(psi0_oracle()), B), 0))


def test_operational_class_requires_dephased_representative():
    with pytest.raises(ValueError):
        OperationalClass(reduce(sv(psi0_oracle()), B), 0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(2, 3, 0, 1), (2, 3, 2, 0), (3, 2, 0, 1), (3, 3, 1, 2)]), seeds)
def test_op_change_is_an_involution_consistent_with_reduction(case, seed):
    N, n, s, t = case
    rng = np.random.default_rng(seed)
    lay = RegisterLayout.uniform(N, n)
    res = lay.without(s)
    rho = incoherent_twirl(random_density(lay, rng))
    cls = op_canonicalize(reduce(rho, FrameSpec(s)), t)
    moved = op_change(cls)
    assert op_change(moved).distance(cls) < 1e-10
    assert moved.distance(op_canonicalize(reduce(rho, FrameSpec(t)), s)) < 1e-10
    other = op_canonicalize(RelativeState(FrameSpec(s), cls.representative.registers, random_density(res, rng)), t)
    assert abs(op_change(other).distance(moved) - other.distance(cls)) < 1e-10

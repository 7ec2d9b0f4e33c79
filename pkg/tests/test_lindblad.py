import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from opendecay import _superop as so
from opendecay.errors import StructuralError
from opendecay.lindblad import (
    Liouvillian2,
    bloch_density_bridge,
    gks_check,
    propagate_density,
    random_density_matrix,
    spin_liouvillian,
    steady_states,
)
from opendecay.model import DensityMatrix2, make_spin_params

RNG = np.random.default_rng(1234)


def _rand_matrix(d):
    return RNG.normal(size=(d, d)) + 1j * RNG.normal(size=(d, d))


# ----------------------------------------------------------------- superop


def test_vec_unvec_roundtrip_row_major():
    a = np.arange(4.0).reshape(2, 2)
    v = so.vec(a)
    assert np.allclose(v, [0.0, 1.0, 2.0, 3.0])  # rows concatenated
    assert np.allclose(so.unvec(v, 2), a)


@pytest.mark.parametrize("d", [2, 3])
def test_left_right_represents_sandwich(d):
    a, b, x = _rand_matrix(d), _rand_matrix(d), _rand_matrix(d)
    assert np.allclose(so.left_right(a, b) @ so.vec(x), so.vec(a @ x @ b))


def test_commutator_super_action():
    h, x = _rand_matrix(2), _rand_matrix(2)
    got = so.unvec(so.commutator_super(h) @ so.vec(x), 2)
    assert np.allclose(got, h @ x - x @ h)


def test_reshuffle_is_an_involution():
    m = _rand_matrix(4)
    assert np.allclose(so.reshuffle(so.reshuffle(m, 2), 2), m)


def test_choi_of_identity_channel_is_maximally_entangled():
    choi = so.choi_matrix(np.eye(4), 2)
    v = so.vec(np.eye(2))
    assert np.allclose(choi, np.outer(v, v.conj()))


# --------------------------------------------------------------- liouvillian


def test_spin_liouvillian_structure_checks():
    liouv = spin_liouvillian(make_spin_params(1.0, 2.0), 0.5)
    assert so.trace_dual_defect(liouv.matrix, 2) < 1e-14
    assert so.hermiticity_involution_defect(liouv.matrix, 2) < 1e-14
    with pytest.raises(StructuralError):
        Liouvillian2(
            matrix=liouv.matrix + 0.01 * np.eye(4),
            hamiltonian_part=liouv.hamiltonian_part,
            dissipator_part=liouv.dissipator_part,
        )


def test_propagation_conserves_trace_and_positivity():
    liouv = spin_liouvillian(make_spin_params(1.0, 1.0), 0.8)
    rho0 = np.array([[0.9, 0.1j], [-0.1j, 0.1]])
    tau = np.linspace(0.0, 8.0, 33)
    states = propagate_density(liouv, rho0, tau, rtol=1e-11)
    traces = np.trace(states, axis1=1, axis2=2)
    assert np.max(np.abs(traces - 1.0)) < 1e-10
    assert np.min(np.linalg.eigvalsh(states)) > -1e-10


def test_propagation_accepts_wrapped_state_and_expm_route():
    liouv = spin_liouvillian(make_spin_params(0.5, 1.5), 0.3)
    rho0 = DensityMatrix2(np.array([[0.7, 0.2], [0.2, 0.3]], dtype=complex))
    tau = np.linspace(0.0, 3.0, 7)
    adaptive = propagate_density(liouv, rho0, tau, rtol=1e-11)
    exact = propagate_density(liouv, rho0, tau, method="expm")
    assert np.max(np.abs(adaptive - exact)) < 1e-9


def test_generic_steady_state_is_maximally_mixed():
    liouv = spin_liouvillian(make_spin_params(1.0, 2.0), 0.6)
    basis = steady_states(liouv)
    assert len(basis) == 1
    rho = basis[0] / np.trace(basis[0])
    assert np.allclose(rho, 0.5 * np.eye(2), atol=1e-10)


def test_zero_tunneling_has_two_conserved_directions():
    # delta = 0: populations decouple and are individually conserved
    liouv = spin_liouvillian(make_spin_params(2.0, 0.0), 0.6)
    basis = steady_states(liouv)
    assert len(basis) == 2
    for b in basis:
        assert np.allclose(b - np.diag(np.diag(b)), 0.0, atol=1e-12)


def test_gks_matrix_of_spin_dissipator():
    spin = make_spin_params(3.0, 4.0)
    report = gks_check(spin_liouvillian(spin, 1.2))
    eigs = np.linalg.eigvalsh(report.gks_matrix)
    assert report.is_lindblad
    assert eigs[-1] == pytest.approx(0.6, abs=1e-12)
    assert np.max(np.abs(eigs[:-1])) < 1e-12
    # the single unit-rank direction is the coupling vector itself
    vec = np.array([spin.delta_tilde, 0.0, spin.eps_tilde])
    assert np.allclose(report.gks_matrix @ vec, 0.6 * vec, atol=1e-12)


def test_gks_check_accepts_raw_matrix_and_rejects_nontrace():
    liouv = spin_liouvillian(make_spin_params(1.0, 1.0), 0.4)
    report = gks_check(np.asarray(liouv.matrix))
    assert report.is_lindblad
    with pytest.raises(StructuralError):
        gks_check(np.eye(4))


@settings(max_examples=25, deadline=None)
@given(
    st.floats(-3.0, 3.0),
    st.floats(0.1, 3.0),
    st.floats(0.0, 4.0),
    st.floats(0.01, 3.0),
)
def test_evolution_is_completely_positive(eps, delta, g, tau):
    liouv = spin_liouvillian(make_spin_params(eps, delta), g)
    channel = scipy.linalg.expm(liouv.matrix * tau)
    choi = so.choi_matrix(channel, 2)
    assert np.min(np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))) > -1e-10


def test_random_density_matrix_is_valid():
    rng = np.random.default_rng(7)
    for _ in range(10):
        rho = random_density_matrix(rng)
        assert abs(np.trace(rho) - 1.0) < 1e-12
        assert np.min(np.linalg.eigvalsh(rho)) > -1e-14
        assert np.allclose(rho, rho.conj().T)


def test_bridge_consistency_small_case():
    spin = make_spin_params(1.0, 2.0)
    rho0 = np.array([[0.8, 0.1 + 0.2j], [0.1 - 0.2j, 0.2]])
    dev = bloch_density_bridge(spin, 0.7, rho0, np.linspace(0.0, 5.0, 21))
    assert dev < 1e-9


def test_propagate_density_rejects_bad_method():
    liouv = spin_liouvillian(make_spin_params(1.0, 1.0), 0.4)
    with pytest.raises(ValueError):
        propagate_density(liouv, 0.5 * np.eye(2), [0.0, 1.0], method="euler")

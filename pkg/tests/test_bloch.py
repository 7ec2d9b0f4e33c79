import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from opendecay.bloch import (
    TRIPLE_AT_ZERO,
    decay_spectrum,
    find_classification_boundary,
    propagate_bloch,
    propagator_matrix,
    rapid_generator,
    scan_decay_regimes,
    weak_generator,
)
from opendecay.errors import AccuracyError
from opendecay.model import BathSpectrum, make_spin_params

eps_st = st.floats(-4.0, 4.0)
delta_st = st.floats(0.05, 4.0)
gamma_st = st.floats(0.0, 6.0)

# conjugation that swaps the raising/lowering coefficients
_J = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=float)


def test_triple_basis_at_zero():
    dp, dz, dm = TRIPLE_AT_ZERO
    assert np.allclose(dp, [[0, 1], [0, 0]])
    assert np.allclose(dz, np.diag([1, -1]))
    assert np.allclose(dm, dp.conj().T)


@given(eps_st, delta_st, gamma_st)
def test_real_trace_is_minus_two_gamma(eps, delta, g):
    gen = rapid_generator(make_spin_params(eps, delta), g)
    assert float(np.trace(gen.matrix).real) == pytest.approx(
        -2.0 * g, abs=1e-12 * max(1.0, g)
    )
    assert float(np.trace(gen.matrix).imag) == pytest.approx(0.0, abs=1e-12)


@given(eps_st, delta_st, gamma_st)
def test_conjugation_symmetry(eps, delta, g):
    # swapping raising <-> lowering and conjugating returns the generator
    m = rapid_generator(make_spin_params(eps, delta), g).matrix
    assert np.allclose(_J @ m.conj() @ _J, m, atol=1e-14)


@given(eps_st, delta_st, gamma_st)
@settings(max_examples=60)
def test_spectrum_never_grows(eps, delta, g):
    spec = decay_spectrum(rapid_generator(make_spin_params(eps, delta), g))
    assert np.all(spec.eigenvalues.real <= 1e-10 * max(1.0, g))
    assert np.allclose(spec.decay_constants, -spec.eigenvalues.real)


@given(st.floats(0.05, 6.0), st.floats(0.25, 8.0))
@settings(max_examples=60)
def test_zero_bias_spectrum_closed_form(delta, g):
    # eps = 0: eigenvalues are -g and -g/2 +- sqrt(g^2/4 - omega0^2);
    # skip the defective point g = 2 omega0 where the pair merges
    spin = make_spin_params(0.0, delta)
    w0 = spin.omega0
    assume(abs(g - 2.0 * w0) > 1e-3 * w0)
    got = decay_spectrum(rapid_generator(spin, g)).eigenvalues
    disc = complex(g * g / 4.0 - w0 * w0) ** 0.5
    tol = 1e-10 * max(1.0, g, w0)
    for want in (-g, -g / 2.0 + disc, -g / 2.0 - disc):
        assert np.min(np.abs(got - want)) < tol


def test_zero_tunneling_generator_is_diagonal():
    spin = make_spin_params(2.0, 0.0)
    m = rapid_generator(spin, 0.7).matrix
    assert np.allclose(m, np.diag([-0.7 + 2.0j, 0.0, -0.7 - 2.0j]))


def test_weak_generator_rates():
    spin = make_spin_params(1.0, 1.0)
    bath = BathSpectrum(0.3, 5.0, "exponential", 2.0)
    gen = weak_generator(spin, bath)
    gamma_d = -gen.matrix[0, 0].real
    gamma_r = -gen.matrix[1, 1].real
    assert gamma_r == pytest.approx(2.0 * gamma_d, rel=1e-14)
    # delta_tilde^2 = 1/2 here
    assert gamma_r == pytest.approx(0.5 * 0.9417375717288882, rel=1e-12)
    assert gen.matrix[0, 0].imag == pytest.approx(spin.omega0)
    assert np.count_nonzero(gen.matrix - np.diag(np.diag(gen.matrix))) == 0


def test_propagation_routes_agree():
    gen = rapid_generator(make_spin_params(1.0, 2.0), 0.9)
    tau = np.linspace(0.0, 6.0, 25)
    c0 = np.array([0.3 + 0.1j, -0.2, 0.5j])
    adaptive = propagate_bloch(gen, c0, tau, rtol=1e-11)
    exact = propagate_bloch(gen, c0, tau, method="expm")
    assert np.max(np.abs(adaptive - exact)) < 1e-8


def test_propagator_matrix_is_semigroup():
    gen = rapid_generator(make_spin_params(0.5, 1.5), 0.4)
    props = propagator_matrix(gen, [0.0, 1.25, 2.5], rtol=1e-12)
    assert np.allclose(props[0], np.eye(3), atol=1e-12)
    assert np.allclose(props[1] @ props[1], props[2], atol=1e-9)


def test_classification_flips_at_twice_splitting():
    spin = make_spin_params(0.0, 1.0)
    assert (
        decay_spectrum(rapid_generator(spin, 1.9)).classification
        == "two_complex_one_real"
    )
    assert decay_spectrum(rapid_generator(spin, 2.1)).classification == "three_real"
    boundary = find_classification_boundary(spin, 1.0, 3.0, tol=1e-8)
    assert boundary == pytest.approx(2.0, abs=1e-6)


def test_boundary_requires_bracketing():
    spin = make_spin_params(0.0, 1.0)
    with pytest.raises(AccuracyError):
        find_classification_boundary(spin, 0.1, 0.2, tol=1e-8)
    with pytest.raises(AccuracyError):
        find_classification_boundary(spin, 4.0, 6.0, tol=1e-8)


def test_scan_decay_regimes_order_and_content():
    spin = make_spin_params(0.0, 1.0)
    out = scan_decay_regimes(spin, [0.5, 2.5])
    assert [g for g, _ in out] == [0.5, 2.5]
    assert out[0][1].classification == "two_complex_one_real"
    assert out[1][1].classification == "three_real"


def test_biased_system_oscillates_at_any_damping():
    # with eps != 0 the +-i omega0 pair survives arbitrarily strong damping
    spin = make_spin_params(1.0, 1.0)
    for g in (5.0, 50.0):
        spec = decay_spectrum(rapid_generator(spin, g))
        assert spec.classification == "two_complex_one_real"


def test_rejects_negative_gamma():
    with pytest.raises(ValueError):
        rapid_generator(make_spin_params(1.0, 1.0), -0.1)

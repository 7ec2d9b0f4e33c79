"""Moment transport and its truncated number-basis counterpart."""

import math

import numpy as np
import pytest

from opendecay.errors import TruncationError, ValidationError
from opendecay.model import GaussianState, OscillatorParams
from opendecay.qbm.coefficients import QBMCoefficients, limit_coefficients
from opendecay.qbm.fock import (
    coherent_density,
    fock_moments,
    ladder_operators,
    truncated_basis_propagate,
)
from opendecay.qbm.moments import (
    MOMENT_LABELS,
    coefficient_functions,
    propagate_moments,
)

OSC = OscillatorParams(1.0, 1.0)


def _free_coeffs():
    return QBMCoefficients(np.array([0.0]), OSC.omega0**2, 0.0, 0.0, 0.0)


def test_moment_labels_order():
    assert MOMENT_LABELS == ("mean_x", "mean_p", "var_xx", "cov_xp", "var_pp")


def test_free_oscillation_closed_form():
    # undamped harmonic transport: phase-space rotation of the means
    state0 = GaussianState(1.0, 0.0, 0.5, 0.5)
    tau = np.linspace(0.0, 7.0, 141)
    out = propagate_moments(_free_coeffs(), OSC, state0, tau)
    assert np.max(np.abs(out[:, 0] - np.cos(tau))) < 1e-9
    assert np.max(np.abs(out[:, 1] + np.sin(tau))) < 1e-9
    # the symmetric vacuum-width covariance is rotation invariant
    assert np.max(np.abs(out[:, 2] - 0.5)) < 1e-9
    assert np.max(np.abs(out[:, 3])) < 1e-9
    assert np.max(np.abs(out[:, 4] - 0.5)) < 1e-9


def test_constant_diffusion_heats_linearly():
    # diffusion without friction: mean energy grows exactly linearly,
    # dE/dtau = D_xx / M
    bath_like = QBMCoefficients(np.array([0.0]), OSC.omega0**2, 0.08, 0.0, 0.0)
    state0 = GaussianState(0.4, -0.3, 0.6, 0.7, cov_xp=0.05)
    tau = np.linspace(0.0, 9.0, 61)
    out = propagate_moments(bath_like, OSC, state0, tau)
    m, w2 = OSC.mass, OSC.omega0**2

    def energy(row, mx, mp):
        return (row[4] + mp**2) / (2.0 * m) + 0.5 * m * w2 * (row[2] + mx**2)

    e = np.array([energy(out[i], out[i, 0], out[i, 1]) for i in range(len(tau))])
    assert np.max(np.abs(e - e[0] - 0.08 / m * tau)) < 1e-8 * max(1.0, e[-1])


def test_friction_contracts_the_means():
    co = QBMCoefficients(np.array([0.0]), OSC.omega0**2, 0.0, 0.0, 0.25)
    state0 = GaussianState(1.0, 0.0, 0.5, 0.5)
    tau = np.linspace(0.0, 12.0, 25)
    out = propagate_moments(co, OSC, state0, tau)
    # underdamped envelope: |(x, p)| decays like exp(-Gamma_xp tau)
    r = np.hypot(out[:, 0], out[:, 1])
    assert r[-1] < 1.1 * math.exp(-0.25 * tau[-1])
    assert np.all(r[1:] < 1.0)


def test_coefficient_functions_constant_and_spline_paths():
    const = coefficient_functions(_free_coeffs(), np.linspace(0.0, 3.0, 7))
    assert [f(2.1) for f in const] == [1.0, 0.0, 0.0, 0.0]

    window = np.linspace(1.0, 2.0, 11)
    co = QBMCoefficients(window, 1.0 + 0.1 * window, 0.0, 0.0, 0.0)
    fns = coefficient_functions(co, np.linspace(1.0, 2.0, 5))
    assert fns[0](1.5) == pytest.approx(1.15, rel=1e-12)
    with pytest.raises(ValidationError):
        coefficient_functions(co, np.linspace(0.5, 1.5, 5))  # leaves window


def test_ladder_operators_commutator():
    x, p = ladder_operators(9, OSC)
    comm = x @ p - p @ x
    want = 1j * np.eye(10)
    want[-1, -1] = comm[-1, -1]  # truncation corrupts the corner entry
    assert np.allclose(comm, want, atol=1e-12)


def test_ladder_operators_reject_trivial_basis():
    with pytest.raises(ValidationError):
        ladder_operators(0, OSC)


def test_coherent_density_is_a_pure_state_at_the_right_spot():
    rho = coherent_density(OSC, 0.6, -0.4, 24)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-12)
    mom = fock_moments(rho[None, :, :], OSC)[0]
    assert mom[0] == pytest.approx(0.6, abs=1e-9)
    assert mom[1] == pytest.approx(-0.4, abs=1e-9)
    # vacuum widths and no cross correlation
    mw = OSC.mass * OSC.omega0
    assert mom[2] == pytest.approx(0.5 / mw, abs=1e-9)
    assert mom[3] == pytest.approx(0.0, abs=1e-9)
    assert mom[4] == pytest.approx(0.5 * mw, abs=1e-9)


def test_truncated_basis_matches_moment_transport():
    co = QBMCoefficients(np.array([0.0]), 1.1, 0.03, 0.004, 0.02)
    tau = np.linspace(0.0, 3.0, 31)
    rho0 = coherent_density(OSC, 0.5, 0.3, 30)
    states = truncated_basis_propagate(co, OSC, rho0, tau)
    got = fock_moments(states, OSC)
    want = propagate_moments(
        co, OSC, GaussianState(0.5, 0.3, 0.5, 0.5), tau
    )
    assert np.max(np.abs(got - want)) < 1e-7


def test_truncation_guard_trips_on_a_small_basis():
    co = QBMCoefficients(np.array([0.0]), 1.0, 0.3, 0.0, 0.0)  # strong heating
    tau = np.linspace(0.0, 4.0, 17)
    rho0 = coherent_density(OSC, 1.2, 0.0, 5)
    with pytest.raises(TruncationError):
        truncated_basis_propagate(co, OSC, rho0, tau)


def test_truncated_basis_input_validation():
    co = _free_coeffs()
    with pytest.raises(ValidationError):
        truncated_basis_propagate(co, OSC, np.ones(4), [0.0, 1.0])
    with pytest.raises(ValidationError):
        truncated_basis_propagate(co, OSC, np.ones((1, 1)), [0.0, 1.0])


def test_limit_coefficients_plug_into_transport():
    bath_tau = np.linspace(0.0, 2.0, 5)
    from opendecay.model import BathSpectrum

    co = limit_coefficients(BathSpectrum(0.1, 5.0, "exponential", 2.0), OSC,
                            bath_tau)
    out = propagate_moments(co, OSC, GaussianState(0.0, 0.0, 0.5, 0.5),
                            bath_tau)
    # pure heating at zero friction: individual variances slosh at 2 wR,
    # but the oscillator energy climbs monotonically
    wr_sq = co.omegaR_sq[0]
    e = out[:, 4] / (2.0 * OSC.mass) + 0.5 * OSC.mass * wr_sq * out[:, 2]
    assert np.all(np.diff(e) > 0.0)

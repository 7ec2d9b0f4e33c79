import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opendecay.errors import DivergenceError, OverdampedRenormalizationError
from opendecay.model import BathSpectrum, OscillatorParams, make_spin_params
from opendecay.spectral import (
    bose_occupation,
    dressed_rate,
    gamma_theta,
    gamma_theta_weak,
    limit_rates,
    renormalized_frequency_sq,
    self_energy,
    spectral_density,
)

BATH = BathSpectrum(eta=0.3, cutoff=5.0, shape="exponential", temperature=2.0)
HARD = BathSpectrum(eta=0.3, cutoff=5.0, shape="hard", temperature=2.0)


def test_bose_occupation_values():
    # 1/(e - 1) at omega = T
    assert bose_occupation(2.0, 2.0) == pytest.approx(1.0 / (math.e - 1.0), rel=1e-14)
    assert bose_occupation(1.0, 0.0) == 0.0
    assert bose_occupation(-1.0, 0.0) == -1.0
    with pytest.raises(DivergenceError):
        bose_occupation(0.0, 2.0)


def test_bose_occupation_detailed_balance():
    # N(-w) = -(1 + N(w))
    for w in (0.3, 1.7, 9.0):
        assert bose_occupation(-w, 2.0) == pytest.approx(
            -(1.0 + bose_occupation(w, 2.0)), rel=1e-12
        )


def test_spectral_density_shapes():
    assert spectral_density(2.0, BATH) == pytest.approx(0.6 * math.exp(-0.4))
    assert spectral_density(2.0, HARD) == pytest.approx(0.6)
    assert spectral_density(7.0, HARD) == 0.0
    assert spectral_density(-1.0, BATH) == 0.0
    assert spectral_density(0.0, BATH) == 0.0
    arr = spectral_density(np.array([-1.0, 1.0]), BATH)
    assert arr[0] == 0.0 and arr[1] > 0.0


@given(st.floats(1e-3, 20.0))
def test_dressed_rates_differ_by_bare_rate(w):
    # (1+N)*Gamma - N*Gamma = Gamma for any w > 0
    up = dressed_rate(w, BATH, "+")
    down = dressed_rate(w, BATH, "-")
    assert up - down == pytest.approx(spectral_density(w, BATH), rel=1e-12)
    assert up >= down >= 0.0


def test_dressed_rate_midpoint_at_zero():
    assert dressed_rate(0.0, BATH, "+") == pytest.approx(0.5 * 0.3 * 2.0)
    assert dressed_rate(0.0, BATH, "-") == pytest.approx(0.5 * 0.3 * 2.0)
    assert dressed_rate(-3.0, BATH, "+") == 0.0


def test_dressed_rate_flat_band_limit():
    # both branches approach eta*T as w -> 0+
    for w in (1e-4, 1e-6):
        assert dressed_rate(w, BATH, "+") == pytest.approx(0.6, rel=1e-3)
        assert dressed_rate(w, BATH, "-") == pytest.approx(0.6, rel=1e-3)


def test_limit_rates_structure():
    rates = limit_rates(BATH)
    assert rates.rate_pos == pytest.approx(0.6)
    assert rates.rate_zero == pytest.approx(0.3)
    assert rates.rate_neg == 0.0
    assert gamma_theta(BATH) == pytest.approx(2.0 * rates.rate_pos)


def test_weak_dephasing_scale_frozen_values():
    # Gamma(omega0) * coth(omega0/2T) at omega0 = sqrt(2), eta=0.3, wc=5, T=2
    spin = make_spin_params(1.0, 1.0)
    assert gamma_theta_weak(spin, BATH) == pytest.approx(
        0.9417375717288882, rel=1e-12
    )
    assert gamma_theta_weak(spin, HARD) == pytest.approx(
        1.2495882324199198, rel=1e-12
    )
    cold = BathSpectrum(0.3, 5.0, "exponential", 0.0)
    assert gamma_theta_weak(spin, cold) == pytest.approx(
        0.31974165847163955, rel=1e-12
    )
    # outside the hard band the dressed rate vanishes
    assert gamma_theta_weak(make_spin_params(3.0, 5.0), HARD) == 0.0


def test_self_energy_imaginary_part_is_half_rate():
    se = self_energy(1.3, BATH, "+")
    assert se.imag_part == pytest.approx(-0.5 * dressed_rate(1.3, BATH, "+"))


def test_self_energy_matches_slow_quadrature():
    # cross-check the principal value against a midpoint-rule evaluation
    # with explicit pole subtraction on a very fine grid
    from scipy.integrate import trapezoid

    w0 = 1.3
    se = self_energy(w0, BATH, "+", rel_tol=1e-11)
    u = np.linspace(1e-9, 100.0, 2_000_001)
    f = dressed_rate(u, BATH, "+") / (2.0 * math.pi)
    f0 = dressed_rate(w0, BATH, "+") / (2.0 * math.pi)
    # PV int f(u)/(w0-u) du = int (f(u)-f0)/(w0-u) du + f0 * log(w0/(U-w0))
    val = float(trapezoid((f - f0) / (w0 - u), u))
    val += f0 * math.log(w0 / (u[-1] - w0))
    assert se.real_part == pytest.approx(val, abs=1e-7)


@pytest.mark.parametrize("bath", [BATH, HARD])
def test_renormalized_frequency_closed_form(bath):
    # the frequency shift integral evaluates to eta*wc/(2 pi) for both
    # cutoffs: wR^2 = w0^2 - w0 * eta * wc / pi
    osc = OscillatorParams(1.0, 1.0)
    small = BathSpectrum(0.2, 5.0, bath.shape, bath.temperature)
    assert renormalized_frequency_sq(small, osc) == pytest.approx(
        0.6816901138162093, rel=1e-9
    )


def test_renormalized_frequency_zero_coupling_exact():
    osc = OscillatorParams(2.0, 3.0)
    free = BathSpectrum(0.0, 5.0, "exponential", 1.0)
    assert renormalized_frequency_sq(free, osc) == 9.0


def test_overdamped_renormalization_raises():
    osc = OscillatorParams(1.0, 1.0)
    heavy = BathSpectrum(1.0, 4.0, "hard", 1.0)  # eta*wc = 4 > pi
    with pytest.raises(OverdampedRenormalizationError):
        renormalized_frequency_sq(heavy, osc)

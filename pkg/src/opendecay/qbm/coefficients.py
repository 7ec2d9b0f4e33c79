"""Time-local coefficients of the reduced oscillator dynamics.

Given the fundamental solution ``G`` (see :mod:`.propagator`) the exact
reduced evolution is Gaussian and fully described by

* the phase matrix ``Lambda`` of the two-point kernel, assembled from
  ``G`` and its derivatives at the elapsed time:

      L_ff = L_ii = M G'/G,   L_fi = M (G'' G - G'**2)/G,   L_if = -M/G;

* the decoherence matrix ``Theta``, double integrals of the noise
  kernel against ``c_f(t') = G'(t') - (G'/G)(tau) G(t')`` and
  ``c_i(t') = G(t')/G(tau)``:

      Theta_kl(tau) = 1/2 int_0^tau int_0^tau c_k(t') nu(t'-t'') c_l(t'')

  evaluated by a trapezoidal double sum (one FFT convolution per pair)
  on a grid fine enough for the noise-kernel boundary layer, Richardson
  extrapolated in the grid step with a third level as convergence
  check;

* the master-equation coefficients, obtained from Lambda/Theta and
  their time derivatives.  With ``W = G'' G - G'**2`` (note
  ``L_fi = M W / G``) the frequency and friction are pure ``G``
  expressions,

      Gamma_xp   = -W' / (2 W),
      OmegaR_sq  = (G'/G) (W'/W) - G''/G,

  while the diffusion coefficients mix in Theta and its derivative
  (computed by spline differentiation across the requested window).

In the rapid-decay limit everything collapses to the constant
coefficients of ``limit_coefficients`` and the closed trigonometric
forms of ``limit_lambda_theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import fftconvolve

from ..errors import AccuracyError, NodeSingularityError, ValidationError
from ..model import BathSpectrum, OscillatorParams
from ..spectral import renormalized_frequency_sq
from .kernels import noise_kernel
from .propagator import PropagatorFunction

__all__ = [
    "LambdaTheta",
    "QBMCoefficients",
    "lambda_coefficients",
    "theta_coefficients",
    "lambda_theta",
    "limit_lambda_theta",
    "exact_coefficients",
    "limit_coefficients",
    "kernel_logdensity",
]

_NODE_FRACTION = 1e-3  # |G| below this times max|G| counts as a node


@dataclass(frozen=True)
class LambdaTheta:
    """Phase (L_*) and decoherence (T_*) entries of the two-point kernel."""

    L_ff: float
    L_fi: float
    L_if: float
    T_ff: float
    T_fi: float
    T_ii: float


@dataclass(frozen=True)
class QBMCoefficients:
    """Master-equation coefficients sampled on a time window."""

    tau: np.ndarray
    omegaR_sq: np.ndarray
    D_xx: np.ndarray
    D_xp: np.ndarray
    Gamma_xp: np.ndarray

    def __post_init__(self):
        tau = np.atleast_1d(np.asarray(self.tau, dtype=float))
        object.__setattr__(self, "tau", tau)
        for name in ("omegaR_sq", "D_xx", "D_xp", "Gamma_xp"):
            arr = np.broadcast_to(
                np.asarray(getattr(self, name), dtype=float), tau.shape
            ).copy()
            object.__setattr__(self, name, arr)


def _check_tau(prop: PropagatorFunction, tau_star: float) -> float:
    tau_star = float(tau_star)
    if not 0.0 < tau_star <= prop.tau_max:
        raise ValidationError(
            f"tau={tau_star:g} outside the solved window (0, {prop.tau_max:g}]"
        )
    g = float(prop.g(tau_star))
    if abs(g) < _NODE_FRACTION * prop.max_abs_g:
        raise NodeSingularityError(
            f"G({tau_star:g}) = {g:.3e} is too close to a node of the "
            "propagator; the kernel coefficients diverge there"
        )
    return tau_star


def lambda_coefficients(prop: PropagatorFunction, tau_star: float):
    """(L_ff, L_fi, L_if) at one time; raises near nodes of G."""
    tau_star = _check_tau(prop, tau_star)
    m = prop.osc.mass
    g = float(prop.g(tau_star))
    gd = float(prop.g_dot(tau_star))
    gdd = float(prop.g_ddot(tau_star))
    return m * gd / g, m * (gdd * g - gd * gd) / g, -m / g


def _theta_grid_step(prop: PropagatorFunction) -> float:
    lam, bath, osc = prop.lam, prop.bath, prop.osc
    layer = lam**2 / bath.cutoff
    if bath.temperature > 0.0:
        layer = min(layer, lam**2 / bath.temperature)
    return min(layer / 8.0, 0.03 / osc.omega0)


def _theta_q_values(prop: PropagatorFunction, tau_star: float, m: int):
    """Trapezoidal (Q_GG, Q_GdG, Q_GdGd) on an m-panel grid ending at tau_star."""
    h = tau_star / m
    t = h * np.arange(m + 1)
    gv = prop.g(t)
    gdv = prop.g_dot(t)
    nu_half = noise_kernel(h * np.arange(m + 1), prop.bath, prop.osc, prop.lam)
    nu_full = np.concatenate([nu_half[m:0:-1], nu_half])
    w = np.ones(m + 1)
    w[0] = w[-1] = 0.5
    out = {}
    conv_g = fftconvolve(nu_full, w * gv)[m : 2 * m + 1]
    conv_gd = fftconvolve(nu_full, w * gdv)[m : 2 * m + 1]
    out["gg"] = h * h * np.dot(w * gv, conv_g)
    out["dg"] = h * h * np.dot(w * gdv, conv_g)
    out["dd"] = h * h * np.dot(w * gdv, conv_gd)
    return out


def theta_coefficients(
    prop: PropagatorFunction, tau_star: float, rel_tol: float = 1e-3
):
    """(T_ff, T_fi, T_ii) at one time, Richardson extrapolated.

    Three grid levels are computed; the last two Richardson pairs must
    agree to ``rel_tol`` relative to the largest double integral, else
    AccuracyError.
    """
    tau_star = _check_tau(prop, tau_star)
    if prop.bath.eta == 0.0:
        return 0.0, 0.0, 0.0
    m0 = max(32, math.ceil(tau_star / _theta_grid_step(prop)))
    q1, q2, q3 = (
        _theta_q_values(prop, tau_star, k * m0) for k in (1, 2, 4)
    )
    rich = {}
    scale = max(abs(v) for v in q3.values())
    for key in q1:
        first = (4.0 * q2[key] - q1[key]) / 3.0
        second = (4.0 * q3[key] - q2[key]) / 3.0
        if abs(second - first) > rel_tol * max(scale, 1e-300):
            raise AccuracyError(
                f"noise double integral Q_{key} not converged at tau={tau_star:g}: "
                f"Richardson levels differ by {abs(second - first):.3e} "
                f"against scale {scale:.3e}"
            )
        rich[key] = second
    g = float(prop.g(tau_star))
    r = float(prop.g_dot(tau_star)) / g
    t_ff = 0.5 * (rich["dd"] - 2.0 * r * rich["dg"] + r * r * rich["gg"])
    t_fi = (rich["dg"] - r * rich["gg"]) / (2.0 * g)
    t_ii = rich["gg"] / (2.0 * g * g)
    return t_ff, t_fi, t_ii


def lambda_theta(
    prop: PropagatorFunction, tau_star: float, rel_tol: float = 1e-3
) -> LambdaTheta:
    l_ff, l_fi, l_if = lambda_coefficients(prop, tau_star)
    t_ff, t_fi, t_ii = theta_coefficients(prop, tau_star, rel_tol)
    return LambdaTheta(l_ff, l_fi, l_if, t_ff, t_fi, t_ii)


def limit_lambda_theta(
    bath: BathSpectrum, osc: OscillatorParams, tau_star: float
) -> LambdaTheta:
    """Rapid-decay closed forms of the kernel entries.

    The phase part is the renormalized free oscillator; the decoherence
    part is linear in the single thermal scale kappa = M w0 eta T.
    """
    wr = math.sqrt(renormalized_frequency_sq(bath, osc))
    tau_star = float(tau_star)
    if tau_star <= 0.0:
        raise ValidationError("tau must be positive")
    s, c = math.sin(wr * tau_star), math.cos(wr * tau_star)
    if abs(s) < 1e-12:
        raise NodeSingularityError(
            f"sin(wR tau) vanishes at tau={tau_star:g}; kernel entries diverge"
        )
    m = osc.mass
    kappa = m * osc.omega0 * bath.eta * bath.temperature
    t_diag = kappa * (wr * tau_star - s * c) / (4.0 * wr * s * s)
    t_off = -kappa * (wr * tau_star * c - s) / (4.0 * wr * s * s)
    return LambdaTheta(
        L_ff=m * wr * c / s,
        L_fi=-m * wr / s,
        L_if=-m * wr / s,
        T_ff=t_diag,
        T_fi=t_off,
        T_ii=t_diag,
    )


def exact_coefficients(
    prop: PropagatorFunction, tau_points, rel_tol: float = 1e-3
) -> QBMCoefficients:
    """Master-equation coefficients on a window of times.

    ``tau_points`` needs at least 5 strictly increasing entries inside
    the solved window (the Theta derivative is taken by splining across
    the window), none of them near a node of G.
    """
    tau = np.asarray(tau_points, dtype=float)
    if tau.ndim != 1 or tau.size < 5:
        raise ValidationError("need at least 5 tau points for the derivative")
    if np.any(np.diff(tau) <= 0.0):
        raise ValidationError("tau points must increase strictly")
    for t in tau:
        _check_tau(prop, t)

    mass = prop.osc.mass
    g = prop.g(tau)
    gd = prop.g_dot(tau)
    gdd = prop.g_ddot(tau)
    gddd = prop.g_dddot(tau)
    w = gdd * g - gd * gd
    wdot = gddd * g - gd * gdd
    if np.any(np.abs(w) < 1e-12 * max(np.max(gd * gd), np.max(np.abs(gdd * g)))):
        raise NodeSingularityError("Wronskian-type denominator vanished in window")
    gamma_xp = -0.5 * wdot / w
    omega_sq = (gd / g) * (wdot / w) - gdd / g

    theta = np.array([theta_coefficients(prop, t, rel_tol) for t in tau])
    t_ff, t_fi, t_ii = theta.T
    td_ff = CubicSpline(tau, t_ff)(tau, 1)
    td_fi = CubicSpline(tau, t_fi)(tau, 1)
    td_ii = CubicSpline(tau, t_ii)(tau, 1)

    l_ff = mass * gd / g
    l_if = -mass / g
    bracket = t_ff - (t_fi / l_if) * l_ff
    d_xx = (
        4.0 * gamma_xp * bracket
        + td_ff
        - 2.0 * (td_fi / l_if) * l_ff
        + (td_ii / l_if**2) * l_ff**2
    )
    d_xp = (
        2.0 * (t_fi / l_if) * gamma_xp
        + bracket / mass
        + td_fi / l_if
        - (td_ii / l_if**2) * l_ff
    )
    return QBMCoefficients(tau, omega_sq, d_xx, d_xp, gamma_xp)


def limit_coefficients(
    bath: BathSpectrum, osc: OscillatorParams, tau_points
) -> QBMCoefficients:
    """Constant rapid-decay coefficients broadcast over ``tau_points``."""
    wr_sq = renormalized_frequency_sq(bath, osc)
    kappa = osc.mass * osc.omega0 * bath.eta * bath.temperature
    tau = np.atleast_1d(np.asarray(tau_points, dtype=float))
    return QBMCoefficients(tau, wr_sq, 0.5 * kappa, 0.0, 0.0)


def kernel_logdensity(
    prop: PropagatorFunction,
    tau_star: float,
    x_f: float,
    x_fp: float,
    x_i: float,
    x_ip: float,
    rel_tol: float = 1e-3,
) -> complex:
    """log of the two-point kernel at endpoints (x_f, x_f'; x_i, x_i').

    In sum/difference coordinates S = (x + x')/2, D = x - x':

        log J = log(|L_if| / 2 pi)
                + i [ D_f (L_ff S_f + L_fi S_i) + D_i (L_if S_f + L_ff S_i) ]
                - [ T_ff D_f**2 + 2 T_fi D_f D_i + T_ii D_i**2 ].

    The real part is bounded by the normalization term because the
    decoherence matrix is positive semidefinite.
    """
    lt = lambda_theta(prop, tau_star, rel_tol)
    s_f, d_f = 0.5 * (x_f + x_fp), x_f - x_fp
    s_i, d_i = 0.5 * (x_i + x_ip), x_i - x_ip
    phase = d_f * (lt.L_ff * s_f + lt.L_fi * s_i) + d_i * (
        lt.L_if * s_f + lt.L_ff * s_i
    )
    damp = lt.T_ff * d_f * d_f + 2.0 * lt.T_fi * d_f * d_i + lt.T_ii * d_i * d_i
    return complex(math.log(abs(lt.L_if) / (2.0 * math.pi)) - damp, phase)

"""Exact solution u = (u_+ + u_-)/2 on an observation branch r.

For x on branch r (r <= j, r != k)

    u_pm(t, x) = int q_k(lam)/pi e^{pm i sqrt(lam) t} e^{-i xi_r(lam) x} (Vu0)_k(lam) dlam.

The default path substitutes p = xi_r(lam), which turns the exponent into
i omega phi(p) with omega = sqrt(t^2 + x^2); the phase is shared with
:mod:`kgstar.asymptotics`. The lam-form is kept as an independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchHypothesisViolated, ValidationError
from .initial_data import SpectralProfile
from .network import StarNetwork
from .quadrature import DEFAULT_PANEL_CAP, OscillatoryIntegrand, oscillatory_quad
from .spectral import weight_q, xi
from .transform import MEASURE_SCALE


@dataclass(frozen=True)
class FieldSample:
    t: float
    x: float
    r: int
    value_plus: complex
    value_minus: complex

    @property
    def value(self) -> complex:
        return 0.5 * (self.value_plus + self.value_minus)


def check_branch(profile: SpectralProfile, r: int):
    if not 1 <= r <= profile.net.n:
        raise BranchHypothesisViolated(f"branch {r} does not exist")
    if r > profile.j or r == profile.k:
        raise BranchHypothesisViolated(
            f"observation branch r={r} needs r <= j={profile.j} and r != k={profile.k}")


def normalized_time(t: float, x: float):
    """(omega, tau, chi) with omega = |(t, x)|; omega = 0 maps to (1, 0, 0)."""
    omega = math.hypot(t, x)
    if omega == 0.0:
        return 1.0, 0.0, 0.0
    return omega, t / omega, x / omega


def _integrand(net, profile, r, t, x, sign, form):
    k = profile.k
    c_r, a_r = net.coeffs(r)
    omega, tau, chi = normalized_time(t, x)
    if form == "p":
        lo = float(np.real(xi(net, r, profile.lambda_min)))
        hi = float(np.real(xi(net, r, profile.lambda_max)))

        def amp(p):
            lam = a_r + c_r * p * p
            return 2.0 * c_r * MEASURE_SCALE * weight_q(net, k, lam) * profile.density(lam) * p

        def phase(p):
            return sign * np.sqrt(a_r + c_r * p * p) * tau - p * chi

        def dphase(p):
            return sign * c_r * p * tau / np.sqrt(a_r + c_r * p * p) - chi
    elif form == "lambda":
        lo, hi = profile.lambda_min, profile.lambda_max

        def amp(lam):
            return MEASURE_SCALE * weight_q(net, k, lam) * profile.density(lam)

        def phase(lam):
            return (sign * np.sqrt(lam) * t - np.real(xi(net, r, lam)) * x) / omega

        def dphase(lam):
            return (sign * t / (2.0 * np.sqrt(lam))
                    - x / (2.0 * c_r * np.real(xi(net, r, lam)))) / omega
    else:
        raise ValidationError(f"form must be 'p' or 'lambda', got {form!r}")
    return OscillatoryIntegrand(amp, phase, omega if math.hypot(t, x) > 0 else 0.0, lo, hi, dphase)


def _u(net, profile, r, t, x, sign, form, panel_cap, refine):
    check_branch(profile, r)
    if t < 0 or x < 0:
        raise ValidationError(f"need t >= 0 and x >= 0, got t={t}, x={x}")
    if profile.amplitude == 0:
        return 0j
    return oscillatory_quad(_integrand(net, profile, r, t, x, sign, form), panel_cap, refine)


def u_plus(net: StarNetwork, profile: SpectralProfile, r: int, t: float, x: float,
           form: str = "p", panel_cap: int = DEFAULT_PANEL_CAP, refine: int = 1) -> complex:
    return _u(net, profile, r, float(t), float(x), 1.0, form, panel_cap, refine)


def u_minus(net: StarNetwork, profile: SpectralProfile, r: int, t: float, x: float,
            form: str = "p", panel_cap: int = DEFAULT_PANEL_CAP, refine: int = 1) -> complex:
    return _u(net, profile, r, float(t), float(x), -1.0, form, panel_cap, refine)


def solution(net: StarNetwork, profile: SpectralProfile, r: int, t: float, x: float,
             form: str = "p", panel_cap: int = DEFAULT_PANEL_CAP) -> FieldSample:
    up = u_plus(net, profile, r, t, x, form, panel_cap)
    um = u_minus(net, profile, r, t, x, form, panel_cap)
    return FieldSample(float(t), float(x), r, up, um)


def _value(net, profile, r, t, x, panel_cap):
    return solution(net, profile, r, t, x, panel_cap=panel_cap).value


def kg_residual(net: StarNetwork, profile: SpectralProfile, r: int, t: float, x: float,
                h: float = 1e-3, panel_cap: int = DEFAULT_PANEL_CAP) -> float:
    """|u_tt - c_r u_xx + a_r u| by central differences with step h (needs t, x >= h)."""
    if t < h or x < h:
        raise ValidationError("central differences need t >= h and x >= h")
    c_r, a_r = net.coeffs(r)
    f = lambda tt, xx: _value(net, profile, r, tt, xx, panel_cap)
    u0 = f(t, x)
    utt = (f(t + h, x) - 2 * u0 + f(t - h, x)) / h**2
    uxx = (f(t, x + h) - 2 * u0 + f(t, x - h)) / h**2
    return abs(utt - c_r * uxx + a_r * u0)


def initial_velocity(net: StarNetwork, profile: SpectralProfile, r: int, x: float,
                     h: float = 1e-3, panel_cap: int = DEFAULT_PANEL_CAP) -> complex:
    """Second-order one-sided difference for u_t(0, x); stays within t >= 0."""
    f = lambda tt: _value(net, profile, r, tt, x, panel_cap)
    return (-3.0 * f(0.0) + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h)

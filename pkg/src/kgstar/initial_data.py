"""Initial data with a single spectral component supported inside one band."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BudgetExceeded, BumpOutsideBand, ComponentIndexTooLarge, EmptyInterval, ValidationError
from .network import THRESHOLD_GUARD, StarNetwork, band
from .quadrature import DEFAULT_PANEL_CAP, gl_uniform
from .spectral import eigenfunction, weight_q, xi
from .transform import MEASURE_SCALE, BranchFunction


@dataclass(frozen=True)
class BandBump:
    """psi(lam) = N ((lam-alpha)(beta-lam))^order on (alpha, beta), zero outside.

    N = (4/(beta-alpha)^2)^order puts the maximum 1 at the midpoint. With
    order 3 the bump is exactly C^2 across the endpoints.
    """

    alpha: float
    beta: float
    order: int = 3

    def __post_init__(self):
        if not self.alpha < self.beta:
            raise EmptyInterval(f"alpha={self.alpha} must be < beta={self.beta}")
        if int(self.order) != self.order or self.order < 3:
            raise ValidationError("bump order must be an integer >= 3")

    @property
    def normalization(self) -> float:
        return (4.0 / (self.beta - self.alpha) ** 2) ** self.order

    def __call__(self, lam):
        return self.derivative(lam, 0)

    def derivative(self, lam, nu: int = 0):
        """nu-th derivative (nu <= 2) in closed form."""
        lam = np.asarray(lam, dtype=float)
        m = self.order
        g = (lam - self.alpha) * (self.beta - lam)
        inside = (lam > self.alpha) & (lam < self.beta)
        g = np.where(inside, g, 0.0)
        dg = self.alpha + self.beta - 2.0 * lam
        if nu == 0:
            val = g**m
        elif nu == 1:
            val = m * g ** (m - 1) * dg
        elif nu == 2:
            val = m * (m - 1) * g ** (m - 2) * dg**2 - 2.0 * m * g ** (m - 1)
        else:
            raise ValidationError("only derivatives up to order 2 are provided")
        return np.where(inside, self.normalization * val, 0.0)


def bump(alpha: float, beta: float, order: int = 3) -> BandBump:
    return BandBump(float(alpha), float(beta), int(order))


@dataclass(frozen=True)
class SpectralProfile:
    """Spectral data (Vu0)_l = 0 for l != k and (Vu0)_k = amplitude * psi(lam - shift)."""

    net: StarNetwork
    j: int
    k: int
    psi: BandBump
    shift: float = 0.0
    amplitude: float = 1.0

    @property
    def lambda_min(self) -> float:
        return self.psi.alpha + self.shift

    @property
    def lambda_max(self) -> float:
        return self.psi.beta + self.shift

    @property
    def sup_norm(self) -> float:
        return abs(self.amplitude)

    def density(self, lam):
        """(Vu0)_k(lam)."""
        return self.amplitude * self.psi(np.asarray(lam, dtype=float) - self.shift)

    def density_derivative(self, lam, nu: int):
        return self.amplitude * self.psi.derivative(np.asarray(lam, dtype=float) - self.shift, nu)

    def component(self, l: int, lam):
        lam = np.asarray(lam, dtype=float)
        return self.density(lam) if l == self.k else np.zeros(lam.shape)

    def scaled(self, factor: float) -> "SpectralProfile":
        return SpectralProfile(self.net, self.j, self.k, self.psi, self.shift, self.amplitude * factor)


def make_profile(net: StarNetwork, j: int, k: int, psi: BandBump, shift: float = 0.0,
                 amplitude: float = 1.0) -> SpectralProfile:
    if k > j:
        raise ComponentIndexTooLarge(f"component k={k} must not exceed band index j={j}")
    if k < 1:
        raise ComponentIndexTooLarge(f"component index {k} must be >= 1")
    b = band(net, j)
    if b.degenerate:
        raise BumpOutsideBand(f"band {j} is degenerate: a_{j} = a_{j + 1} = {b.lo}")
    lo, hi = psi.alpha + shift, psi.beta + shift
    if not (lo - b.lo >= THRESHOLD_GUARD and b.hi - hi >= THRESHOLD_GUARD):
        raise BumpOutsideBand(f"support [{lo}, {hi}] not strictly inside band ({b.lo}, {b.hi})")
    return SpectralProfile(net, j, k, psi, float(shift), float(amplitude))


def _lambda_rule(net: StarNetwork, profile: SpectralProfile, m: int, x_top: float,
                 panel_cap: int):
    """Panels over the support resolving exp(-i xi_m(lam) x) for |x| <= x_top."""
    lo, hi = profile.lambda_min, profile.lambda_max
    c_m, _ = net.coeffs(m)
    slope = float(np.max(1.0 / (2.0 * c_m * np.abs(xi(net, m, np.linspace(lo, hi, 257))))))
    panels = max(8, int(math.ceil(x_top * slope * (hi - lo) / (0.5 * math.pi))))
    if panels > panel_cap:
        raise BudgetExceeded(f"{panels} panels required, cap is {panel_cap}")
    return gl_uniform(lo, hi, panels)


def realize_u0(net: StarNetwork, profile: SpectralProfile, m: int, x,
               panel_cap: int = DEFAULT_PANEL_CAP):
    """u0 = V^{-1}(profile) evaluated at x on branch m (the Cauchy data has v0 = 0)."""
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    out = np.zeros(flat.shape, dtype=complex)
    if profile.amplitude == 0 or flat.size == 0:
        return out.reshape(x.shape) if x.ndim else 0j
    k = profile.k
    lam, w = _lambda_rule(net, profile, m, float(np.max(np.abs(flat))), panel_cap)
    coef = MEASURE_SCALE * w * weight_q(net, k, lam) * profile.density(lam)
    for s in range(0, flat.size, 512):
        X = flat[s:s + 512, None]
        out[s:s + 512] = eigenfunction(net, k, -1, lam[None, :], m, X) @ coef
    return out.reshape(x.shape) if x.ndim else complex(out[0])


def default_x_max(net: StarNetwork, profile: SpectralProfile, decay_lengths: float = 40.0,
                  beats: float = 10.0) -> list:
    """Per-branch truncation of u0.

    Tunnel branches: ``decay_lengths`` / |Im xi_m(lambda_max)|, the slowest decay. Oscillatory
    branches: ``beats`` times the beat length 2 pi / (xi_m(lambda_max) -
    xi_m(lambda_min)), over which the packet spreads before its algebraic tail.
    """
    out = []
    for m in range(1, net.n + 1):
        z0 = xi(net, m, profile.lambda_min)
        z1 = xi(net, m, profile.lambda_max)
        if np.real(z0) <= 0:
            out.append(decay_lengths / abs(np.imag(z1)))
        else:
            out.append(beats * 2 * math.pi / float(np.real(z1 - z0)))
    return out


def initial_condition(net: StarNetwork, profile: SpectralProfile,
                      x_max: Optional[list] = None) -> BranchFunction:
    """u0 as a BranchFunction truncated branch-wise at ``x_max``."""
    x_max = default_x_max(net, profile) if x_max is None else x_max
    funcs = tuple((lambda y, m=m: realize_u0(net, profile, m, y)) for m in range(1, net.n + 1))
    return BranchFunction(funcs, tuple((0.0, float(xm)) for xm in x_max))

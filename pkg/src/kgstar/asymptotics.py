"""Stationary-phase asymptotics of u_+ inside the cone of t^{-1/2} decay.

Leading coefficient
-------------------
Substituting p = xi_r(lam) gives u_+ = int U(p) exp(i omega phi(p)) dp with

    phi(p) = sqrt(a_r + c_r p^2) tau - p chi,
    U(p)   = (2 c_r / pi) q_k(a_r + c_r p^2) (Vu0)_k(a_r + c_r p^2) p.

Since phi'' > 0 the stationary-phase term is exp(+i omega phi(p0))
(2 pi i / (omega phi''(p0)))^{1/2} U(p0). Written with h1, h2 this is

    H = (2 c_r / pi) e^{+i phi(p0, t, x)} (2 i pi)^{1/2}
        a_r^{3/4} c_r^{-1/4} c_k^{1/2} h1 h2 (Vu0)_k(lam*)

so that |u_+ - H t^{-1/2}| = O(1/t). ``convention="verbatim"`` returns the
older closed form (phase e^{-i phi(p0)}, prefactor a_r^{3/4} c_r^{1/4}
c_k^{1/2}, no Jacobian 2 c_r, unnormalized weight). The two differ in
modulus by the factor 2 sqrt(c_r) / pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import BandViolation, OutsideCone, OutsideLightCone, ParameterViolation, ValidationError
from .initial_data import SpectralProfile, bump, make_profile
from .network import StarNetwork, validate_network
from .propagator import check_branch, normalized_time, u_plus
from .quadrature import DEFAULT_PANEL_CAP
from .spectral import principal_sqrt, weight_q
from .transform import MEASURE_SCALE

BOUNDARY_RTOL = 1e-12


class PhaseJet(NamedTuple):
    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    d4: np.ndarray


def phase(net: StarNetwork, r: int, p, tau, chi) -> PhaseJet:
    """phi(p, tau, chi) and its first four p-derivatives in closed form."""
    c, a = net.coeffs(r)
    p = np.asarray(p, dtype=float)
    s = a + c * p * p
    root = np.sqrt(s)
    return PhaseJet(
        root * tau - p * chi,
        c * p / root * tau - chi,
        tau * c * a / s**1.5,
        -3.0 * a * c**2 * p / s**2.5 * tau,
        -3.0 * a * c**2 * (a - 4.0 * c * p * p) / s**3.5 * tau,
    )


def stationary_point(net: StarNetwork, r: int, t: float, x: float) -> float:
    """Unique zero p0 = sqrt(a_r x^2 / (c_r (c_r t^2 - x^2))) of phi' on (0, inf)."""
    c, a = net.coeffs(r)
    if t <= 0 or x < 0:
        raise ValidationError(f"need t > 0 and x >= 0, got t={t}, x={x}")
    gap = c * t * t - x * x
    if gap <= 0:
        raise OutsideLightCone(f"c_r t^2 <= x^2 at (t={t}, x={x}): no stationary point")
    return math.sqrt(a * x * x / (c * gap))


@dataclass(frozen=True)
class Cone:
    """Set of (t, x) whose stationary point lies in [xi_r(lam_min), xi_r(lam_max)].

    Slopes bound t/x; the same set reads v_min <= c_r (t/x)^2 - 1 <= v_max.
    """

    r: int
    c_r: float
    a_r: float
    lambda_min: float
    lambda_max: float

    @property
    def slope_min(self) -> float:
        return math.sqrt(self.lambda_max / (self.c_r * (self.lambda_max - self.a_r)))

    @property
    def slope_max(self) -> float:
        return math.sqrt(self.lambda_min / (self.c_r * (self.lambda_min - self.a_r)))

    @property
    def v_min(self) -> float:
        return self.a_r / (self.lambda_max - self.a_r)

    @property
    def v_max(self) -> float:
        return self.a_r / (self.lambda_min - self.a_r)

    @property
    def p_min(self) -> float:
        return math.sqrt((self.lambda_min - self.a_r) / self.c_r)

    @property
    def p_max(self) -> float:
        return math.sqrt((self.lambda_max - self.a_r) / self.c_r)

    @property
    def xt_bounds(self) -> tuple[float, float]:
        """The cone as an x/t interval."""
        return 1.0 / self.slope_max, 1.0 / self.slope_min

    @property
    def aperture(self) -> float:
        lo, hi = self.xt_bounds
        return hi - lo

    @property
    def center_slope(self) -> float:
        return 0.5 * (self.slope_min + self.slope_max)

    def v(self, t: float, x: float) -> float:
        return self.c_r * (t / x) ** 2 - 1.0

    def contains(self, t: float, x: float) -> bool:
        if x <= 0 or t <= 0:
            return False
        return self.slope_min <= t / x <= self.slope_max

    def contains_v(self, t: float, x: float) -> bool:
        if x <= 0 or t <= 0:
            return False
        return self.v_min <= self.v(t, x) <= self.v_max

    def classify(self, t: float, x: float) -> str:
        """'inside', 'boundary', 'outside' or 'outside-light-cone'."""
        if x <= 0 or t <= 0 or self.c_r * t * t <= x * x:
            return "outside-light-cone"
        s = t / x
        if (abs(s - self.slope_min) <= BOUNDARY_RTOL * self.slope_min
                or abs(s - self.slope_max) <= BOUNDARY_RTOL * self.slope_max):
            return "boundary"
        return "inside" if self.slope_min < s < self.slope_max else "outside"


def cone(net: StarNetwork, r: int, lambda_min: float, lambda_max: float) -> Cone:
    c, a = net.coeffs(r)
    if not (a < lambda_min < lambda_max):
        raise BandViolation(f"need a_r={a} < lambda_min={lambda_min} < lambda_max={lambda_max}")
    if a <= 0:
        raise BandViolation(f"a_r = {a}: the phase is linear in p and the cone degenerates to a line")
    return Cone(r, c, a, float(lambda_min), float(lambda_max))


def profile_cone(profile: SpectralProfile, r: int) -> Cone:
    return cone(profile.net, r, profile.lambda_min, profile.lambda_max)


@dataclass(frozen=True)
class PhasePoint:
    t: float
    x: float
    r: int
    omega: float
    tau: float
    chi: float
    v: float
    p0: Optional[float]


def phase_point(net: StarNetwork, r: int, t: float, x: float, cone_: Optional[Cone] = None) -> PhasePoint:
    """Normalized coordinates of (t, x); p0 is set only when (t, x) lies in the cone."""
    c, _ = net.coeffs(r)
    omega, tau, chi = normalized_time(t, x)
    v = c * (t / x) ** 2 - 1.0 if x > 0 else math.inf
    p0 = None
    if cone_ is not None and cone_.contains(t, x):
        p0 = stationary_point(net, r, t, x)
    return PhasePoint(float(t), float(x), r, omega, tau, chi, v, p0)


@dataclass(frozen=True)
class AsymptoticTerm:
    H: complex
    h1: float
    h2: float
    p0: float
    lambda_star: float
    phase_at_p0: float
    convention: str = "consistent"
    c_est: Optional[float] = None


def h_factors(net: StarNetwork, r: int, k: int, slope: float) -> tuple[float, float]:
    """h1 and h2 as functions of the slope t/x."""
    c_r, a_r = net.coeffs(r)
    b = slope * slope
    v = c_r * b - 1.0
    h1 = (b / v) ** 0.75
    terms = principal_sqrt((a_r - net.a_arr) * v + a_r)
    h2 = float(np.real(terms[k - 1])) / abs(np.sum(np.sqrt(net.c_arr) * terms)) ** 2
    return h1, h2


def leading_coefficient(net: StarNetwork, profile: SpectralProfile, r: int, t: float, x: float,
                        convention: str = "consistent") -> AsymptoticTerm:
    """Coefficient H of t^{-1/2} in u_+ at a point strictly inside the cone."""
    check_branch(profile, r)
    if convention not in ("consistent", "verbatim"):
        raise ValidationError(f"unknown convention {convention!r}")
    cn = profile_cone(profile, r)
    where = cn.classify(t, x)
    if where != "inside":
        raise OutsideCone(f"(t={t}, x={x}) is {where} (slopes {cn.slope_min:.6g}..{cn.slope_max:.6g})")
    c_r, a_r = net.coeffs(r)
    c_k, _ = net.coeffs(profile.k)
    p0 = stationary_point(net, r, t, x)
    lam_star = a_r + c_r * p0 * p0
    phase_p0 = math.sqrt(lam_star) * t - p0 * x
    h1, h2 = h_factors(net, r, profile.k, t / x)
    dens = float(profile.density(lam_star))
    root = np.sqrt(2j * np.pi)
    if convention == "consistent":
        H = (2.0 * c_r * MEASURE_SCALE * np.exp(1j * phase_p0) * root
             * a_r**0.75 * c_r**-0.25 * math.sqrt(c_k) * h1 * h2 * dens)
    else:
        H = np.exp(-1j * phase_p0) * root * a_r**0.75 * c_r**0.25 * math.sqrt(c_k) * h1 * h2 * dens
    return AsymptoticTerm(complex(H), h1, h2, p0, lam_star, phase_p0, convention)


def h2_bound(net: StarNetwork, r: int, k: int, v_min: float, v_max: float, samples: int = 1024) -> float:
    """max_v sqrt|(a_r-a_k)v + a_r| / (sum_{l<=r} sqrt(c_l) sqrt((a_r-a_l) v_min + a_r))^2."""
    _, a_r = net.coeffs(r)
    _, a_k = net.coeffs(k)
    v = np.concatenate([np.linspace(v_min, v_max, samples), [v_min, v_max]])
    num = float(np.max(np.sqrt(np.abs((a_r - a_k) * v + a_r))))
    low = net.a_arr[:r]
    den = float(np.sum(np.sqrt(net.c_arr[:r]) * np.sqrt((a_r - low) * v_min + a_r))) ** 2
    return num / den


def coefficient_bound(net: StarNetwork, profile: SpectralProfile, r: int) -> float:
    """Uniform bound on |H| over the cone.

    Derived for the "verbatim" H; the consistent |H| is 2 sqrt(c_r)/pi times
    that, so it stays below the bound whenever c_r < pi^2/4.
    """
    check_branch(profile, r)
    cn = profile_cone(profile, r)
    c_r, _ = net.coeffs(r)
    c_k, _ = net.coeffs(profile.k)
    return (math.sqrt(2 * math.pi * c_k / c_r) * cn.lambda_max**0.75
            * h2_bound(net, r, profile.k, cn.v_min, cn.v_max) * profile.sup_norm)


def h1_bound(cn: Cone) -> float:
    return (cn.lambda_max / (cn.c_r * cn.a_r)) ** 0.75


def coefficient_bound_two_branch(a1: float, a2: float, alpha: float, beta: float) -> float:
    """sqrt(2 pi) sqrt(beta) (a2+beta)^{3/4} / (sqrt(a2) sqrt(a2 - a1 + beta))."""
    if not (0 < alpha < beta < 1):
        raise ParameterViolation(f"need 0 < alpha < beta < 1, got alpha={alpha}, beta={beta}")
    if not (0 <= a1 <= a2) or a2 <= 0:
        raise ParameterViolation(f"need 0 <= a1 <= a2 and a2 > 0, got a1={a1}, a2={a2}")
    return (math.sqrt(2 * math.pi) * math.sqrt(beta) * (a2 + beta) ** 0.75
            / (math.sqrt(a2) * math.sqrt(a2 - a1 + beta)))


def coefficient_lower_bound_two_branch(a2: float, alpha: float, m: float) -> float:
    """sqrt(2 pi alpha) a2^{-1/4} m; reported only, the claim is not asserted."""
    return math.sqrt(2 * math.pi * alpha) * a2**-0.25 * m


def step_profile(a1: float, a2: float, alpha: float, beta: float, order: int = 3) -> SpectralProfile:
    """Two branches, c = (1, 1), (Vu0)_1 = psi(lam - a2), (Vu0)_2 = 0."""
    net = validate_network((1.0, 1.0), (a1, a2))
    return make_profile(net, 2, 1, bump(alpha, beta, order), shift=a2)


@dataclass(frozen=True)
class SweepRow:
    a2: float
    slope_min: float
    slope_max: float
    xt_min: float
    xt_max: float
    aperture: float
    max_H: float
    max_H_verbatim: float
    bound: float
    argmax_slope: float
    fitted_slope_running: float
    uplus_abs: tuple

    def as_row(self):
        return (self.a2, self.slope_min, self.slope_max, self.aperture, self.max_H, self.bound,
                self.fitted_slope_running, self.xt_min, self.xt_max, self.max_H_verbatim,
                self.argmax_slope, *self.uplus_abs)


SWEEP_COLUMNS = ("a2", "slope_min", "slope_max", "aperture", "maxH", "bound",
                 "fitted_slope_running", "xt_min", "xt_max", "maxH_verbatim", "argmax_slope")


def loglog_slope(xs, ys) -> float:
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    if len(xs) < 2:
        return math.nan
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def step_sweep(a1: float, a2_grid, alpha: float, beta: float, rays_per_cone: int = 64,
               t_list=(), order: int = 3, panel_cap: int = DEFAULT_PANEL_CAP) -> list[SweepRow]:
    """Leading coefficient and cone geometry as the potential step a2 - a1 grows.

    For each a2 the rays t/x are spread uniformly over the open cone; |H| is
    maximized over them and |u_+| is measured on the maximizing ray at each
    time in ``t_list``.
    """
    a2_grid = [float(a) for a in a2_grid]
    if any(b <= a for a, b in zip(a2_grid, a2_grid[1:])):
        raise ValidationError("a2_grid must be strictly increasing")
    rows: list[SweepRow] = []
    for a2 in a2_grid:
        prof = step_profile(a1, a2, alpha, beta, order)
        net = prof.net
        cn = profile_cone(prof, 2)
        slopes = np.linspace(cn.slope_min, cn.slope_max, rays_per_cone + 2)[1:-1]
        vals, verb = [], []
        for s in slopes:
            vals.append(abs(leading_coefficient(net, prof, 2, s, 1.0).H))
            verb.append(abs(leading_coefficient(net, prof, 2, s, 1.0, "verbatim").H))
        i = int(np.argmax(vals))
        best = float(slopes[i])
        up = tuple(abs(u_plus(net, prof, 2, t, t / best, panel_cap=panel_cap)) for t in t_list)
        xt_min = math.sqrt(alpha / (a2 + alpha))
        xt_max = math.sqrt(beta / (a2 + beta))
        prev = [(row.a2, row.max_H) for row in rows] + [(a2, vals[i])]
        running = loglog_slope(*zip(*prev)) if len(prev) > 1 else math.nan
        rows.append(SweepRow(a2, cn.slope_min, cn.slope_max, xt_min, xt_max, xt_max - xt_min,
                             float(vals[i]), float(max(verb)),
                             coefficient_bound_two_branch(a1, a2, alpha, beta),
                             best, running, up))
    return rows

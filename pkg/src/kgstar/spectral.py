"""Wavenumbers, coupling coefficients, weights and generalized eigenfunctions.

Everything is vectorized over the energy ``lam`` (and position ``x``) with
numpy broadcasting. Branch and family indices are 1-based.
"""
from __future__ import annotations

import numpy as np

from .errors import AtThreshold, ValidationError
from .network import THRESHOLD_GUARD, StarNetwork


def principal_sqrt(z):
    """Square root with the argument of z taken in [-pi, pi).

    Differs from ``np.sqrt`` on the negative real axis: sqrt(-r) = -i sqrt(r)
    regardless of the sign of the imaginary zero.
    """
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    phi = np.arctan2(z.imag, z.real)
    phi = np.where(phi >= np.pi, phi - 2.0 * np.pi, phi)
    w = np.sqrt(r) * np.exp(0.5j * phi)
    # exact values on the real axis (cos(-pi/2) is not exactly zero)
    on_axis = z.imag == 0
    axis = np.where(z.real >= 0, np.sqrt(np.abs(z.real)) + 0j, -1j * np.sqrt(np.abs(z.real)))
    return np.where(on_axis, axis, w)


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValidationError(f"sign must be +1/-1 or '+'/'-', got {sign!r}")


def _guard(lam, thresholds, what):
    lam = np.asarray(lam, dtype=float)
    for al in np.atleast_1d(thresholds):
        if np.any(np.abs(lam - al) < THRESHOLD_GUARD):
            raise AtThreshold(f"{what}: energy within {THRESHOLD_GUARD:g} of threshold {al:g}")


def xi(net: StarNetwork, k: int, lam):
    """xi_k(lam) = sqrt((lam - a_k)/c_k); purely imaginary with Im < 0 below a_k."""
    ck, ak = net.coeffs(k)
    lam = np.asarray(lam, dtype=float)
    return principal_sqrt((lam - ak) / ck)


def xi_all(net: StarNetwork, lam):
    """Stack of xi_l(lam) for l = 1..n along a new last axis."""
    lam = np.asarray(lam, dtype=float)[..., None]
    return principal_sqrt((lam - net.a_arr) / net.c_arr)


def s_coeff(net: StarNetwork, k: int, lam):
    ck, ak = net.coeffs(k)
    _guard(lam, ak, f"s_{k}")
    xs = xi_all(net, lam)
    cx = net.c_arr * xs
    others = cx.sum(axis=-1) - cx[..., k - 1]
    return -others / cx[..., k - 1]


def weight_q(net: StarNetwork, l: int, lam):
    """Weight q_l(lam) = c_l xi_l / |sum_j c_j xi_j|^2 above a_l, zero below."""
    cl, al = net.coeffs(l)
    _guard(lam, net.a_arr, f"q_{l}")
    lam = np.asarray(lam, dtype=float)
    cx = net.c_arr * xi_all(net, lam)
    val = cx[..., l - 1].real / np.abs(cx.sum(axis=-1)) ** 2
    return np.where(lam > al, val, 0.0)


def eigenfunction(net: StarNetwork, j: int, sign, lam, k: int, x):
    """Component k of the generalized eigenfunction F^{sign,j}_lam at x >= 0."""
    sg = _sign(sign)
    net.coeffs(k)
    _guard(lam, net.coeffs(j)[1], f"F^{j}")
    lam = np.asarray(lam, dtype=float)
    x = np.asarray(x, dtype=float)
    if k == j:
        xj = xi(net, j, lam)
        sj = s_coeff(net, j, lam)
        return np.cos(xj * x) + sg * 1j * sj * np.sin(xj * x)
    return np.exp(sg * 1j * xi(net, k, lam) * x)


def eigenfunction_dx(net: StarNetwork, j: int, sign, lam, k: int, x):
    """Closed-form x-derivative of :func:`eigenfunction`."""
    sg = _sign(sign)
    _guard(lam, net.coeffs(j)[1], f"F^{j}")
    lam = np.asarray(lam, dtype=float)
    x = np.asarray(x, dtype=float)
    if k == j:
        xj = xi(net, j, lam)
        sj = s_coeff(net, j, lam)
        return -xj * np.sin(xj * x) + sg * 1j * sj * xj * np.cos(xj * x)
    xk = xi(net, k, lam)
    return sg * 1j * xk * np.exp(sg * 1j * xk * x)


def kirchhoff_defects(net: StarNetwork, j: int, sign, lam):
    """(T0, T1) defects of F^{sign,j}_lam at the vertex.

    T0 is max_{k,i} |F_k(0) - F_i(0)|, T1 is |sum_k c_k F_k'(0+)|.
    """
    vals = np.stack([np.broadcast_to(eigenfunction(net, j, sign, lam, k, 0.0), np.shape(lam))
                     for k in range(1, net.n + 1)], axis=-1)
    ders = np.stack([np.broadcast_to(eigenfunction_dx(net, j, sign, lam, k, 0.0), np.shape(lam))
                     for k in range(1, net.n + 1)], axis=-1)
    t0 = np.abs(vals[..., :, None] - vals[..., None, :]).max(axis=(-2, -1))
    t1 = np.abs((net.c_arr * ders).sum(axis=-1))
    return t0, t1


def second_difference_residual(func, c, a, lam, x, h):
    """|(-c D_h^2 u + a u - lam u)(x)| with the central second difference D_h^2."""
    if not (h > 0 and np.all(np.asarray(x) >= h)):
        raise ValidationError("need x >= h > 0")
    d2 = (func(x + h) - 2.0 * func(x) + func(x - h)) / h**2
    return np.abs(-c * d2 + a * func(x) - lam * func(x))


def ode_residual(net: StarNetwork, j: int, sign, lam, k: int, x, h):
    """Residual of A_k F = lam F for component k, expected O(h^2)."""
    ck, ak = net.coeffs(k)
    return second_difference_residual(
        lambda y: eigenfunction(net, j, sign, lam, k, y), ck, ak, lam, x, h)

"""Fourier-type transform V, its inverse, and the weighted spectral norm.

The transform pairs a function on the branches with its spectral components

    (Vf)_k(lam) = sum_m int_0^inf f_m(x) conj(F^{-,k}_{lam,m}(x)) dx.

With the plain weights q_k one finds ||Vf||_q^2 = pi ||f||^2, so the spectral
measure used here is q_k(lam) dlam / pi (``MEASURE_SCALE``). With that measure
V is an isometry and the inverse is its adjoint

    (V^{-1} g)_m(x) = sum_k int q_k(lam)/pi g_k(lam) F^{-,k}_{lam,m}(x) dlam.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import io
from .errors import ThresholdOnGrid, ValidationError
from .network import THRESHOLD_GUARD, StarNetwork
from .quadrature import GL_NODES, gl_clustered, gl_uniform
from .spectral import eigenfunction, weight_q, xi

MEASURE_SCALE = 1.0 / math.pi
_CHUNK = 512


@dataclass(frozen=True)
class BranchFunction:
    """A function on the network given branch by branch.

    ``funcs[m]`` is a vectorized callable for branch m+1 (None means zero on
    that branch) and ``supports[m]`` the interval outside which it vanishes or
    is truncated. ``d2`` optionally holds the analytic second derivatives.
    """

    funcs: tuple
    supports: tuple
    d2: Optional[tuple] = None

    def __post_init__(self):
        if len(self.funcs) != len(self.supports):
            raise ValidationError("funcs and supports must have one entry per branch")
        if self.d2 is not None and len(self.d2) != len(self.funcs):
            raise ValidationError("d2 must have one entry per branch")
        for s in self.supports:
            if s is not None and not (0.0 <= s[0] < s[1]):
                raise ValidationError(f"bad support {s}")

    @property
    def n(self) -> int:
        return len(self.funcs)

    @property
    def x_max(self) -> float:
        his = [s[1] for s in self.supports if s is not None]
        return max(his) if his else 0.0

    @property
    def is_zero(self) -> bool:
        return all(f is None for f in self.funcs)

    def value(self, m: int, x):
        f = self.funcs[m - 1]
        x = np.asarray(x, dtype=float)
        if f is None:
            return np.zeros(x.shape, dtype=complex)
        lo, hi = self.supports[m - 1]
        inside = (x >= lo) & (x <= hi)
        return np.where(inside, np.asarray(f(x), dtype=complex), 0.0)

    def scaled(self, alpha) -> "BranchFunction":
        wrap = lambda g: None if g is None else (lambda x, g=g: alpha * g(x))
        d2 = None if self.d2 is None else tuple(wrap(g) for g in self.d2)
        return BranchFunction(tuple(wrap(g) for g in self.funcs), self.supports, d2)

    def samples(self, step: float, x_max: Optional[float] = None):
        """Uniform samples (branch, x, value) on [0, x_max], same grid on every branch."""
        x_max = self.x_max if x_max is None else x_max
        x = np.arange(0.0, x_max + 0.5 * step, step)
        return [(m, x, self.value(m, x)) for m in range(1, self.n + 1)]

    def to_csv(self, path, step: float, x_max: Optional[float] = None):
        rows = []
        for m, x, v in self.samples(step, x_max):
            rows.extend((m, xi_, vi.real, vi.imag) for xi_, vi in zip(x, v))
        return io.write_csv(path, ["branch", "x", "re", "im"], rows)

    @classmethod
    def from_samples(cls, n: int, rows) -> "BranchFunction":
        """Piecewise-linear interpolant of (branch, x, re, im) rows."""
        funcs, supports = [], []
        rows = np.asarray(rows, dtype=float)
        for m in range(1, n + 1):
            sel = rows[rows[:, 0] == m]
            if len(sel) == 0 or not np.any(sel[:, 2:] != 0):
                funcs.append(None)
                supports.append(None)
                continue
            order = np.argsort(sel[:, 1])
            x, re, im = sel[order, 1], sel[order, 2], sel[order, 3]
            funcs.append(lambda y, x=x, re=re, im=im: np.interp(y, x, re) + 1j * np.interp(y, x, im))
            supports.append((x[0], x[-1]))
        return cls(tuple(funcs), tuple(supports))

    @classmethod
    def zero(cls, n: int) -> "BranchFunction":
        return cls((None,) * n, (None,) * n, (None,) * n)


def on_branch(n: int, m: int, func, support, d2=None) -> BranchFunction:
    funcs = [None] * n
    sups = [None] * n
    dd = [None] * n
    funcs[m - 1], sups[m - 1], dd[m - 1] = func, tuple(support), d2
    return BranchFunction(tuple(funcs), tuple(sups), tuple(dd))


def gaussian(n: int, m: int, center: float, width: float, amplitude: complex = 1.0) -> BranchFunction:
    """exp(-(x-center)^2 / (2 width^2)) on branch m, truncated at 10 widths."""
    def f(x):
        return amplitude * np.exp(-0.5 * ((x - center) / width) ** 2)

    def f2(x):
        s = (x - center) / width**2
        return f(x) * (s * s - 1.0 / width**2)

    support = (max(0.0, center - 10 * width), center + 10 * width)
    return on_branch(n, m, f, support, f2)


def smooth_bump(n: int, m: int, center: float, radius: float, amplitude: complex = 1.0) -> BranchFunction:
    """C-infinity bump exp(-1/(1-s^2)), s = (x-center)/radius, on branch m."""
    if center - radius < 0:
        raise ValidationError("bump must lie inside the branch")

    def parts(x):
        s = np.clip((np.asarray(x, dtype=float) - center) / radius, -1.0, 1.0)
        w = 1.0 - s * s
        inside = w > 0
        ws = np.where(inside, w, 1.0)
        g = np.where(inside, np.exp(-1.0 / ws), 0.0)
        return s, ws, g, inside

    def f(x):
        return amplitude * parts(x)[2]

    def f2(x):
        s, w, g, inside = parts(x)
        h1 = -2.0 * s / w**2
        h2 = -2.0 / w**2 - 8.0 * s * s / w**3
        return np.where(inside, amplitude * g * (h1 * h1 + h2) / radius**2, 0.0)

    return on_branch(n, m, f, (center - radius, center + radius), f2)


def apply_operator(net: StarNetwork, f: BranchFunction) -> BranchFunction:
    """(Af)_k = -c_k f_k'' + a_k f_k using the analytic second derivatives."""
    if f.d2 is None:
        raise ValidationError("applying A needs analytic second derivatives")
    funcs = []
    for m in range(net.n):
        g, g2 = f.funcs[m], f.d2[m]
        if g is None:
            funcs.append(None)
            continue
        ck, ak = net.c[m], net.a[m]
        funcs.append(lambda x, g=g, g2=g2, ck=ck, ak=ak: -ck * g2(x) + ak * g(x))
    return BranchFunction(tuple(funcs), f.supports)


@dataclass(frozen=True)
class SpectralGrid:
    """Per-branch quadrature nodes/weights on (a_k, lam_max]."""

    lam_max: float
    nodes: tuple
    weights: tuple

    @property
    def n(self) -> int:
        return len(self.nodes)


def spectral_grid(net: StarNetwork, lam_max: float, panels: int = 64,
                  breaks: Sequence[float] = (), nodes: int = GL_NODES,
                  min_panels: int = 8) -> SpectralGrid:
    """Clustered Gauss-Legendre grid split at every threshold and extra break.

    Each segment gets panels in proportion to its length (at least 8).
    """
    if lam_max <= net.a[-1]:
        raise ValidationError(f"lam_max={lam_max} must exceed a_n={net.a[-1]}")
    all_nodes, all_w = [], []
    for k in range(net.n):
        ak = net.a[k]
        cuts = sorted({ak, lam_max, *[b for b in list(net.a) + list(breaks) if ak < b < lam_max]})
        total = lam_max - ak
        xs, ws = [], []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            m = max(min_panels, int(math.ceil(panels * (hi - lo) / total)))
            x, w = gl_clustered(lo, hi, m, nodes)
            xs.append(x)
            ws.append(w)
        x = np.concatenate(xs)
        if np.any(net.threshold_distance(x) < THRESHOLD_GUARD):
            raise ThresholdOnGrid(f"grid node within {THRESHOLD_GUARD:g} of a threshold on branch {k + 1}")
        all_nodes.append(x)
        all_w.append(np.concatenate(ws))
    return SpectralGrid(float(lam_max), tuple(all_nodes), tuple(all_w))


@dataclass(frozen=True)
class SpectralVector:
    grid: SpectralGrid
    values: tuple

    def scaled(self, alpha) -> "SpectralVector":
        return SpectralVector(self.grid, tuple(alpha * v for v in self.values))

    def to_csv(self, path):
        rows = []
        for k, (lam, v) in enumerate(zip(self.grid.nodes, self.values), start=1):
            rows.extend((k, l, z.real, z.imag) for l, z in zip(lam, v))
        return io.write_csv(path, ["branch", "x", "re", "im"], rows)


def spectral_vector(grid: SpectralGrid, funcs) -> SpectralVector:
    """Sample per-branch callables (None = zero) on the grid."""
    vals = []
    for lam, g in zip(grid.nodes, funcs):
        vals.append(np.zeros(lam.shape, complex) if g is None else np.asarray(g(lam), dtype=complex))
    return SpectralVector(grid, tuple(vals))


def _x_rule(net: StarNetwork, f: BranchFunction, m: int, lam_top: float,
            x_panel: Optional[float], nodes: int = GL_NODES):
    lo, hi = f.supports[m - 1]
    if x_panel is None:
        k_top = float(np.real(xi(net, m, lam_top)))
        wavelength = 2 * math.pi / k_top if k_top > 0 else math.inf
        x_panel = min(wavelength / 8.0, (hi - lo) / 64.0)
    panels = max(1, int(math.ceil((hi - lo) / x_panel)))
    return gl_uniform(lo, hi, panels, nodes)


def forward_at(net: StarNetwork, f: BranchFunction, k: int, lam,
               x_panel: Optional[float] = None):
    """(Vf)_k at the energies ``lam`` (1-d array)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.zeros(lam.shape, dtype=complex)
    if lam.size == 0:
        return out
    lam_top = float(lam.max())
    for m in range(1, net.n + 1):
        if f.funcs[m - 1] is None:
            continue
        x, w = _x_rule(net, f, m, lam_top, x_panel)
        fw = w * f.value(m, x)
        for s in range(0, lam.size, _CHUNK):
            L = lam[s:s + _CHUNK, None]
            kern = np.conj(eigenfunction(net, k, -1, L, m, x[None, :]))
            out[s:s + _CHUNK] += kern @ fw
    return out


def forward(net: StarNetwork, f: BranchFunction, grid: SpectralGrid,
            x_panel: Optional[float] = None) -> SpectralVector:
    for lam in grid.nodes:
        if np.any(net.threshold_distance(lam) < THRESHOLD_GUARD):
            raise ThresholdOnGrid("spectral grid touches a threshold")
    vals = tuple(forward_at(net, f, k, grid.nodes[k - 1], x_panel) for k in range(1, net.n + 1))
    return SpectralVector(grid, vals)


def inverse(net: StarNetwork, g: SpectralVector, m: int, x):
    """(V^{-1} g)_m(x) by quadrature over the grid of ``g``."""
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    out = np.zeros(flat.shape, dtype=complex)
    for k in range(1, net.n + 1):
        lam, w, v = g.grid.nodes[k - 1], g.grid.weights[k - 1], g.values[k - 1]
        if not np.any(v):
            continue
        coef = MEASURE_SCALE * w * weight_q(net, k, lam) * v
        for s in range(0, flat.size, _CHUNK):
            X = flat[s:s + _CHUNK, None]
            out[s:s + _CHUNK] += eigenfunction(net, k, -1, lam[None, :], m, X) @ coef
    return out.reshape(x.shape) if x.ndim else complex(out[0])


def q_inner(net: StarNetwork, g: SpectralVector, h: SpectralVector) -> complex:
    tot = 0.0 + 0.0j
    for k in range(1, net.n + 1):
        lam, w = g.grid.nodes[k - 1], g.grid.weights[k - 1]
        tot += np.sum(MEASURE_SCALE * w * weight_q(net, k, lam) * g.values[k - 1] * np.conj(h.values[k - 1]))
    return complex(tot)


def q_norm(net: StarNetwork, g: SpectralVector) -> float:
    return math.sqrt(max(q_inner(net, g, g).real, 0.0))


def h_norm(f: BranchFunction, panels: int = 256) -> float:
    """Plain L^2 norm over all branches."""
    tot = 0.0
    for m in range(1, f.n + 1):
        if f.funcs[m - 1] is None:
            continue
        lo, hi = f.supports[m - 1]
        x, w = gl_uniform(lo, hi, panels)
        tot += float(np.sum(w * np.abs(f.value(m, x)) ** 2))
    return math.sqrt(tot)


def _window_mass(net, f, lo, hi, panels=16):
    tot = 0.0
    for k in range(1, net.n + 1):
        a_lo = max(lo, net.a[k - 1])
        if a_lo >= hi:
            continue
        cuts = sorted({a_lo, hi, *[b for b in net.a if a_lo < b < hi]})
        for s, e in zip(cuts[:-1], cuts[1:]):
            lam, w = gl_clustered(s, e, panels)
            v = forward_at(net, f, k, lam)
            tot += float(np.sum(MEASURE_SCALE * w * weight_q(net, k, lam) * np.abs(v) ** 2))
    return tot


def choose_lambda_max(net: StarNetwork, f: BranchFunction, rel_tol: float = 1e-8,
                      start: float = 4.0, max_doublings: int = 16) -> float:
    """Smallest doubling cutoff whose extrapolated spectral tail is below rel_tol."""
    base = net.a[-1]
    edge = base + start
    total = _window_mass(net, f, net.a[0], edge)
    prev = None
    for _ in range(max_doublings):
        nxt = base + 2.0 * (edge - base)
        mass = _window_mass(net, f, edge, nxt)
        total += mass
        edge = nxt
        if prev is not None and mass < prev:
            tail = mass * mass / (prev - mass)
            if tail <= rel_tol * total:
                return edge
        elif total > 0 and mass <= 1e-3 * rel_tol * total:
            return edge
        prev = mass
    return edge


def default_grid(net: StarNetwork, f: BranchFunction, panels: int = 64) -> SpectralGrid:
    return spectral_grid(net, choose_lambda_max(net, f), panels)


def isometry_defect(net: StarNetwork, f: BranchFunction, grid: Optional[SpectralGrid] = None,
                    x_panel: Optional[float] = None) -> float:
    """|  ||Vf||_q - ||f||_H  | / ||f||_H, zero for the zero function."""
    if f.is_zero:
        return 0.0
    hn = h_norm(f)
    if hn == 0.0:
        return 0.0
    grid = default_grid(net, f) if grid is None else grid
    return abs(q_norm(net, forward(net, f, grid, x_panel)) - hn) / hn


def diagonalization_defect(net: StarNetwork, f: BranchFunction, grid: SpectralGrid,
                           x_panel: Optional[float] = None) -> float:
    """max over the grid of |V(Af)_k - lam (Vf)_k|."""
    if f.is_zero:
        return 0.0
    vf = forward(net, f, grid, x_panel)
    vaf = forward(net, apply_operator(net, f), grid, x_panel)
    worst = 0.0
    for lam, a, b in zip(grid.nodes, vaf.values, vf.values):
        if lam.size:
            worst = max(worst, float(np.max(np.abs(a - lam * b))))
    return worst

"""Decay-exponent fits, remainder tables and inside/outside-cone rasters."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .asymptotics import leading_coefficient, profile_cone
from .errors import BudgetExceeded, NonPositiveSample, ValidationError
from .initial_data import SpectralProfile
from .network import StarNetwork
from .propagator import check_branch, u_minus, u_plus
from .quadrature import DEFAULT_PANEL_CAP

MIN_FIT_POINTS = 5


def geometric_times(t_min: float = 1e2, t_max: float = 1e4, count: int = 8) -> list[float]:
    return [float(t) for t in np.geomspace(t_min, t_max, count)]


@dataclass(frozen=True)
class RaySeries:
    slope: float
    samples: tuple  # ((t, |u|), ...)

    def __post_init__(self):
        ts = [t for t, _ in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValidationError("ray samples need strictly increasing t")
        if any(u < 0 or math.isnan(u) for _, u in self.samples):
            raise ValidationError("ray samples need |u| >= 0")

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([u for _, u in self.samples], dtype=float)


@dataclass(frozen=True)
class DecayReport:
    exponent: float
    intercept: float
    residual: float
    n_points: int
    slope: Optional[float] = None
    flags: tuple = ()


def decay_fit(series: RaySeries) -> DecayReport:
    """Least-squares line through (log t, log|u|); intercept is the natural log of the prefactor."""
    if len(series.samples) < MIN_FIT_POINTS:
        raise ValidationError(f"need at least {MIN_FIT_POINTS} samples, got {len(series.samples)}")
    u = series.values
    if np.any(u <= 0):
        raise NonPositiveSample("decay fit needs |u| > 0 at every sample")
    lt, lu = np.log(series.times), np.log(u)
    A = np.vstack([lt, np.ones_like(lt)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, lu, rcond=None)
    resid = float(np.max(np.abs(lu - (slope * lt + icpt))))
    return DecayReport(float(slope), float(icpt), resid, len(u), series.slope)


def _map(fn, items, threads: int):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


@dataclass(frozen=True)
class RemainderRow:
    t: float
    x: float
    abs_uplus: float
    abs_H: float
    product: float


@dataclass(frozen=True)
class RemainderTable:
    slope: float
    rows: tuple
    c_est: float
    bounded: bool

    @property
    def products(self) -> np.ndarray:
        return np.array([row.product for row in self.rows])


def bounded_flag(values) -> bool:
    """Last-third max no larger than 1.5 times the first-third max."""
    v = np.asarray(values, dtype=float)
    m = max(1, len(v) // 3)
    first, last = float(np.max(v[:m])), float(np.max(v[-m:]))
    return last <= 1.5 * first


def remainder_table(net: StarNetwork, profile: SpectralProfile, r: int, slope: float, t_list,
                    panel_cap: int = DEFAULT_PANEL_CAP, threads: int = 1) -> RemainderTable:
    """t |u_+ - H t^{-1/2}| along the ray t = slope x."""
    check_branch(profile, r)
    t_list = [float(t) for t in t_list]
    H = leading_coefficient(net, profile, r, slope, 1.0).H if profile.amplitude != 0 else 0j
    if profile.amplitude == 0:
        profile_cone(profile, r)
    # |H| depends only on the slope; the phase does not, so recompute it per point
    def row(t):
        x = t / slope
        up = u_plus(net, profile, r, t, x, panel_cap=panel_cap)
        h = leading_coefficient(net, profile, r, t, x).H if H != 0 else 0j
        return RemainderRow(t, x, abs(up), abs(h), t * abs(up - h / math.sqrt(t)))
    rows = tuple(_map(row, t_list, threads))
    prods = [row.product for row in rows]
    c_est = float(max(prods)) if prods else 0.0
    return RemainderTable(float(slope), rows, c_est, bounded_flag(prods) if prods else True)


@dataclass(frozen=True)
class RasterPoint:
    slope: float
    t: float
    x: float
    abs_u: Optional[float]
    abs_uplus: Optional[float]
    abs_uminus: Optional[float]
    abs_H: Optional[float]
    remainder_product: Optional[float]
    status: str  # ok | budget-exceeded
    region: str  # inside | boundary | outside | outside-light-cone


@dataclass
class RasterResult:
    points: list = field(default_factory=list)
    reports: list = field(default_factory=list)


def _raster_point(net, profile, r, cn, slope, t, panel_cap):
    x = t / slope
    region = cn.classify(t, x)
    try:
        up = u_plus(net, profile, r, t, x, panel_cap=panel_cap)
        um = u_minus(net, profile, r, t, x, panel_cap=panel_cap)
    except BudgetExceeded:
        return RasterPoint(slope, t, x, None, None, None, None, None, "budget-exceeded", region)
    h = prod = None
    if region == "inside":
        H = leading_coefficient(net, profile, r, t, x).H
        h, prod = abs(H), t * abs(up - H / math.sqrt(t))
    return RasterPoint(slope, t, x, abs(0.5 * (up + um)), abs(up), abs(um), h, prod, "ok", region)


def cone_raster(net: StarNetwork, profile: SpectralProfile, r: int, slopes, t_list,
                panel_cap: int = DEFAULT_PANEL_CAP, threads: int = 1) -> RasterResult:
    """Per-slope fit of |u_+| against t; points over the panel budget are left out of the fit.

    Slopes outside the light cone (c_r (t/x)^2 <= 1) are computed and flagged;
    the decay expected there is not a proven rate, only an empirical check.
    """
    check_branch(profile, r)
    slopes = [float(s) for s in slopes]
    t_list = [float(t) for t in t_list]
    result = RasterResult()
    if not slopes:
        return result
    cn = profile_cone(profile, r)
    jobs = [(s, t) for s in slopes for t in t_list]
    result.points = _map(lambda st: _raster_point(net, profile, r, cn, st[0], st[1], panel_cap),
                         jobs, threads)
    for s in slopes:
        pts = [p for p in result.points if p.slope == s]
        good = [p for p in pts if p.status == "ok"]
        flags = sorted({p.region for p in pts})
        if len(good) < len(pts):
            flags.append("budget-exceeded")
        try:
            rep = decay_fit(RaySeries(s, tuple((p.t, p.abs_uplus) for p in good)))
            result.reports.append(DecayReport(rep.exponent, rep.intercept, rep.residual,
                                              rep.n_points, s, tuple(flags)))
        except (NonPositiveSample, ValidationError):
            result.reports.append(DecayReport(math.nan, math.nan, math.nan, len(good), s,
                                              tuple(flags + ["unfit"])))
    return result


def ray_series(net: StarNetwork, profile: SpectralProfile, r: int, slope: float, t_list,
               which: str = "plus", panel_cap: int = DEFAULT_PANEL_CAP, threads: int = 1) -> RaySeries:
    """|u_+| (or |u_-|) sampled along the ray t = slope x."""
    f = u_plus if which == "plus" else u_minus
    vals = _map(lambda t: abs(f(net, profile, r, t, t / slope, panel_cap=panel_cap)),
                [float(t) for t in t_list], threads)
    return RaySeries(float(slope), tuple(zip([float(t) for t in t_list], vals)))

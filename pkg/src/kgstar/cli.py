"""kgstar command line: ``kgstar COMMAND --config FILE [--out DIR]``.

Exit status is 0 on success, 1 for invalid input (bad config, violated
hypotheses) and 2 for runtime failures such as an exhausted panel budget.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis, asymptotics
from .config import ExperimentConfig, load_config
from .errors import KGStarError, ParseError, ValidationError
from .io import write_csv, write_json
from .network import band
from .propagator import u_minus, u_plus
from .quadrature import DEFAULT_PANEL_CAP
from .spectral import kirchhoff_defects, ode_residual
from .transform import choose_lambda_max, diagonalization_defect, gaussian, isometry_defect, spectral_grid

COMMANDS = ("validate", "eigen-check", "transform-check", "simulate", "asymptotics",
            "decay-scan", "step-sweep")


def _summary(cfg: ExperimentConfig, command: str, **extra) -> dict:
    return {"command": command, "config_hash": cfg.text_hash, **extra}


def _band_rows(net):
    for j in range(1, net.n + 1):
        b = band(net, j)
        yield j, b.lo, b.hi, b.degenerate


def cmd_validate(cfg, out, ctx):
    rows = list(_band_rows(cfg.net))
    print(f"network: n={cfg.net.n} c={list(cfg.net.c)} a={list(cfg.net.a)}")
    print(f"{'j':>3} {'lo':>14} {'hi':>14}  degenerate")
    for j, lo, hi, deg in rows:
        print(f"{j:>3} {lo:>14.6g} {hi:>14.6g}  {deg}")
    p = cfg.profile
    print(f"profile: j={p.j} k={p.k} support=({p.lambda_min:.6g}, {p.lambda_max:.6g}), r={cfg.r}")
    write_csv(out / "bands.csv", ("j", "lo", "hi", "degenerate"), rows)
    write_json(out / "validate.json", _summary(cfg, "validate", n=cfg.net.n,
                                               support=[p.lambda_min, p.lambda_max]))
    return 0


def _band_samples(net, j, count, rng):
    b = band(net, j)
    hi = b.hi if math.isfinite(b.hi) else b.lo + 10.0 * max(1.0, b.lo)
    width = hi - b.lo
    return b.lo + width * (0.01 + 0.98 * rng.random(count))


def cmd_eigen_check(cfg, out, ctx):
    rng = np.random.default_rng(cfg.get("run.seed"))
    h = cfg.get("eigen.h")
    tol = cfg.get("tolerances.kirchhoff")
    net = cfg.net
    rows, orders, worst = [], [], 0.0
    for j in range(1, net.n + 1):
        if band(net, j).degenerate:
            continue
        for lam in _band_samples(net, j, cfg.get("eigen.samples"), rng):
            for sign in (1, -1):
                t0, t1 = (float(v) for v in kirchhoff_defects(net, j, sign, lam))
                worst = max(worst, t0, t1)
                for k in range(1, net.n + 1):
                    r1 = float(ode_residual(net, j, sign, lam, k, 1.0, h))
                    r2 = float(ode_residual(net, j, sign, lam, k, 1.0, h / 2))
                    order = math.log2(r1 / r2) if r2 > 0 and r1 > 1e-9 else math.nan
                    if not math.isnan(order):
                        orders.append(order)
                    rows.append((j, sign, k, float(lam), t0, t1, r1, r2, order))
    med = float(np.median(orders)) if orders else math.nan
    ok = worst <= tol and abs(med - 2.0) <= 0.2
    write_csv(out / "eigen_check.csv",
              ("j", "sign", "k", "lambda", "t0_defect", "t1_defect", "residual_h", "residual_h2", "order"), rows)
    write_json(out / "eigen_check.json", _summary(cfg, "eigen-check", max_defect=worst,
                                                  median_order=med, passed=ok))
    print(f"max Kirchhoff defect {worst:.3e} (tol {tol:g}), median ODE order {med:.3f}")
    return 0


def cmd_transform_check(cfg, out, ctx):
    net = cfg.net
    f = gaussian(net.n, cfg.get("transform.branch"), cfg.get("transform.center"), cfg.get("transform.width"))
    lam_max = choose_lambda_max(net, f)
    rows = []
    for panels in cfg.get("transform.panels"):
        grid = spectral_grid(net, lam_max, panels)
        rows.append((panels, lam_max, isometry_defect(net, f, grid)))
    finest = spectral_grid(net, lam_max, cfg.get("transform.panels")[-1])
    diag = diagonalization_defect(net, f, finest)
    write_csv(out / "transform_check.csv", ("panels", "lambda_max", "isometry_defect"), rows)
    write_json(out / "transform_check.json",
               _summary(cfg, "transform-check", lambda_max=lam_max,
                        isometry_defects=[r[2] for r in rows], diagonalization_defect=diag,
                        passed=rows[-1][2] < cfg.get("tolerances.isometry")))
    for p, _, d in rows:
        print(f"panels {p:>5}: isometry defect {d:.3e}")
    print(f"diagonalization defect {diag:.3e}")
    return 0


def cmd_simulate(cfg, out, ctx):
    net, prof, r = cfg.net, cfg.profile, cfg.r
    cap = ctx["panel_cap"]
    pts = [(t, x) for t in cfg.t_list for x in cfg.get("grids.x_list")]

    def one(tx):
        t, x = tx
        up = u_plus(net, prof, r, t, x, panel_cap=cap)
        um = u_minus(net, prof, r, t, x, panel_cap=cap)
        u = 0.5 * (up + um)
        return (t, x, u.real, u.imag, abs(u), up.real, up.imag, um.real, um.imag)

    rows = analysis._map(one, pts, ctx["threads"])
    write_csv(out / "simulate.csv", ("t", "x", "re_u", "im_u", "abs_u", "re_uplus", "im_uplus",
                                     "re_uminus", "im_uminus"), rows)
    write_json(out / "simulate.json", _summary(cfg, "simulate", points=len(rows), branch=r))
    print(f"wrote {len(rows)} field samples on branch {r}")
    return 0


def cmd_asymptotics(cfg, out, ctx):
    net, prof, r = cfg.net, cfg.profile, cfg.r
    cn = asymptotics.profile_cone(prof, r)
    m = cfg.get("grids.rays_per_cone")
    slopes = np.linspace(cn.slope_min, cn.slope_max, m + 2)[1:-1]
    rows = []
    for s in slopes:
        term = asymptotics.leading_coefficient(net, prof, r, float(s), 1.0)
        verb = asymptotics.leading_coefficient(net, prof, r, float(s), 1.0, "verbatim")
        rows.append((float(s), cn.v(s, 1.0), term.p0, term.lambda_star, term.h1, term.h2,
                     abs(term.H), abs(verb.H)))
    bound = asymptotics.coefficient_bound(net, prof, r)
    extra = {}
    if net.n == 2 and prof.shift == net.a[1]:
        extra["bound_two_branch"] = asymptotics.coefficient_bound_two_branch(
            net.a[0], net.a[1], prof.psi.alpha, prof.psi.beta)
    write_csv(out / "asymptotics.csv", ("slope", "v", "p0", "lambda_star", "h1", "h2", "abs_H",
                                        "abs_H_verbatim"), rows)
    write_json(out / "asymptotics.json", _summary(
        cfg, "asymptotics", slope_min=cn.slope_min, slope_max=cn.slope_max, v_min=cn.v_min,
        v_max=cn.v_max, xt_bounds=list(cn.xt_bounds), max_abs_H=max(r_[6] for r_ in rows),
        max_abs_H_verbatim=max(r_[7] for r_ in rows), bound=bound, **extra))
    print(f"cone slopes t/x in [{cn.slope_min:.6g}, {cn.slope_max:.6g}], max|H| "
          f"{max(r_[6] for r_ in rows):.6g}, bound {bound:.6g}")
    return 0


def cmd_decay_scan(cfg, out, ctx):
    net, prof, r = cfg.net, cfg.profile, cfg.r
    cn = asymptotics.profile_cone(prof, r)
    slopes = cfg.get("grids.slopes") or (cn.center_slope, 2.0 * cn.slope_max)
    res = analysis.cone_raster(net, prof, r, slopes, cfg.t_list, ctx["panel_cap"], ctx["threads"])
    rows = [(p.slope, p.t, p.x, p.abs_u, p.abs_uplus, p.abs_uminus, p.abs_H, p.remainder_product,
             p.region, p.status) for p in res.points]
    write_csv(out / "decay_scan.csv", ("slope", "t", "x", "abs_u", "abs_uplus", "abs_uminus", "H_abs",
                                       "remainder_product", "region", "status"), rows)
    reports = []
    growth = cfg.get("tolerances.remainder_growth")
    for rep in res.reports:
        prods = [p.remainder_product for p in res.points
                 if p.slope == rep.slope and p.remainder_product is not None]
        entry = {"slope": rep.slope, "exponent": rep.exponent, "intercept": rep.intercept,
                 "residual": rep.residual, "n_points": rep.n_points, "flags": list(rep.flags)}
        if prods:
            m = max(1, len(prods) // 3)
            entry["C_est"] = max(prods)
            entry["bounded"] = max(prods[-m:]) <= growth * max(prods[:m])
        reports.append(entry)
        print(f"slope {rep.slope:.6g}: exponent {rep.exponent:.4f} flags {','.join(rep.flags)}")
    write_json(out / "decay_scan.json", _summary(cfg, "decay-scan", reports=reports,
                                                 cone=[cn.slope_min, cn.slope_max]))
    return 0


def cmd_step_sweep(cfg, out, ctx):
    prof = cfg.profile
    rows = asymptotics.step_sweep(cfg.net.a[0], cfg.a2_grid, prof.psi.alpha, prof.psi.beta,
                                  cfg.get("grids.rays_per_cone"), cfg.get("grids.sweep_times"),
                                  prof.psi.order, ctx["panel_cap"])
    times = cfg.get("grids.sweep_times")
    header = asymptotics.SWEEP_COLUMNS + tuple(f"abs_uplus_sqrt_t@{t:g}" for t in times)
    body = [row.as_row()[:len(asymptotics.SWEEP_COLUMNS)]
            + tuple(u * math.sqrt(t) for u, t in zip(row.uplus_abs, times)) for row in rows]
    write_csv(out / "step_sweep.csv", header, body)
    fitted = rows[-1].fitted_slope_running if len(rows) > 1 else math.nan
    apertures = [row.aperture for row in rows]
    write_json(out / "step_sweep.json", _summary(
        cfg, "step-sweep", fitted_slope=fitted,
        within_bound=all(row.max_H <= row.bound for row in rows),
        aperture_decreasing=all(b < a for a, b in zip(apertures, apertures[1:]))))
    print(f"log-log slope of max|H| vs a2: {fitted:.4f}")
    return 0


HANDLERS = {
    "validate": cmd_validate,
    "eigen-check": cmd_eigen_check,
    "transform-check": cmd_transform_check,
    "simulate": cmd_simulate,
    "asymptotics": cmd_asymptotics,
    "decay-scan": cmd_decay_scan,
    "step-sweep": cmd_step_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kgstar", description="Klein-Gordon waves on star-shaped networks.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="experiment config file")
    ap.add_argument("--out", default=None, help="output directory (default: output.dir from config)")
    ap.add_argument("--threads", type=int, default=None, help="worker threads (env KGSTAR_THREADS)")
    ap.add_argument("--panel-cap", type=int, default=None, help="max quadrature panels per integral")
    return ap


def _threads(arg) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("KGSTAR_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def run(command: str, cfg: ExperimentConfig, out, threads: int = 1, panel_cap=None) -> int:
    if command not in HANDLERS:
        raise ValidationError(f"unknown command {command!r}")
    cap = panel_cap or cfg.get("run.panel_cap") or DEFAULT_PANEL_CAP
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return HANDLERS[command](cfg, out, {"threads": threads, "panel_cap": cap})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except (ParseError, ValidationError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    out = args.out if args.out is not None else cfg.get("output.dir")
    try:
        return run(args.command, cfg, out, _threads(args.threads), args.panel_cap)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except KGStarError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

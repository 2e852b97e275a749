import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kgstar.analysis import geometric_times, remainder_table
from kgstar.asymptotics import (coefficient_bound, coefficient_bound_two_branch, coefficient_lower_bound_two_branch,
                                cone, h1_bound, h2_bound, h_factors, leading_coefficient, phase, phase_point,
                                profile_cone, stationary_point, step_profile, step_sweep)
from kgstar.errors import BandViolation, OutsideCone, OutsideLightCone, ParameterViolation
from kgstar.initial_data import bump, make_profile
from kgstar.network import validate_network
from kgstar.propagator import u_plus
from kgstar.spectral import xi


def unit(a=1.0, c=1.0):
    return validate_network((1.0, c), (0.0, a))


def test_phase_examples():
    net = unit(1.0, 1.0)
    p = np.linspace(0, 3, 7)
    jet = phase(net, 2, p, 1.0, 0.0)
    assert np.allclose(jet.value, np.sqrt(1 + p * p))
    assert np.allclose(jet.d1, p / np.sqrt(1 + p * p))
    s = 1 / math.sqrt(2)
    assert float(phase(net, 2, 1.0, s, s).value) == pytest.approx((math.sqrt(2) - 1) / math.sqrt(2), rel=1e-15)


def test_phase_derivatives_match_finite_differences():
    rng = np.random.default_rng(7)
    for _ in range(50):
        c, a = rng.uniform(0.3, 3), rng.uniform(0.5, 20)
        net = validate_network((1.0, c), (0.0, a))
        p = rng.uniform(0.05, 5)
        th = rng.uniform(0.05, math.pi / 2 - 0.05)
        tau, chi = math.cos(th), math.sin(th)
        jet = phase(net, 2, p, tau, chi)
        h = 1e-3 * max(p, 0.1)
        for lower, upper in ((jet.value, jet.d1), (jet.d1, jet.d2), (jet.d2, jet.d3), (jet.d3, jet.d4)):
            idx = [jet.value, jet.d1, jet.d2, jet.d3].index(lower)
            f = lambda q: phase(net, 2, q, tau, chi)[idx]
            # five-point central difference, error O(h^4)
            fd = (-f(p + 2 * h) + 8 * f(p + h) - 8 * f(p - h) + f(p - 2 * h)) / (12 * h)
            scale = max(abs(float(upper)), 1e-3 * abs(float(jet.d2)))
            assert abs(float(fd) - float(upper)) <= 1e-6 * scale


def test_stationary_point_examples():
    net = unit()
    p0 = stationary_point(net, 2, math.sqrt(2), 1.0)
    assert p0 == pytest.approx(1.0, rel=1e-15)
    om = math.sqrt(3)
    assert abs(float(phase(net, 2, p0, math.sqrt(2) / om, 1 / om).d1)) < 1e-12
    assert stationary_point(net, 2, 5.0, 1e-8) < 1e-8
    with pytest.raises(OutsideLightCone):
        stationary_point(net, 2, 1.0, 1.0)


def test_boundary_slope_hits_endpoint():
    net = validate_network((1.0, 2.0), (0.0, 4.0))
    lmax = 6.0
    s = math.sqrt(lmax / (2.0 * (lmax - 4.0)))
    assert stationary_point(net, 2, s, 1.0) == pytest.approx(float(np.real(xi(net, 2, lmax))), rel=1e-13)


def test_cone_two_branch():
    net = validate_network((1, 1), (0, 10))
    cn = cone(net, 2, 10.25, 10.75)
    assert cn.slope_min == pytest.approx(math.sqrt(10.75 / 0.75), rel=1e-15)
    assert cn.slope_max == pytest.approx(math.sqrt(10.25 / 0.25), rel=1e-15)
    assert (round(cn.slope_min, 4), round(cn.slope_max, 4)) == (3.7859, 6.4031)
    assert cn.v_min == pytest.approx(cn.c_r * cn.slope_min**2 - 1, rel=1e-14)
    assert cn.v_max == pytest.approx(cn.c_r * cn.slope_max**2 - 1, rel=1e-14)


def test_cone_errors():
    net = validate_network((1, 1), (0, 10))
    with pytest.raises(BandViolation):
        cone(net, 2, 9.0, 10.5)
    with pytest.raises(BandViolation):
        cone(net, 2, 10.5, 10.4)
    with pytest.raises(BandViolation):
        cone(net, 1, 0.5, 0.75)


@settings(max_examples=200)
@given(st.floats(0.2, 5), st.floats(0.1, 30), st.floats(0.01, 3), st.floats(0.01, 3), st.floats(0.5, 20))
def test_cone_slope_and_v_membership_agree(c, a, d0, width, slope):
    net = validate_network((1.0, c), (0.0, a))
    cn = cone(net, 2, a + d0, a + d0 + width)
    assert cn.contains(slope, 1.0) == cn.contains_v(slope, 1.0)


def test_classify():
    net = validate_network((1, 1), (0, 10))
    cn = cone(net, 2, 10.25, 10.75)
    assert cn.classify(cn.center_slope, 1.0) == "inside"
    assert cn.classify(cn.slope_min, 1.0) == "boundary"
    assert cn.classify(2 * cn.slope_max, 1.0) == "outside"
    assert cn.classify(0.5, 1.0) == "outside-light-cone"
    pp = phase_point(net, 2, 10.0, 2.0, cn)
    assert pp.tau**2 + pp.chi**2 == pytest.approx(1.0)
    assert pp.p0 is not None
    assert phase_point(net, 2, 30.0, 2.0, cn).p0 is None


def test_leading_coefficient_errors(step10):
    cn = profile_cone(step10, 2)
    with pytest.raises(OutsideCone):
        leading_coefficient(step10.net, step10, 2, cn.slope_min, 1.0)
    with pytest.raises(OutsideCone):
        leading_coefficient(step10.net, step10, 2, 2 * cn.slope_max, 1.0)


def test_zero_profile_gives_zero_H(step10):
    cn = profile_cone(step10, 2)
    assert leading_coefficient(step10.net, step10.scaled(0.0), 2, cn.center_slope, 1.0).H == 0


def test_stationary_point_properties(step10):
    net = step10.net
    cn = profile_cone(step10, 2)
    for s in np.linspace(cn.slope_min, cn.slope_max, 12)[1:-1]:
        term = leading_coefficient(net, step10, 2, 100 * s, 100.0)
        om = math.hypot(100 * s, 100.0)
        jet = phase(net, 2, term.p0, 100 * s / om, 100 / om)
        assert abs(float(jet.d1)) < 1e-12
        assert float(jet.d2) > 0
        assert term.h1 > 0 and term.h2 > 0
        assert cn.lambda_min < term.lambda_star < cn.lambda_max


def test_consistent_coefficient_is_the_limit(step10):
    # |u_+| sqrt(t) converges to |H| along a fixed ray
    net = step10.net
    s = profile_cone(step10, 2).center_slope
    H = leading_coefficient(net, step10, 2, s, 1.0).H
    vals = [abs(u_plus(net, step10, 2, t, t / s)) * math.sqrt(t) for t in (1e4, 1e5, 1e6)]
    errs = [abs(v - abs(H)) for v in vals]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-4 * abs(H)
    # and the phase too
    t = 1e6
    Ht = leading_coefficient(net, step10, 2, t, t / s).H
    assert abs(u_plus(net, step10, 2, t, t / s) - Ht / math.sqrt(t)) < 1e-4 * abs(H) / math.sqrt(t)


def test_remainder_within_twice_c_est(step10):
    net = step10.net
    s = profile_cone(step10, 2).center_slope
    c_est = remainder_table(net, step10, 2, s, geometric_times()).c_est
    for t in (400.0, 1600.0, 6400.0):
        H = leading_coefficient(net, step10, 2, t, t / s).H
        assert abs(u_plus(net, step10, 2, t, t / s) - H / math.sqrt(t)) <= 2 * c_est / t


def test_verbatim_convention_ratio():
    net = validate_network((1.0, 1.7), (0.0, 5.0))
    p = make_profile(net, 2, 1, bump(0.3, 1.1), shift=5.0)
    cn = profile_cone(p, 2)
    for s in np.linspace(cn.slope_min, cn.slope_max, 7)[1:-1]:
        a = leading_coefficient(net, p, 2, s, 1.0)
        b = leading_coefficient(net, p, 2, s, 1.0, convention="verbatim")
        assert abs(a.H) == pytest.approx(2 * math.sqrt(1.7) / math.pi * abs(b.H), rel=1e-13)
        assert np.angle(a.H * b.H) == pytest.approx(np.angle(2j), abs=1e-12)


def test_h_factor_bounds(step10):
    net = step10.net
    cn = profile_cone(step10, 2)
    slopes = np.linspace(cn.slope_min, cn.slope_max, 200)
    h1 = [h_factors(net, 2, 1, s)[0] for s in slopes]
    h2 = [h_factors(net, 2, 1, s)[1] for s in slopes]
    assert int(np.argmax(h1)) == 0
    assert h1[0] == pytest.approx(h1_bound(cn), rel=1e-12)
    assert max(h2) <= h2_bound(net, 2, 1, cn.v_min, cn.v_max) * (1 + 1e-12)


def test_bound_compliance_random_networks():
    rng = np.random.default_rng(11)
    for _ in range(5):
        n = int(rng.integers(2, 5))
        c = rng.uniform(0.5, 2.0, n)
        a = np.sort(rng.uniform(0.5, 10.0, n))
        net = validate_network(c, a)
        j = int(rng.integers(2, n + 1))
        k, r = 1, j
        hi = a[j] if j < n else a[j - 1] + 5
        lo = a[j - 1]
        w = hi - lo
        p = make_profile(net, j, k, bump(lo + 0.2 * w, lo + 0.8 * w))
        cn = profile_cone(p, r)
        bound = coefficient_bound(net, p, r)
        for s in rng.uniform(cn.slope_min, cn.slope_max, 20):
            for conv in ("consistent", "verbatim"):
                assert abs(leading_coefficient(net, p, r, s, 1.0, conv).H) <= bound


def test_two_branch_bound_values():
    got = coefficient_bound_two_branch(0, 10, 0.25, 0.75)
    independent = math.sqrt(2 * math.pi * 0.75) * 10.75**0.75 / math.sqrt(10 * 10.75)
    assert got == pytest.approx(independent, rel=1e-15)
    assert got == pytest.approx(1.24300, abs=5e-6)
    for a2 in (1e3, 1e4, 1e6):
        ratio = coefficient_bound_two_branch(0, a2, 0.25, 0.75) / (math.sqrt(2 * math.pi * 0.75) * a2**-0.25)
        assert 0.9 <= ratio <= 1.1
    scan = [coefficient_bound_two_branch(0, a2, 0.25, 0.75) for a2 in np.geomspace(1, 1e6, 400)]
    assert all(b < a for a, b in zip(scan, scan[1:]))
    assert 0 < coefficient_bound_two_branch(5, 5, 0.25, 0.75) < math.inf
    for bad in ((0, 10, 0.75, 0.25), (0, 10, 0.25, 1.5), (3, 1, 0.25, 0.75)):
        with pytest.raises(ParameterViolation):
            coefficient_bound_two_branch(*bad)


def test_two_branch_bound_holds_for_H():
    for a2 in (1.0, 10.0, 300.0):
        p = step_profile(0.0, a2, 0.25, 0.75)
        cn = profile_cone(p, 2)
        b = coefficient_bound_two_branch(0, a2, 0.25, 0.75)
        for s in np.linspace(cn.slope_min, cn.slope_max, 40)[1:-1]:
            assert abs(leading_coefficient(p.net, p, 2, s, 1.0).H) <= b


def test_lower_bound_is_reported_value():
    v = coefficient_lower_bound_two_branch(100.0, 0.25, 0.5)
    assert v == pytest.approx(math.sqrt(2 * math.pi * 0.25) * 100**-0.25 * 0.5)


def test_step_sweep_geometry_and_slope():
    grid = 10 ** np.arange(2.0, 4.01, 0.5)
    rows = step_sweep(0.0, grid, 0.25, 0.75, rays_per_cone=64)
    ap = [r.aperture for r in rows]
    assert all(b < a for a, b in zip(ap, ap[1:]))
    for r in rows:
        assert r.xt_min == pytest.approx(math.sqrt(0.25 / (r.a2 + 0.25)), rel=1e-14)
        assert r.xt_max == pytest.approx(math.sqrt(0.75 / (r.a2 + 0.75)), rel=1e-14)
        assert 1 / r.slope_max == pytest.approx(r.xt_min, rel=1e-14)
        assert 1 / r.slope_min == pytest.approx(r.xt_max, rel=1e-14)
        assert r.max_H <= r.bound
    assert abs(rows[-1].fitted_slope_running + 0.25) <= 0.03
    assert rows[-1].xt_max < 0.01

import math

import numpy as np
import pytest

from kgstar.errors import BranchHypothesisViolated
from kgstar.initial_data import bump, make_profile, realize_u0
from kgstar.network import validate_network
from kgstar.propagator import initial_velocity, kg_residual, solution, u_minus, u_plus


def test_zero_profile(step10):
    z = step10.scaled(0.0)
    assert u_plus(z.net, z, 2, 10.0, 3.0) == 0
    assert u_minus(z.net, z, 2, 10.0, 3.0) == 0


def test_branch_hypothesis(step10):
    with pytest.raises(BranchHypothesisViolated):
        u_plus(step10.net, step10, 1, 1.0, 1.0)
    with pytest.raises(BranchHypothesisViolated):
        u_plus(step10.net, step10, 3, 1.0, 1.0)


# cancellation floor of an O(1) integrand; far outside the cone |u| itself is ~1e-9
ABS_FLOOR = 1e-14


@pytest.mark.parametrize("t,x", [(10.0, 3.0), (0.0, 1.0), (50.0, 9.0), (700.0, 130.0), (3000.0, 5.0)])
def test_lambda_and_p_forms_agree(step10, t, x):
    net = step10.net
    for f in (u_plus, u_minus):
        a = f(net, step10, 2, t, x, form="p")
        b = f(net, step10, 2, t, x, form="lambda")
        assert abs(a - b) <= 1e-8 * abs(a) + ABS_FLOOR


def test_t0_matches_u0(step10):
    net = step10.net
    for x in (0.5, 2.0, 7.0):
        assert u_plus(net, step10, 2, 0.0, x) == pytest.approx(u_minus(net, step10, 2, 0.0, x), rel=1e-14)
        assert abs(solution(net, step10, 2, 0.0, x).value - realize_u0(net, step10, 2, x)) < 1e-3


def test_initial_velocity_zero(step10):
    net = step10.net
    xs = np.linspace(0.0, 10.0, 21)
    umax = np.max(np.abs(realize_u0(net, step10, 2, xs)))
    for x in (1.0, 4.0):
        assert abs(initial_velocity(net, step10, 2, x)) < 1e-4 * umax


def test_kg_residual(step10):
    net = step10.net
    u = abs(solution(net, step10, 2, 5.0, 2.0).value)
    xs = np.linspace(0.0, 10.0, 21)
    umax = np.max(np.abs(realize_u0(net, step10, 2, xs)))
    r1 = kg_residual(net, step10, 2, 5.0, 2.0, h=1e-3)
    r2 = kg_residual(net, step10, 2, 5.0, 2.0, h=2e-3)
    assert r1 < 1e-4 * max(u, umax)
    assert 3.0 < r2 / r1 < 5.0


def test_linearity(step10):
    net = step10.net
    a = u_plus(net, step10, 2, 40.0, 9.0)
    b = u_plus(net, step10.scaled(-2.5), 2, 40.0, 9.0)
    assert b == pytest.approx(-2.5 * a, rel=1e-14)


@pytest.mark.parametrize("t", [100.0, 2000.0, 2e4])
def test_panel_halving_stable(step10, t):
    net = step10.net
    a = u_plus(net, step10, 2, t, t / 5.0)
    b = u_plus(net, step10, 2, t, t / 5.0, refine=2)
    assert abs(a - b) <= 1e-8 * abs(a)


def test_three_branch_tunnel_observation():
    # j = 2, k = 1, observe on r = 2 in a network whose third branch tunnels
    net = validate_network((1.0, 2.0, 0.5), (0.0, 1.0, 6.0))
    p = make_profile(net, 2, 1, bump(2.0, 3.0))
    for t, x in ((0.0, 1.0), (20.0, 4.0)):
        a = u_plus(net, p, 2, t, x)
        b = u_plus(net, p, 2, t, x, form="lambda")
        assert abs(a - b) <= 1e-8 * abs(a)
    assert abs(solution(net, p, 2, 0.0, 1.5).value - realize_u0(net, p, 2, 1.5)) < 1e-3

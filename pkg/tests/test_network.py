import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kgstar.errors import (BandIndexOutOfRange, BranchCountTooSmall, NegativePotential, NonPositiveSpeed,
                           UnsortedPotentials)
from kgstar.network import StarNetwork, band, validate_network


def test_valid_two_branch():
    net = validate_network((1, 1), (0, 3))
    assert net.n == 2
    assert net.c == (1.0, 1.0) and net.a == (0.0, 3.0)


@pytest.mark.parametrize("c,a,err", [
    ((1,), (0,), BranchCountTooSmall),
    ((1, 0), (0, 1), NonPositiveSpeed),
    ((1, -2), (0, 1), NonPositiveSpeed),
    ((1, 1), (3, 0), UnsortedPotentials),
    ((1, 1), (-1, 0), NegativePotential),
])
def test_rejections(c, a, err):
    with pytest.raises(err):
        validate_network(c, a)


def test_length_mismatch():
    with pytest.raises(Exception):
        validate_network((1, 1, 1), (0, 1))


def test_bands():
    net = validate_network((1, 1), (0, 3))
    assert (band(net, 1).lo, band(net, 1).hi) == (0.0, 3.0)
    b2 = band(net, 2)
    assert b2.lo == 3.0 and math.isinf(b2.hi)
    with pytest.raises(BandIndexOutOfRange):
        band(net, 3)
    with pytest.raises(BandIndexOutOfRange):
        band(net, 0)


def test_degenerate_band_flagged():
    net = validate_network((1, 1, 1), (0, 2, 2))
    assert band(net, 2).degenerate
    assert not band(net, 1).degenerate


def test_frozen():
    net = validate_network((1, 1), (0, 3))
    with pytest.raises(Exception):
        net.c = (2, 2)


@given(st.lists(st.floats(0.1, 10), min_size=2, max_size=6).flatmap(
    lambda c: st.tuples(st.just(c), st.lists(st.floats(0, 50), min_size=len(c), max_size=len(c)))))
def test_bands_partition(ca):
    c, a = ca
    net = validate_network(c, sorted(a))
    bs = net.bands()
    assert bs[0].lo == net.a[0]
    for b1, b2 in zip(bs, bs[1:]):
        assert b1.hi == b2.lo
    assert math.isinf(bs[-1].hi)
    # idempotent
    assert validate_network(net.c, net.a) == net
    assert StarNetwork(net.c, net.a) == net

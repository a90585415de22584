import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectran.errors import AccuracyError
from spectran.quadrature import gauss_legendre_rule, integrate, integrate_adaptive, panel_points


def test_rule_is_normalized():
    nodes, weights = gauss_legendre_rule(16)
    assert nodes.shape == weights.shape == (16,)
    assert abs(np.sum(weights) - 2.0) < 1e-14
    assert np.all(np.diff(nodes) > 0)


@given(
    coeffs=st.lists(st.floats(-5, 5), min_size=1, max_size=12),
    a=st.floats(-3, 3),
    width=st.floats(0.1, 4),
)
@settings(max_examples=60, deadline=None)
def test_single_panel_exact_on_polynomials(coeffs, a, width):
    # degree <= 11 < 2 * 16 - 1, so one 16-point panel is exact
    poly = np.polynomial.Polynomial(coeffs)
    exact = poly.integ()(a + width) - poly.integ()(a)
    got = integrate(poly, a, a + width, panels=1, npts=16)
    assert got == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_panel_points_cover_interval():
    nodes, weights = panel_points(0.0, 1.0, panels=4, npts=8)
    assert nodes.shape == weights.shape == (32,)
    assert np.all((nodes > 0.0) & (nodes < 1.0))
    assert abs(np.sum(weights) - 1.0) < 1e-14


def test_adaptive_oscillatory_integrand():
    got = integrate_adaptive(lambda x: np.sin(40.0 * x), 0.0, 1.0, rel_tol=1e-13)
    assert got == pytest.approx((1.0 - math.cos(40.0)) / 40.0, rel=1e-12)


def test_adaptive_empty_interval_is_zero():
    assert integrate_adaptive(np.exp, 1.0, 1.0) == 0.0
    assert integrate_adaptive(np.exp, 2.0, 1.0) == 0.0


def test_adaptive_split_handles_kink():
    got = integrate_adaptive(np.abs, -1.0, 2.0, rel_tol=1e-13, split_at=(0.0,))
    assert got == pytest.approx(2.5, rel=1e-13)


def test_adaptive_absolute_floor_for_vanishing_integrals():
    # odd integrand: the exact value is 0, which no relative test can certify
    got = integrate_adaptive(lambda x: x * np.exp(-(x**2)), -3.0, 3.0, rel_tol=1e-15, abs_tol=1e-13)
    assert abs(got) < 1e-13


def test_adaptive_raises_when_panels_exhausted():
    with pytest.raises(AccuracyError):
        integrate_adaptive(lambda x: np.where(x < 1 / 3, 0.0, 1.0), 0.0, 1.0, max_panels=4)

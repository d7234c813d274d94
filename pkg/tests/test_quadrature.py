import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neelwall.quadrature import (annulus_integral, farfield_integral, gl_panel,
                                 graded_edges, halfplane_integral)


@given(st.integers(min_value=1, max_value=12), st.floats(-2.0, 2.0),
       st.floats(0.1, 3.0))
def test_gl_panel_polynomial_exactness(n, a, w):
    x, wts = gl_panel(a, a + w, n)
    k = 2 * n - 1
    exact = ((a + w) ** (k + 1) - a ** (k + 1)) / (k + 1)
    assert np.dot(wts, x ** k) == pytest.approx(exact, rel=1e-13, abs=1e-13)


def test_graded_edges_cover_interval():
    edges = graded_edges(0.0, 1.0, True, False, 1e-4)
    assert edges[0] == 0.0 and edges[-1] == 1.0
    assert np.all(np.diff(edges) > 0)
    # graded toward the hot end: first panel much smaller than the last
    assert edges[1] - edges[0] <= 1e-4
    assert edges[-1] - edges[-2] > 0.1 * (edges[1] - edges[0])


def test_annulus_area():
    val = annulus_integral(lambda z: np.ones_like(z, dtype=float), 0.0, 0.5, 2.0)
    assert val == pytest.approx(0.5 * math.pi * (4.0 - 0.25), rel=1e-12)


def test_annulus_inverse_r_singularity():
    # integral of 1/|z| over the half-disk of radius 1 equals pi
    val = annulus_integral(lambda z: 1.0 / np.abs(z), 0.0, 0.0, 1.0)
    assert val == pytest.approx(math.pi, rel=1e-11)


def test_farfield_power_decay():
    # integral of |z|^-4 over the half-plane outside |z| = R
    R = 3.0
    val = farfield_integral(lambda z: np.abs(z) ** -4.0, R)
    assert val == pytest.approx(0.5 * math.pi / R ** 2, rel=1e-12)


def test_halfplane_gaussian():
    val = halfplane_integral(lambda z: np.exp(-np.abs(z) ** 2),
                             singular_points=[0.0])
    assert val == pytest.approx(0.5 * math.pi, rel=1e-11)


def test_halfplane_singular_closed_form():
    # f = 1/(|z| (1+|z|^4)): polar integral pi * int_0^inf dr/(1+r^4)
    val = halfplane_integral(lambda z: 1.0 / (np.abs(z) * (1.0 + np.abs(z) ** 4)),
                             singular_points=[0.0])
    assert val == pytest.approx(math.pi * math.pi / (2.0 * math.sqrt(2.0)),
                                rel=1e-11)


def test_halfplane_two_singularities_translation():
    # the same integrable bump placed at two axis points; value must not care
    def make(c):
        return lambda z: 1.0 / (np.sqrt(np.abs(z - c)) * (1.0 + np.abs(z - c) ** 6))

    v0 = halfplane_integral(make(0.0), singular_points=[0.0])
    v1 = halfplane_integral(make(0.4), singular_points=[0.4])
    both = halfplane_integral(lambda z: make(0.0)(z) + make(0.4)(z),
                              singular_points=[0.0, 0.4])
    assert v1 == pytest.approx(v0, rel=1e-10)
    assert both == pytest.approx(v0 + v1, rel=1e-10)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(-0.5, 0.5))
def test_halfplane_scaled_gaussian(s, c):
    val = halfplane_integral(lambda z: np.exp(-np.abs((z - c) / s) ** 2),
                             singular_points=[c])
    assert val == pytest.approx(0.5 * math.pi * s * s, rel=1e-9)


def test_singular_point_radius_guard():
    with pytest.raises(ValueError):
        halfplane_integral(lambda z: np.zeros_like(z, dtype=float),
                           singular_points=[(0.0, 0.5)], patch=0.3)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfvdw import Layer, LayerStack, MaterialModel
from lfvdw.green import (_fresnel, kernel, recurse_r, reflection_set, single_interface_r,
                         trace_integrand)
from lfvdw.units import eps_at, mu_at
from oracles import eps_mu, fresnel, recursion_one_level
from conftest import CASES, MEDIUM_1

resp = st.floats(1.0, 8.0)
wave = st.floats(0.0, 20.0)


def _side(eps, mu, xi, q):
    return eps, mu, math.sqrt(eps * mu * xi * xi + q * q)


@settings(max_examples=200, deadline=None)
@given(resp, resp, st.floats(0.01, 10), st.floats(0.0, 10))
def test_identical_media_do_not_reflect(eps, mu, xi, q):
    side = _side(eps, mu, xi, q)
    for pol in ("s", "p"):
        assert single_interface_r(side, side, pol) == 0.0
        assert _fresnel(side, side, pol, q * q, xi * xi) == 0.0


@settings(max_examples=300, deadline=None)
@given(resp, resp, resp, resp, st.floats(0.01, 10), wave)
def test_antisymmetry_passivity_and_stable_form(e1, m1, e2, m2, xi, q):
    a, b = _side(e1, m1, xi, q), _side(e2, m2, xi, q)
    rs, rp = fresnel(*a, *b)
    for pol, ref in (("s", rs), ("p", rp)):
        r = single_interface_r(a, b, pol)
        assert r == pytest.approx(ref, rel=1e-12, abs=1e-15)
        assert single_interface_r(b, a, pol) == pytest.approx(-r, rel=1e-12, abs=1e-15)
        assert abs(r) <= 1.0
        assert _fresnel(a, b, pol, q * q, xi * xi) == pytest.approx(r, rel=1e-10, abs=1e-14)


def test_large_wavenumber_limits():
    a, b = _side(1.5, 2.0, 1.0, 1e8), _side(3.0, 1.2, 1.0, 1e8)
    assert single_interface_r(a, b, "p") == pytest.approx((3.0 - 1.5) / (4.5), rel=1e-9)
    assert single_interface_r(a, b, "s") == pytest.approx((1.2 - 2.0) / 3.2, rel=1e-9)


def test_stable_form_keeps_precision_for_nearly_matched_media():
    e = 1.7
    a, b = _side(e, 1.0, 0.5, 0.3), _side(e * (1 + 1e-13), 1.0, 0.5, 0.3)
    stable = _fresnel(a, b, "p", 0.09, 0.25)
    # Exact first-order value in the tiny contrast.
    de = e * 1e-13
    ba = a[2]
    dbeta = 0.25 * de / (2 * ba)
    expected = (de * ba - e * dbeta) / (2 * e * ba)
    assert stable == pytest.approx(expected, rel=1e-6)


def _stack(materials, thicknesses, atom_layer, z):
    layers = tuple(Layer(m, t) for m, t in zip(materials, thicknesses))
    return LayerStack(layers, atom_layer, z, 0.01)


INF = math.inf


def test_two_layer_recursion_is_single_interface():
    stack = _stack([MEDIUM_1, CASES[2]], [INF, INF], 2, 0.5)
    xi, q = 0.8, 1.3
    e1, m1 = eps_mu(MEDIUM_1, xi)
    e2, m2 = eps_mu(CASES[2], xi)
    rs, rp = fresnel(e2, m2, math.hypot(math.sqrt(e2 * m2) * xi, q),
                     e1, m1, math.hypot(math.sqrt(e1 * m1) * xi, q))
    assert recurse_r(stack, xi, q, 2, "-", "s") == pytest.approx(rs, rel=1e-13)
    assert recurse_r(stack, xi, q, 2, "-", "p") == pytest.approx(rp, rel=1e-13)
    assert recurse_r(stack, xi, q, 2, "+", "s") == 0.0


def test_four_layer_recursion_matches_one_level_oracle():
    mats = [MEDIUM_1, CASES[1], CASES[3], MaterialModel(2.0, 1.5, 0.01)]
    stack = _stack(mats, [INF, 0.7, 0.4, INF], 2, 0.3)
    xi, q = 0.6, 0.9
    em = [eps_mu(m, xi) for m in mats]
    beta = [math.sqrt(e * m * xi * xi + q * q) for e, m in em]
    for pol, idx in (("s", 0), ("p", 1)):
        r23 = fresnel(*em[1], beta[1], *em[2], beta[2])[idx]
        r34 = fresnel(*em[2], beta[2], *em[3], beta[3])[idx]
        expected = recursion_one_level(r23, r34, beta[2], 0.4)
        assert recurse_r(stack, xi, q, 2, "+", pol) == pytest.approx(expected, rel=1e-13)
        r21 = fresnel(*em[1], beta[1], *em[0], beta[0])[idx]
        assert recurse_r(stack, xi, q, 2, "-", pol) == pytest.approx(r21, rel=1e-13)


def test_identical_outer_layer_gives_no_upper_reflection():
    stack = _stack([MEDIUM_1, CASES[2], CASES[2]], [INF, 1.0, INF], 2, 0.5)
    assert recurse_r(stack, 0.4, 0.2, 2, "+", "p") == 0.0
    assert recurse_r(stack, 0.4, 0.2, 2, "+", "s") == 0.0


def test_recurse_rejects_bad_direction():
    stack = _stack([MEDIUM_1, CASES[2]], [INF, INF], 2, 0.5)
    with pytest.raises(ValueError):
        recurse_r(stack, 0.4, 0.2, 2, "up", "p")


def test_mirror_symmetry_of_trace():
    mats = [MEDIUM_1, CASES[2], CASES[1]]
    left = _stack(mats, [INF, 2.0, INF], 2, 0.6)
    right = _stack(mats[::-1], [INF, 2.0, INF], 2, 1.4)
    for xi, q in [(0.3, 0.2), (1.0, 2.0), (5.0, 0.1)]:
        a, b = trace_integrand(left, xi, q), trace_integrand(right, xi, q)
        assert a[0] == pytest.approx(b[0], rel=1e-13)
        assert a[1] == pytest.approx(b[1], rel=1e-13)


def test_trace_rejects_zero_frequency():
    with pytest.raises(ValueError):
        trace_integrand(_stack([MEDIUM_1, CASES[2]], [INF, INF], 2, 0.5), 0.0, 1.0)


def test_kernel_duplicate_layer_reduces_to_two_layers():
    two = _stack([MEDIUM_1, CASES[2]], [INF, INF], 2, 0.3)
    three = _stack([MEDIUM_1, CASES[2], CASES[2]], [INF, 5.0, INF], 2, 0.3)
    xi = np.array([0.1, 0.5, 2.0, 7.0])
    w = np.array([0.0, 0.3, 1.0, 10.0])
    k2, k3 = kernel(two, xi, w), kernel(three, xi, w)
    assert np.allclose(k3, k2, rtol=1e-12, atol=1e-300)
    assert np.all(k2[1] == 0.0)


def test_kernel_matches_trace_integrand():
    mats = [MEDIUM_1, CASES[3], CASES[1]]
    stack = _stack(mats, [INF, 1.5, INF], 2, 0.4)
    xi, q = 0.7, 1.1
    e2, m2 = float(eps_at(CASES[3], xi)), float(mu_at(CASES[3], xi))
    n2 = math.sqrt(e2 * m2)
    beta = math.sqrt(n2 * n2 * xi * xi + q * q)
    k = kernel(stack, np.array([xi]), np.array([beta - n2 * xi]))[:, 0]
    odd, even = trace_integrand(stack, xi, q)
    # du = (q / beta) dq: the kernel rows are the trace rows times xi^2 beta / q.
    assert k[0] == pytest.approx(odd * xi * xi * beta / q, rel=1e-12)
    assert k[1] == pytest.approx(2 * even * xi * xi * beta / q, rel=1e-12)

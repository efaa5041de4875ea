import math

import numpy as np
import pytest

from lfvdw.quadrature import (MAPS, QuadratureError, QuadratureSpec, integrate_interval,
                              integrate_nested, integrate_semi_infinite)

TIGHT = QuadratureSpec(rel_tol=1e-12, abs_tol=0.0)


@pytest.mark.parametrize("transform", MAPS)
def test_exponential(transform):
    res = integrate_semi_infinite(lambda x: np.exp(-x), QuadratureSpec(1e-12, 0.0, 200, transform))
    assert res.converged
    assert res.value == pytest.approx(1.0, rel=1e-12)


def test_algebraic_tail():
    res = integrate_semi_infinite(lambda x: x**3 / (1 + x * x) ** 3, TIGHT)
    assert res.converged and res.value == pytest.approx(0.25, rel=1e-11)


def test_error_estimate_meets_tolerance():
    spec = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-14)
    res = integrate_semi_infinite(lambda x: np.exp(-x) * np.cos(3 * x), spec)
    assert res.converged
    assert res.error_estimate <= max(spec.rel_tol * abs(res.value), spec.abs_tol)
    assert res.value == pytest.approx(0.1, rel=1e-9)


def test_divergent_integral_is_reported_not_raised():
    res = integrate_semi_infinite(lambda x: 1.0 / (1.0 + x), QuadratureSpec(max_subdivisions=50))
    assert not res.converged


def test_non_finite_integrand_raises_with_abscissa():
    def f(x):
        return np.where(x > 2.0, np.nan, np.exp(-x))

    with pytest.raises(QuadratureError) as info:
        integrate_semi_infinite(f)
    assert info.value.abscissa is not None and info.value.abscissa > 2.0


def test_finite_interval_and_vector_components():
    res = integrate_interval(lambda x: np.stack([np.sin(x), x * x]), 0.0, math.pi, TIGHT, ncomp=2)
    assert res.value[0] == pytest.approx(2.0, rel=1e-12)
    assert res.value[1] == pytest.approx(math.pi**3 / 3, rel=1e-12)


def test_nested_separable():
    res = integrate_nested(lambda x, y: np.exp(-x - 2 * y), spec_outer=TIGHT)
    assert res.converged and res.value == pytest.approx(0.5, rel=1e-10)


def test_nested_variable_lower_limit():
    # int_0^inf dx int_x^inf dy e^{-x-y} = 1/2
    res = integrate_nested(lambda x, y: np.exp(-x - y), spec_outer=TIGHT, inner_lower=lambda x: x)
    assert res.value == pytest.approx(0.5, rel=1e-10)


def test_nested_zero_inner():
    res = integrate_nested(lambda x, y: np.zeros_like(x))
    assert res.converged and res.value == 0.0


def test_linearity():
    def f(x):
        return np.exp(-x) / (1 + x)

    def g(x):
        return x * np.exp(-2 * x)

    a = integrate_semi_infinite(f, TIGHT).value
    b = integrate_semi_infinite(g, TIGHT).value
    c = integrate_semi_infinite(lambda x: 2 * f(x) - 3 * g(x), TIGHT).value
    assert c == pytest.approx(2 * a - 3 * b, rel=1e-11)


def test_maps_agree():
    f = lambda x: x * np.exp(-x / 3) / (1 + x)  # noqa: E731
    vals = [integrate_semi_infinite(f, QuadratureSpec(1e-11, 0.0, 200, m), scale=3.0).value
            for m in MAPS]
    assert vals[0] == pytest.approx(vals[1], rel=1e-10)


def test_bitwise_determinism():
    f = lambda x: np.exp(-x) * np.sin(x) ** 2  # noqa: E731
    r1 = integrate_nested(lambda x, y: f(x) * np.exp(-y * (1 + x)))
    r2 = integrate_nested(lambda x, y: f(x) * np.exp(-y * (1 + x)))
    assert r1.value == r2.value and r1.error_estimate == r2.error_estimate


@pytest.mark.parametrize("kwargs", [dict(rel_tol=0.0), dict(abs_tol=-1.0),
                                    dict(max_subdivisions=3), dict(transform="tanh")])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        QuadratureSpec(**kwargs)


def test_nested_non_finite_inner_reports_inner_abscissa():
    def inner(x, y):
        return np.where(y > 3.0, np.inf, np.exp(-x - y))

    with pytest.raises(QuadratureError) as info:
        integrate_nested(inner)
    assert info.value.abscissa > 3.0

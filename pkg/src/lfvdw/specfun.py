"""Order-one spherical Bessel and Hankel functions for complex arguments.

``bracket(kind, x)`` is d/dx [x f(x)] with f = j1 or h1.  Near the origin
j1 and its bracket switch to a 6-term Taylor series, since the closed form
sin(x)/x^2 - cos(x)/x cancels catastrophically there.

For purely imaginary arguments x = i t the cavity factors are better served by
the exponentially scaled real forms :func:`i1_scaled` and
:func:`ti1_prime_scaled`; see :mod:`lfvdw.cavity`.
"""
from __future__ import annotations

import math

import numpy as np

SERIES_RADIUS = 1e-2
SERIES_TERMS = 6

# x j1(x) = sum_k (-1)^k (2k+2) x^(2k+2) / (2k+3)!  ->  j1 = sum_k c_k x^(2k+1)
_J1_COEF = np.array([(-1) ** k * (2 * k + 2) / math.factorial(2 * k + 3)
                     for k in range(SERIES_TERMS)])
_J1_BRACKET_COEF = np.array([c * (2 * k + 2) for k, c in enumerate(_J1_COEF)])


def _series(coef, x, first_power):
    x2 = x * x
    acc = np.zeros_like(x) + coef[-1]
    for c in coef[-2::-1]:
        acc = acc * x2 + c
    return acc * x**first_power


def _as_complex(x):
    return np.asarray(x, dtype=complex)


def _unwrap(x, out):
    return complex(out) if np.ndim(x) == 0 else out


def j1(x):
    """Spherical Bessel function j_1(x) = sin(x)/x^2 - cos(x)/x."""
    z = _as_complex(x)
    small = np.abs(z) < SERIES_RADIUS
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(z) / z**2 - np.cos(z) / z
    out = np.where(small, _series(_J1_COEF, z, 1), out)
    return _unwrap(x, out)


def h1(x):
    """Spherical Hankel function of the first kind, h_1(x) = -(1/x + i/x^2) e^{ix}."""
    z = _as_complex(x)
    if np.any(z == 0):
        raise ZeroDivisionError("h1 is singular at x = 0")
    out = -(1.0 / z + 1j / z**2) * np.exp(1j * z)
    return _unwrap(x, out)


def bracket(kind: str, x):
    """d/dx [x f(x)] for ``kind`` in {'j1', 'h1'}."""
    z = _as_complex(x)
    if kind == "j1":
        small = np.abs(z) < SERIES_RADIUS
        with np.errstate(divide="ignore", invalid="ignore"):
            # d/dx [sin(x)/x - cos(x)] = sin(x) + cos(x)/x - sin(x)/x^2
            out = np.sin(z) + np.cos(z) / z - np.sin(z) / z**2
        out = np.where(small, _series(_J1_BRACKET_COEF, z, 1), out)
        return _unwrap(x, out)
    if kind == "h1":
        if np.any(z == 0):
            raise ZeroDivisionError("[x h1(x)]' is singular at x = 0")
        # x h1 = -(1 + i/x) e^{ix};  derivative = (-i + 1/x + i/x^2) e^{ix}
        out = (-1j + 1.0 / z + 1j / z**2) * np.exp(1j * z)
        return _unwrap(x, out)
    raise ValueError(f"unknown kind {kind!r}; expected 'j1' or 'h1'")


def y1(x):
    """Spherical Bessel function of the second kind, y_1(x) = -cos(x)/x^2 - sin(x)/x."""
    z = _as_complex(x)
    out = -np.cos(z) / z**2 - np.sin(z) / z
    return _unwrap(x, out)


# Real, exponentially scaled forms on the imaginary axis.  With x = i t:
#   j1(i t) = i i1(t),           i1(t) = cosh t / t - sinh t / t^2
#   [x j1(x)]' = i (t i1(t))'
#   h1(i t) = i e^{-t} (1/t + 1/t^2)
#   [x h1(x)]' = -i e^{-t} (1 + 1/t + 1/t^2)

_I1_COEF = np.array([(2 * k + 2) / math.factorial(2 * k + 3) for k in range(SERIES_TERMS)])
_TI1P_COEF = np.array([c * (2 * k + 2) for k, c in enumerate(_I1_COEF)])
_SCALED_SERIES_RADIUS = 0.1


def i1_scaled(t):
    """e^{-t} i_1(t) for real t >= 0 (modified spherical Bessel function)."""
    t = np.asarray(t, dtype=float)
    small = t < _SCALED_SERIES_RADIUS
    ts = np.where(small, 1.0, t)
    e2 = np.exp(-2.0 * ts)
    closed = (1.0 + e2) / (2.0 * ts) - (1.0 - e2) / (2.0 * ts * ts)
    series = _series(_I1_COEF, np.where(small, t, 0.0), 1) * np.exp(-t)
    out = np.where(small, series, closed)
    return float(out) if out.ndim == 0 else out


def ti1_prime_scaled(t):
    """e^{-t} d/dt [t i_1(t)] for real t >= 0."""
    t = np.asarray(t, dtype=float)
    small = t < _SCALED_SERIES_RADIUS
    ts = np.where(small, 1.0, t)
    e2 = np.exp(-2.0 * ts)
    # d/dt [cosh t - sinh t / t] = sinh t - cosh t / t + sinh t / t^2
    closed = (1.0 - e2) / 2.0 - (1.0 + e2) / (2.0 * ts) + (1.0 - e2) / (2.0 * ts * ts)
    series = _series(_TI1P_COEF, np.where(small, t, 0.0), 1) * np.exp(-t)
    out = np.where(small, series, closed)
    return float(out) if out.ndim == 0 else out

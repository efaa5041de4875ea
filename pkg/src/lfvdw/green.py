"""Generalised Fresnel coefficients and the equal-point Green-tensor trace.

Everything is evaluated at imaginary frequency i*xi, where eps, mu >= 1 and
all perpendicular wavenumbers beta_l = sqrt(eps_l mu_l xi^2 + q^2) are real,
so every quantity here is real.

The TM coefficient uses eps_{l+1} beta_l +/- eps_l beta_{l+1} in both the
numerator and the denominator; it is the form that vanishes for identical
media and tends to (eps_{l+1} - eps_l)/(eps_{l+1} + eps_l) for large q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .units import LayerStack, eps_at, mu_at

POLARIZATIONS = ("s", "p")
_EXP_FLOOR = -745.0


def _exp_neg(x):
    """exp(-x) for x >= 0, returning exact zeros below the double range."""
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(x > -_EXP_FLOOR, 0.0, np.exp(-np.where(np.isfinite(x), x, 0.0)))


@dataclass(frozen=True)
class KVector:
    """Imaginary frequency, transverse wavenumber and beta per layer (0-based list)."""

    xi: float
    q: float
    beta: tuple[float, ...]


@dataclass(frozen=True)
class ReflectionSet:
    """Generalised reflection coefficients seen from layer ``layer``."""

    layer: int
    r_minus: dict
    r_plus: dict
    denominator: dict


def single_interface_r(side_l, side_l1, pol: str):
    """Fresnel coefficient for reflection inside medium l off medium l+1.

    ``side_l`` and ``side_l1`` are (eps, mu, beta) triples evaluated at the same
    (xi, q).
    """
    eps_a, mu_a, beta_a = side_l
    eps_b, mu_b, beta_b = side_l1
    if pol == "s":
        wa, wb = mu_b * beta_a, mu_a * beta_b
    elif pol == "p":
        wa, wb = eps_b * beta_a, eps_a * beta_b
    else:
        raise ValueError(f"unknown polarisation {pol!r}")
    return (wa - wb) / (wa + wb)


def _fresnel(side_a, side_b, pol, q2, xi2):
    """Cancellation-free form of :func:`single_interface_r`.

    Uses (w_a - w_b) = (w_a^2 - w_b^2)/(w_a + w_b) with the difference of
    squares expanded in q^2 and xi^2, so nearly matched media keep full
    relative accuracy.
    """
    eps_a, mu_a, beta_a = side_a
    eps_b, mu_b, beta_b = side_b
    if pol == "s":
        c_a, c_b = mu_a, mu_b
        cross = xi2 * mu_a * mu_b * (mu_b * eps_a - mu_a * eps_b)
    else:
        c_a, c_b = eps_a, eps_b
        cross = xi2 * eps_a * eps_b * (eps_b * mu_a - eps_a * mu_b)
    total = c_b * beta_a + c_a * beta_b
    return (q2 * (c_b - c_a) * (c_b + c_a) + cross) / (total * total)


def layer_response(stack: LayerStack, xi):
    """eps_l(i xi) and mu_l(i xi) for every layer, as lists of arrays."""
    eps = [eps_at(layer.material, xi) for layer in stack.layers]
    mu = [mu_at(layer.material, xi) for layer in stack.layers]
    return eps, mu


def k_vector(stack: LayerStack, xi: float, q: float) -> KVector:
    eps, mu = layer_response(stack, xi)
    beta = tuple(math.sqrt(e * m * xi * xi + q * q) for e, m in zip(eps, mu))
    return KVector(float(xi), float(q), beta)


def _generalised(eps, mu, beta, thickness, j, pol, q2=None, xi2=None):
    """(r_minus, r_plus) for 0-based atom layer j; arrays broadcast over nodes.

    With ``q2`` and ``xi2`` given the single-interface coefficients use the
    cancellation-free form.
    """
    n = len(eps)

    def interface(l, m):
        sides = (eps[l], mu[l], beta[l]), (eps[m], mu[m], beta[m])
        if q2 is None:
            return single_interface_r(*sides, pol)
        return _fresnel(*sides, pol, q2, xi2)

    zero = np.zeros_like(np.asarray(beta[j], dtype=float))
    r_minus = zero
    for l in range(1, j + 1):
        r_single = interface(l, l - 1)
        if l - 1 == 0:
            r_minus = r_single + zero
        else:
            e = _exp_neg(2.0 * beta[l - 1] * thickness[l - 1])
            r_minus = (r_single + e * r_minus) / (1.0 + r_single * r_minus * e)
    r_plus = zero
    for l in range(n - 2, j - 1, -1):
        r_single = interface(l, l + 1)
        if l + 1 == n - 1:
            r_plus = r_single + zero
        else:
            e = _exp_neg(2.0 * beta[l + 1] * thickness[l + 1])
            r_plus = (r_single + e * r_plus) / (1.0 + r_single * r_plus * e)
    return r_minus, r_plus


def recurse_r(stack: LayerStack, xi: float, q: float, layer: int, direction: str, pol: str):
    """Generalised coefficient r_{layer,+/-} including every sub-layer on that side.

    ``layer`` is 1-based; ``direction`` is '+' (towards layer n) or '-'.
    """
    k = k_vector(stack, xi, q)
    eps, mu = layer_response(stack, xi)
    thickness = [layer_.thickness for layer_ in stack.layers]
    r_minus, r_plus = _generalised(eps, mu, k.beta, thickness, layer - 1, pol)
    if direction == "+":
        return float(r_plus)
    if direction == "-":
        return float(r_minus)
    raise ValueError(f"direction must be '+' or '-', got {direction!r}")


def reflection_set(stack: LayerStack, xi: float, q: float, layer: int | None = None):
    layer = stack.atom_layer if layer is None else layer
    k = k_vector(stack, xi, q)
    eps, mu = layer_response(stack, xi)
    thickness = [l_.thickness for l_ in stack.layers]
    d = thickness[layer - 1]
    r_minus, r_plus, den = {}, {}, {}
    for pol in POLARIZATIONS:
        rm, rp = _generalised(eps, mu, k.beta, thickness, layer - 1, pol)
        r_minus[pol], r_plus[pol] = float(rm), float(rp)
        den[pol] = 1.0 - r_minus[pol] * r_plus[pol] * float(_exp_neg(2.0 * k.beta[layer - 1] * d))
    return ReflectionSet(layer, r_minus, r_plus, den)


def trace_integrand(stack: LayerStack, xi: float, q: float, z_A: float | None = None):
    """Odd- and even-reflection parts of the q-integrand of the Green-tensor trace.

    Returns ``(odd, even)`` with

        odd  = (q/beta_j) sum_s ... [r_-^s/D_s - (1 + 2 q^2/(xi^2 eps_j mu_j)) r_-^p/D_p] e^{-2 beta_j a}
               + (same with r_+) e^{-2 beta_j b}
        even = (q/beta_j) sum_sigma r_-^sigma r_+^sigma e^{-2 beta_j d_j} / D_sigma

    where a and b are the distances to the lower and upper interfaces.  The
    factors mu_j and the frequency integrand weights are left to the caller.
    Requires xi > 0.
    """
    if not xi > 0:
        raise ValueError("trace_integrand needs xi > 0")
    if z_A is not None:
        stack = stack.with_atom(z=z_A)
    j = stack.atom_layer
    rs = reflection_set(stack, xi, q, j)
    k = k_vector(stack, xi, q)
    beta = k.beta[j - 1]
    eps_j = float(eps_at(stack.host, xi))
    mu_j = float(mu_at(stack.host, xi))
    a, b = stack.interface_distances()
    d = stack.layer(j).thickness
    ea, eb, ed = (float(_exp_neg(2.0 * beta * x)) for x in (a, b, d))
    p_weight = 1.0 + 2.0 * q * q / (xi * xi * eps_j * mu_j)
    odd = (ea * (rs.r_minus["s"] / rs.denominator["s"] - p_weight * rs.r_minus["p"] / rs.denominator["p"])
           + eb * (rs.r_plus["s"] / rs.denominator["s"] - p_weight * rs.r_plus["p"] / rs.denominator["p"]))
    even = sum(rs.r_minus[p] * rs.r_plus[p] * ed / rs.denominator[p] for p in POLARIZATIONS)
    return q / beta * odd, q / beta * even


def series_expansion_oracle(r_minus: float, r_plus: float, beta: float, d: float, z_A: float,
                            n_terms: int = 50):
    """Multiple-reflection series for one polarisation, summed term by term.

    Returns ``(odd_sum, even_sum)`` approximating
    ``r_- e^{-2 beta z}/D + r_+ e^{-2 beta (d - z)}/D`` and
    ``r_- r_+ e^{-2 beta d}/D`` with D = 1 - r_- r_+ e^{-2 beta d}.  Test oracle
    only.
    """
    round_trip = r_minus * r_plus * math.exp(-2.0 * beta * d)
    if abs(round_trip) >= 1:
        raise ArithmeticError("multiple-reflection series does not converge (|r- r+ e^-2bd| >= 1)")
    left = r_minus * math.exp(-2.0 * beta * z_A)
    right = r_plus * math.exp(-2.0 * beta * (d - z_A))
    odd_sum = 0.0
    even_sum = 0.0
    power = 1.0
    for _ in range(n_terms):
        odd_sum += (left + right) * power
        power *= round_trip
        even_sum += power
    return odd_sum, even_sum


def kernel(stack: LayerStack, xi, w, *, want_force: bool = True):
    """Vectorised u-integrand of U2 at nodes (xi, u = n_j xi + w).

    Returns an array with rows (odd, even[, force]) such that, with weights
    mu_j alpha LF applied outside, integrating over u gives the trace
    integral.  The substitution u = beta_j turns dq q/beta_j into du.  Rows:

        odd   = sum_sigma W_sigma [r_-^sigma e^{-2ua} + r_+^sigma e^{-2ub}] / D_sigma
        even  = 2 xi^2 sum_sigma r_-^sigma r_+^sigma e^{-2ud} / D_sigma
        force = sum_sigma W_sigma 2u [r_-^sigma e^{-2ua} - r_+^sigma e^{-2ub}] / D_sigma

    with W_s = xi^2 and W_p = -(xi^2 + 2 q^2/(eps_j mu_j)); force is the
    xi-integrand of -dU2/dz in the global coordinate.
    """
    xi = np.asarray(xi, dtype=float)
    w = np.asarray(w, dtype=float)
    j = stack.atom_layer - 1
    eps, mu = layer_response(stack, xi)
    eps = [np.broadcast_to(e, xi.shape) for e in eps]
    mu = [np.broadcast_to(m, xi.shape) for m in mu]
    nj2 = eps[j] * mu[j]
    nj = np.sqrt(nj2)
    u = nj * xi + w
    q2 = w * (w + 2.0 * nj * xi)
    beta = [u if l == j else np.sqrt(q2 + xi * xi * eps[l] * mu[l]) for l in range(stack.n)]
    thickness = [layer.thickness for layer in stack.layers]
    a, b = stack.interface_distances()
    d = thickness[j]
    ea, eb = _exp_neg(2.0 * u * a), _exp_neg(2.0 * u * b)
    ed = _exp_neg(2.0 * u * d)
    xi2 = xi * xi
    weights = {"s": xi2, "p": -(xi2 + 2.0 * q2 / nj2)}
    odd = np.zeros_like(u)
    even = np.zeros_like(u)
    force = np.zeros_like(u)
    for pol in POLARIZATIONS:
        rm, rp = _generalised(eps, mu, beta, thickness, j, pol, q2, xi2)
        den = 1.0 - rm * rp * ed
        left, right = rm * ea / den, rp * eb / den
        odd += weights[pol] * (left + right)
        even += rm * rp * ed / den
        if want_force:
            force += weights[pol] * 2.0 * u * (left - right)
    even *= 2.0 * xi2
    rows = [odd, even, force] if want_force else [odd, even]
    return np.stack(rows)

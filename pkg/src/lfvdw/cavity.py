"""Real-cavity factors and the translationally invariant potential part U1.

On the imaginary axis, with s = xi R_c and n = sqrt(eps mu), the cavity
factor reduces to a ratio of real, exponentially scaled modified spherical
Bessel functions:

    C(i xi) = e^{-2s} N(s) / (s^2 [eps (n s + 1) J(s) + (n^2 s^2 + n s + 1) I(s)])
    N(s)    = (eps - n)(n s^3 + (n + 1) s^2) + (eps - 1)((n + 1) s + 1)

with I = e^{-s} i1 and J = e^{-s} (t i1)'.  The polynomial N has no
cancellation, unlike the literal Hankel-function combination which loses
roughly four digits per decade of s below one.  :func:`c_factor_literal`
and :func:`d_factor_literal` keep the complex form for cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .quadrature import QuadratureResult, QuadratureSpec, integrate_semi_infinite
from .units import AtomModel, MaterialModel, alpha_at, eps_at, mu_at

__all__ = [
    "CavityContext",
    "c_factor",
    "d_factor",
    "c_factor_literal",
    "d_factor_literal",
    "cubic_c_factor",
    "local_field_factor",
    "u1_exact",
    "u1_approx",
    "u1_exact_integrand",
    "u1_approx_integrand",
]

DENOMINATOR_THRESHOLD = 1e-12


@dataclass(frozen=True)
class CavityContext:
    """Host response at the atom and the cavity radius, at frequency i*xi."""

    eps: float
    mu: float
    xi: float
    cavity_radius: float

    @classmethod
    def from_material(cls, material: MaterialModel, xi: float, cavity_radius: float):
        return cls(float(eps_at(material, xi)), float(mu_at(material, xi)), float(xi),
                   float(cavity_radius))

    @property
    def n(self) -> float:
        return math.sqrt(self.eps * self.mu)

    @property
    def z0(self) -> complex:
        return 1j * self.xi * self.cavity_radius

    @property
    def z(self) -> complex:
        return self.n * self.z0


def _scaled_over_s(s):
    """(I(s)/s, J(s)/s), finite at s = 0 (limits 1/3 and 2/3)."""
    s = np.asarray(s, dtype=float)
    small = s < 1e-3
    ss = np.where(small, 1.0, s)
    i_s = np.where(small, np.exp(-s) * (1.0 / 3.0 + s * s / 30.0), specfun.i1_scaled(ss) / ss)
    j_s = np.where(small, np.exp(-s) * (2.0 / 3.0 + 2.0 * s * s / 15.0),
                   specfun.ti1_prime_scaled(ss) / ss)
    return i_s, j_s


def _check_denominator(den, scale):
    if np.any(np.abs(den) <= DENOMINATOR_THRESHOLD * np.abs(scale)):
        raise ArithmeticError("cavity factor denominator vanishes; "
                              "passive media cannot produce this, check the inputs")


def cubic_c_factor(eps, mu, xi, cavity_radius):
    """xi^3 C(i xi), the real combination entering U1; finite as xi -> 0."""
    eps, mu, xi = (np.asarray(v, dtype=float) for v in (eps, mu, xi))
    r = float(cavity_radius)
    n = np.sqrt(eps * mu)
    s = xi * r
    poly = (eps - n) * (n * s**3 + (n + 1.0) * s**2) + (eps - 1.0) * ((n + 1.0) * s + 1.0)
    i_s, j_s = _scaled_over_s(s)
    den = eps * (n * s + 1.0) * j_s + (n * n * s * s + n * s + 1.0) * i_s
    _check_denominator(den, eps * (n * s + 1.0) * j_s)
    out = np.exp(-2.0 * s) * poly / (den * r**3)
    return float(out) if out.ndim == 0 else out


def c_factor(ctx: CavityContext) -> float:
    """Cavity scattering factor C_A(i xi); real on the imaginary axis. Requires xi > 0."""
    if not ctx.xi > 0:
        raise ValueError("c_factor needs xi > 0; use cubic_c_factor for the xi -> 0 limit")
    return cubic_c_factor(ctx.eps, ctx.mu, ctx.xi, ctx.cavity_radius) / ctx.xi**3


def _d_factor(eps, mu, xi, cavity_radius):
    eps, mu, xi = (np.asarray(v, dtype=float) for v in (eps, mu, xi))
    n = np.sqrt(eps * mu)
    s = xi * float(cavity_radius)
    i_s, j_s = _scaled_over_s(s)
    num = n * n * (i_s * (s * s + s + 1.0) + j_s * (s + 1.0))
    den = mu * (i_s * (n * n * s * s + n * s + 1.0) + eps * j_s * (n * s + 1.0))
    _check_denominator(den, mu * eps * j_s)
    with np.errstate(over="ignore"):
        out = np.exp((n - 1.0) * s) * num / den
    return float(out) if out.ndim == 0 else out


def d_factor(ctx: CavityContext) -> float:
    """Local-field factor D_A(i xi) of the real-cavity model. Requires xi > 0.

    Tends to 3 eps / (2 eps + 1) as R_c -> 0.
    """
    if not ctx.xi > 0:
        raise ValueError("d_factor needs xi > 0")
    return _d_factor(ctx.eps, ctx.mu, ctx.xi, ctx.cavity_radius)


def c_factor_literal(ctx: CavityContext) -> complex:
    """C_A evaluated directly from the Bessel/Hankel combination (complex arithmetic)."""
    z0, z, eps = ctx.z0, ctx.z, ctx.eps
    h0, hz = specfun.h1(z0), specfun.h1(z)
    bh0, bhz = specfun.bracket("h1", z0), specfun.bracket("h1", z)
    num = h0 * bhz - eps * hz * bh0
    den = eps * hz * specfun.bracket("j1", z0) - specfun.j1(z0) * bhz
    _check_denominator(den, abs(eps * hz * specfun.bracket("j1", z0)))
    return num / den


def d_factor_literal(ctx: CavityContext) -> complex:
    """D_A evaluated directly from the Bessel/Hankel combination (complex arithmetic)."""
    z0, z, eps = ctx.z0, ctx.z, ctx.eps
    j0, bj0 = specfun.j1(z0), specfun.bracket("j1", z0)
    num = j0 * specfun.bracket("h1", z0) - bj0 * specfun.h1(z0)
    den = ctx.mu * (j0 * specfun.bracket("h1", z) - eps * bj0 * specfun.h1(z))
    _check_denominator(den, abs(ctx.mu * eps * bj0 * specfun.h1(z)))
    return num / den


def local_field_factor(eps):
    """Leading-order local-field factor [3 eps / (2 eps + 1)]^2."""
    eps = np.asarray(eps, dtype=float)
    out = (3.0 * eps / (2.0 * eps + 1.0)) ** 2
    return float(out) if out.ndim == 0 else out


def u1_exact_integrand(host: MaterialModel, atom: AtomModel, cavity_radius: float):
    """xi -> -3 xi^3 alpha C, so that U1 / U0 is its integral over [0, inf)."""
    def f(xi):
        return -3.0 * alpha_at(atom, xi) * cubic_c_factor(eps_at(host, xi), mu_at(host, xi), xi,
                                                          cavity_radius)
    return f


def u1_approx_integrand(host: MaterialModel, atom: AtomModel, cavity_radius: float):
    """Small-radius integrand: R^-3 electric term plus R^-1 mixed term."""
    r = float(cavity_radius)

    def f(xi):
        eps, mu = eps_at(host, xi), mu_at(host, xi)
        electric = 3.0 * (eps - 1.0) / ((2.0 * eps + 1.0) * r**3)
        mixed = 9.0 * xi**2 * (eps**2 * (1.0 - 5.0 * mu) + 3.0 * eps + 1.0) \
            / (5.0 * (2.0 * eps + 1.0) ** 2 * r)
        return -3.0 * alpha_at(atom, xi) * (electric + mixed)
    return f


def u1_exact(host: MaterialModel, atom: AtomModel, cavity_radius: float,
             spec: QuadratureSpec | None = None) -> QuadratureResult:
    """Translationally invariant part U1 in units of U0, from the exact cavity factor."""
    if host.is_vacuum:
        return QuadratureResult(0.0, 0.0, 0, True)
    return integrate_semi_infinite(u1_exact_integrand(host, atom, cavity_radius), spec,
                                   scale=_xi_scale(host, atom))


def u1_approx(host: MaterialModel, atom: AtomModel, cavity_radius: float,
              spec: QuadratureSpec | None = None) -> QuadratureResult:
    """U1 in units of U0 to leading non-vanishing order in the cavity radius."""
    if host.is_vacuum:
        return QuadratureResult(0.0, 0.0, 0, True)
    return integrate_semi_infinite(u1_approx_integrand(host, atom, cavity_radius), spec,
                                   scale=_xi_scale(host, atom))


def _xi_scale(host: MaterialModel, atom: AtomModel) -> float:
    scales = [w for w, _ in atom.transitions]
    if host.omega_pe:
        scales.append(host.omega_te)
    if host.omega_pm:
        scales.append(host.omega_tm)
    return max(scales)

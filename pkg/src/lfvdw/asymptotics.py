"""Asymptotic coefficients of the two-layer potential and sphere comparisons.

Conventions (U0 and reduced units throughout):

* retarded:      U2 ~ C4 / z^4
* non-retarded:  U2 ~ -C3 / z^3 + C1 / z

The atom sits in medium 2, medium 1 is across the interface.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cavity import local_field_factor
from .quadrature import QuadratureSpec, integrate_semi_infinite
from .units import AtomModel, MaterialModel, alpha_at, eps_at, mu_at

__all__ = [
    "AsymptoticCoefficients",
    "c4_retarded",
    "c4_from_models",
    "c4_derivative_signs",
    "c4_small_contrast",
    "c3_nonretarded",
    "c1_nonretarded",
    "coefficients",
    "sphere_excess_polarizability",
    "sphere_potentials",
    "microscopic_potentials",
    "sphere_retarded_factor",
    "atom_retarded_factor",
]

C4_PREFACTOR = 12 * math.pi**2 * 3 / (64 * math.pi**2)        # 9/16
C4_SMALL_PREFACTOR = 12 * math.pi**2 * 9 / (640 * math.pi**2)  # 27/160
C3_PREFACTOR = 12 * math.pi**2 / (16 * math.pi**2)             # 3/4


def _quad(f, scale, spec):
    res = integrate_semi_infinite(f, spec, scale=scale)
    if not res.converged:
        raise ArithmeticError(f"coefficient integral did not converge "
                              f"(value {res.value!r}, error {res.error_estimate!r})")
    return float(res.value)


def c4_retarded(eps1, mu1, eps2, mu2, alpha0=2.0 / 3.0, *, local_field=True,
                spec: QuadratureSpec | None = None) -> float:
    """Retarded coefficient C4 from the static responses, as a v-integral over [n2, inf)."""
    for name, value in (("eps1", eps1), ("mu1", mu1), ("eps2", eps2), ("mu2", mu2)):
        if not value >= 1:
            raise ValueError(f"{name} must be >= 1 for a passive medium, got {value!r}")
    n22 = eps2 * mu2
    n2 = math.sqrt(n22)
    n11 = eps1 * mu1

    def f(x):
        v = n2 + x
        root = np.sqrt(x * (x + 2.0 * n2) + n11)   # sqrt(v^2 - eps2 mu2 + eps1 mu1)
        r_s = (mu1 * v - mu2 * root) / (mu1 * v + mu2 * root)
        r_p = (eps1 * v - eps2 * root) / (eps1 * v + eps2 * root)
        return (r_s + r_p * (1.0 - 2.0 * v * v / n22)) / v**4

    if eps1 == eps2 and mu1 == mu2:
        return 0.0
    integral = _quad(f, n2, spec)
    lf = local_field_factor(eps2) if local_field else 1.0
    return C4_PREFACTOR * alpha0 * lf * mu2 * integral


def c4_from_models(medium1: MaterialModel, medium2: MaterialModel, atom: AtomModel | None = None,
                   **kwargs) -> float:
    atom = atom or AtomModel()
    return c4_retarded(medium1.eps0, medium1.mu0, medium2.eps0, medium2.mu0,
                       float(alpha_at(atom, 0.0)), **kwargs)


def c4_derivative_signs(eps1, mu1, eps2, mu2, step=1e-4, noise_floor=1e-10) -> dict:
    """Signs of dC4/d eps1(0), dC4/d mu1(0), dC4/d mu2(0) by central differences.

    Values are +1, -1 or 0 (inconclusive: |derivative| below ``noise_floor``).
    """
    spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-300)
    base = dict(eps1=eps1, mu1=mu1, eps2=eps2, mu2=mu2)
    out = {}
    for key in ("eps1", "mu1", "mu2"):
        h = step * max(1.0, base[key])
        up, down = dict(base), dict(base)
        up[key] += h
        down[key] = max(1.0, down[key] - h)
        span = up[key] - down[key]
        deriv = (c4_retarded(**up, spec=spec) - c4_retarded(**down, spec=spec)) / span
        out[key] = 0 if abs(deriv) < noise_floor else int(math.copysign(1, deriv))
    return out


def c4_small_contrast(eps2, mu2, chi, zeta, alpha0=2.0 / 3.0) -> float:
    """Closed-form C4 to first order in chi = eps1 - eps2 and zeta = mu1 - mu2."""
    return (C4_SMALL_PREFACTOR * alpha0 * (-23.0 * mu2 * chi + 7.0 * eps2 * zeta)
            / (math.sqrt(eps2 * mu2) * mu2 * (2.0 * eps2 + 1.0) ** 2))


def _frequency_scale(*media, atom: AtomModel):
    scales = [w for w, _ in atom.transitions]
    for m in media:
        if m.omega_pe:
            scales.append(m.omega_te)
        if m.omega_pm:
            scales.append(m.omega_tm)
    return max(scales)


def c3_nonretarded(medium1: MaterialModel, medium2: MaterialModel, atom: AtomModel | None = None,
                   *, local_field=True, spec: QuadratureSpec | None = None) -> float:
    """Leading non-retarded coefficient C3 (electric properties only)."""
    atom = atom or AtomModel()

    def f(xi):
        e1, e2 = eps_at(medium1, xi), eps_at(medium2, xi)
        lf = local_field_factor(e2) if local_field else 1.0
        return C3_PREFACTOR * alpha_at(atom, xi) * lf / e2 * (e1 - e2) / (e1 + e2)

    if medium1.omega_pe == 0 and medium2.omega_pe == 0:
        return 0.0
    if (medium1.omega_te, medium1.omega_pe, medium1.gamma_e) == \
            (medium2.omega_te, medium2.omega_pe, medium2.gamma_e):
        return 0.0
    return _quad(f, _frequency_scale(medium1, medium2, atom=atom), spec)


def c1_nonretarded(medium1: MaterialModel, medium2: MaterialModel, atom: AtomModel | None = None,
                   *, form: str = "general", local_field=True,
                   spec: QuadratureSpec | None = None) -> float:
    """Subleading non-retarded coefficient C1.

    ``form='equal_electric'`` uses the reduced expression valid when both media
    share the same permittivity; it then takes eps from medium 2.
    """
    atom = atom or AtomModel()

    def bracket(xi):
        e1, e2 = eps_at(medium1, xi), eps_at(medium2, xi)
        m1, m2 = mu_at(medium1, xi), mu_at(medium2, xi)
        if form == "general":
            return m2 * ((m1 - m2) / (m1 + m2) + (e1 - e2) / (e1 + e2)
                         + 2.0 * e1 * (e1 * m1 - e2 * m2) / (m2 * (e1 + e2) ** 2))
        if form == "equal_electric":
            return (m1 - m2) * (m2 / (m1 + m2) + 0.5)
        raise ValueError(f"unknown form {form!r}")

    def f(xi):
        e2 = eps_at(medium2, xi)
        lf = local_field_factor(e2) if local_field else 1.0
        return C3_PREFACTOR * xi * xi * alpha_at(atom, xi) * lf * bracket(xi)

    if medium1 == medium2:
        return 0.0
    return _quad(f, _frequency_scale(medium1, medium2, atom=atom), spec)


@dataclass
class AsymptoticCoefficients:
    c4: float
    c3: float
    c1: float
    notes: list[str] = field(default_factory=list)


def coefficients(medium1: MaterialModel, medium2: MaterialModel,
                 atom: AtomModel | None = None, local_field=True) -> AsymptoticCoefficients:
    """C4, C3, C1 for an atom in medium 2, with the regime-validity distances."""
    atom = atom or AtomModel()
    c4 = c4_from_models(medium1, medium2, atom, local_field=local_field)
    c3 = c3_nonretarded(medium1, medium2, atom, local_field=local_field)
    c1 = c1_nonretarded(medium1, medium2, atom, local_field=local_field)
    freqs = [w for w, _ in atom.transitions]
    freqs += [m.omega_te for m in (medium1, medium2) if m.omega_pe]
    freqs += [m.omega_tm for m in (medium1, medium2) if m.omega_pm]
    n_sum = math.sqrt(medium1.eps0 * medium1.mu0) + math.sqrt(medium2.eps0 * medium2.mu0)
    notes = [f"retarded (C4/z^4) for z >> {1.0 / min(freqs):.4g} c/omega_10",
             f"non-retarded (-C3/z^3 + C1/z) for z << {1.0 / (max(freqs) * n_sum):.4g} c/omega_10"]
    return AsymptoticCoefficients(c4, c3, c1, notes)


# -- dielectric spheres --------------------------------------------------------

def sphere_excess_polarizability(sphere: MaterialModel, solvent: MaterialModel, radius: float, xi):
    """Excess polarisability 4 pi R^3 eps2 (eps_s - eps2)/(eps_s + 2 eps2) at i xi (eps0 = 1)."""
    if not radius > 0:
        raise ValueError("sphere radius must be positive")
    es, e2 = eps_at(sphere, xi), eps_at(solvent, xi)
    return 4.0 * math.pi * radius**3 * e2 * (es - e2) / (es + 2.0 * e2)


def sphere_potentials(medium1: MaterialModel, medium2: MaterialModel, sphere: MaterialModel,
                      radius: float, z_s: float, spec: QuadratureSpec | None = None):
    """(non-retarded, retarded) macroscopic potential of a small sphere in medium 2 (U0 units)."""
    if not z_s > radius:
        raise ValueError("the sphere centre must be farther from the interface than its radius")

    def f(xi):
        e1, e2 = eps_at(medium1, xi), eps_at(medium2, xi)
        return sphere_excess_polarizability(sphere, medium2, radius, xi) / e2 * (e1 - e2) / (e1 + e2)

    if medium1.omega_pe == medium2.omega_pe == 0:
        nonret = 0.0
    else:
        nonret = -C3_PREFACTOR / z_s**3 * _quad(f, 1.0, spec)
    e1, e2 = medium1.eps0, medium2.eps0
    alpha_s0 = sphere_excess_polarizability(sphere, medium2, radius, 0.0)
    ret = 12 * math.pi**2 * alpha_s0 / e2**1.5 * sphere_retarded_factor(e1, e2) / z_s**4
    return nonret, float(ret)


def sphere_retarded_factor(eps1, eps2) -> float:
    """Interface factor of the retarded sphere potential, -(23/320 pi^2)(eps1-eps2)/(eps1+eps2)."""
    return -23.0 / (320.0 * math.pi**2) * (eps1 - eps2) / (eps1 + eps2)


def atom_retarded_factor(eps1, eps2, spec: QuadratureSpec | None = None) -> float:
    """Interface factor of the retarded atomic potential, (3/64 pi^2) times the y-integral."""
    if eps1 == eps2:
        return 0.0
    a = eps1 / eps2

    def f(x):
        y = 1.0 + x
        root = np.sqrt(x * (x + 2.0) + a)   # sqrt(y^2 - 1 + a)
        return ((1.0 / y**4 - 2.0 / y**2) * (a * y - root) / (a * y + root)
                + (y - root) / (y + root) / y**4)

    return 3.0 / (64.0 * math.pi**2) * _quad(f, 1.0, spec)


def microscopic_potentials(medium1: MaterialModel, medium2: MaterialModel,
                           atom: AtomModel | None, z: float, spec: QuadratureSpec | None = None):
    """(non-retarded, retarded) atomic U2 for purely dielectric media (U0 units).

    The retarded value uses eps2(0)^(3/2) in the denominator, which is what the
    substitution y = v / sqrt(eps2(0)) produces from C4.
    """
    atom = atom or AtomModel()
    if medium1.omega_pm or medium2.omega_pm:
        raise ValueError("the sphere comparison is defined for purely dielectric media")
    nonret = -c3_nonretarded(medium1, medium2, atom, spec=spec) / z**3
    e1, e2 = medium1.eps0, medium2.eps0
    ret = (12 * math.pi**2 * float(alpha_at(atom, 0.0)) / e2**1.5 * local_field_factor(e2)
           * atom_retarded_factor(e1, e2, spec) / z**4)
    return nonret, ret

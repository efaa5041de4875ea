"""Reduced units, imaginary-frequency response functions and the layer stack.

Internally hbar = c = eps0 = mu0 = 1 and the atomic transition frequency
omega_10 = 1, so frequencies are in omega_10, lengths in c/omega_10 and the
dipole matrix element squared in |d_10|^2.  Potentials are reported in

    U0 = omega_10^3 |d_10|^2 / (12 pi^2 eps0 c^3),

which in reduced units is ``1 / (12 pi^2)``; ``U0_PER_REDUCED`` converts a
reduced energy into multiples of U0.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

U0_PER_REDUCED = 12.0 * math.pi**2
INF = math.inf


class StackError(ValueError):
    """A layer stack violates one or more structural invariants."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ApplicabilityWarning(UserWarning):
    """The cavity radius is not small against the relevant length scales."""


@dataclass(frozen=True)
class ReducedUnits:
    """Scale factors that turn reduced quantities into SI values.

    Only needed at the I/O boundary; the numerics never see SI numbers.
    """

    omega_10: float = 1.0  # rad/s
    d_10: float = 1.0  # C m

    @property
    def length(self) -> float:
        return 299_792_458.0 / self.omega_10

    @property
    def potential(self) -> float:
        eps0, c = 8.8541878128e-12, 299_792_458.0
        return self.omega_10**3 * self.d_10**2 / (12 * math.pi**2 * eps0 * c**3)


@dataclass(frozen=True)
class MaterialModel:
    """Single-resonance Drude-Lorentz permittivity and permeability.

    All frequencies in units of omega_10.  The default is vacuum.
    """

    omega_te: float = 1.0
    omega_pe: float = 0.0
    gamma_e: float = 0.0
    omega_tm: float = 1.0
    omega_pm: float = 0.0
    gamma_m: float = 0.0

    def __post_init__(self):
        for name in ("omega_te", "omega_pe", "gamma_e", "omega_tm", "omega_pm", "gamma_m"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {value!r}")
        if self.omega_pe > 0 and self.omega_te <= 0:
            raise ValueError("omega_te must be positive when omega_pe > 0")
        if self.omega_pm > 0 and self.omega_tm <= 0:
            raise ValueError("omega_tm must be positive when omega_pm > 0")

    @classmethod
    def vacuum(cls) -> "MaterialModel":
        return cls()

    @property
    def eps0(self) -> float:
        return float(eps_at(self, 0.0))

    @property
    def mu0(self) -> float:
        return float(mu_at(self, 0.0))

    @property
    def is_vacuum(self) -> bool:
        return self.omega_pe == 0 and self.omega_pm == 0


def _lorentz(omega_t, omega_p, gamma, xi):
    xi = np.asarray(xi, dtype=float)
    if omega_p == 0:
        return np.ones_like(xi) if xi.ndim else 1.0
    return 1.0 + omega_p**2 / (omega_t**2 + xi * xi + gamma * xi)


def eps_at(material: MaterialModel, xi):
    """Permittivity on the imaginary axis, eps(i xi) = 1 + wP^2/(wT^2 + xi^2 + gamma xi)."""
    return _lorentz(material.omega_te, material.omega_pe, material.gamma_e, xi)


def mu_at(material: MaterialModel, xi):
    """Permeability on the imaginary axis; magnetic analogue of :func:`eps_at`."""
    return _lorentz(material.omega_tm, material.omega_pm, material.gamma_m, xi)


@dataclass(frozen=True)
class AtomModel:
    """Ground-state atom as a list of (omega_k0, |d_0k|^2) transitions."""

    transitions: tuple[tuple[float, float], ...] = ((1.0, 1.0),)

    def __post_init__(self):
        if not self.transitions:
            raise ValueError("an atom needs at least one transition")
        fixed = []
        for omega, d2 in self.transitions:
            omega, d2 = float(omega), float(d2)
            if not omega > 0:
                raise ValueError(f"transition frequency must be positive, got {omega!r}")
            if d2 < 0:
                raise ValueError(f"squared dipole moment must be non-negative, got {d2!r}")
            fixed.append((omega, d2))
        object.__setattr__(self, "transitions", tuple(fixed))

    @property
    def omega_max(self) -> float:
        return max(w for w, _ in self.transitions)


def alpha_at(atom: AtomModel, xi):
    """Isotropic polarisability alpha(i xi) = (2/3) sum_k w_k |d_k|^2 / (w_k^2 + xi^2)."""
    xi = np.asarray(xi, dtype=float)
    total = 0.0
    for omega, d2 in atom.transitions:
        total = total + omega * d2 / (omega * omega + xi * xi)
    return 2.0 / 3.0 * total


@dataclass(frozen=True)
class Layer:
    material: MaterialModel = field(default_factory=MaterialModel)
    thickness: float = INF


@dataclass(frozen=True)
class LayerStack:
    """Planar stack of ``n >= 2`` layers, indexed from 1 as in the usual convention.

    ``atom_layer`` is 1-based.  ``z_atom`` is the local coordinate in that
    layer: for inner layers it runs from 0 at the lower interface to the
    thickness; for the two outer half-spaces it is the distance from their
    single interface.
    """

    layers: tuple[Layer, ...]
    atom_layer: int = 1
    z_atom: float = 1.0
    cavity_radius: float = 0.01
    applicability_fraction: float = 1.0
    applicable: bool = True
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def n(self) -> int:
        return len(self.layers)

    def layer(self, index: int) -> Layer:
        return self.layers[index - 1]

    @property
    def host(self) -> MaterialModel:
        return self.layer(self.atom_layer).material

    def interfaces(self) -> list[float]:
        """Global z of the interfaces; the 1|2 interface sits at z = 0."""
        out = [0.0]
        for layer in self.layers[1:-1]:
            out.append(out[-1] + layer.thickness)
        return out

    def locate(self, z_global: float) -> tuple[int, float]:
        """Map a global z onto (layer index, local coordinate)."""
        edges = self.interfaces()
        if z_global < 0:
            return 1, -z_global
        for k in range(1, len(edges)):
            if z_global < edges[k]:
                return k + 1, z_global - edges[k - 1]
        return self.n, z_global - edges[-1]

    def to_global(self, layer: int | None = None, z_local: float | None = None) -> float:
        layer = self.atom_layer if layer is None else layer
        z_local = self.z_atom if z_local is None else z_local
        if layer == 1:
            return -z_local
        return self.interfaces()[layer - 2] + z_local

    def interface_distances(self) -> tuple[float, float]:
        """Distances from the atom to the lower and upper interfaces of its layer."""
        j, z = self.atom_layer, self.z_atom
        if j == 1:
            return INF, z
        if j == self.n:
            return z, INF
        return z, self.layer(j).thickness - z

    def with_atom(self, layer: int | None = None, z: float | None = None) -> "LayerStack":
        return validate_stack(replace(self, atom_layer=self.atom_layer if layer is None else layer,
                                      z_atom=self.z_atom if z is None else z))

    def at_global(self, z_global: float) -> "LayerStack":
        layer, z = self.locate(z_global)
        return self.with_atom(layer, z)


def stack_problems(stack: LayerStack) -> list[str]:
    problems = []
    if stack.n < 2:
        problems.append(f"a stack needs at least 2 layers, got {stack.n}")
        return problems
    for i, layer in enumerate(stack.layers, start=1):
        d = layer.thickness
        if i in (1, stack.n):
            if d != INF:
                problems.append(f"outer layer {i} must be semi-infinite")
        elif not math.isfinite(d):
            problems.append(f"inner layer {i} must have finite thickness")
        elif d < 0:
            problems.append(f"layer {i} has negative thickness {d!r}")
        elif d == 0:
            problems.append(f"degenerate layer {i} (zero thickness)")
    if not 1 <= stack.atom_layer <= stack.n:
        problems.append(f"atom layer {stack.atom_layer} outside 1..{stack.n}")
    elif not problems:
        d = stack.layer(stack.atom_layer).thickness
        if not (0 <= stack.z_atom <= d) or not math.isfinite(stack.z_atom):
            problems.append(f"atom position {stack.z_atom!r} outside layer {stack.atom_layer}")
    if not stack.cavity_radius > 0:
        problems.append(f"cavity radius must be positive, got {stack.cavity_radius!r}")
    return problems


def validate_stack(stack: LayerStack, omega_max: float = 1.0) -> LayerStack:
    """Check structural invariants and compute the cavity-model applicability flag.

    Raises :class:`StackError` listing every violated invariant.  Otherwise
    returns a copy whose ``applicable`` flag is False (and ``warnings``
    non-empty) when sqrt(eps(0) mu(0)) R_c exceeds ``applicability_fraction``
    times the smaller of the distance to the nearest interface and
    1/omega_max.
    """
    problems = stack_problems(stack)
    if problems:
        raise StackError(problems)
    host = stack.host
    size = math.sqrt(host.eps0 * host.mu0) * stack.cavity_radius
    omega_max = max(omega_max, host.omega_te if host.omega_pe else 0.0,
                    host.omega_tm if host.omega_pm else 0.0)
    lo, hi = stack.interface_distances()
    limit = stack.applicability_fraction * min(lo, hi, 1.0 / omega_max)
    notes = []
    if size > limit:
        notes.append(f"sqrt(eps(0)mu(0))*R_c = {size:.4g} exceeds {limit:.4g}: "
                     "cavity model not applicable")
    return replace(stack, applicable=not notes, warnings=tuple(notes))


def two_layer(lower: MaterialModel, upper: MaterialModel, *, atom_layer: int = 2,
              z_atom: float = 1.0, cavity_radius: float = 0.01) -> LayerStack:
    return validate_stack(LayerStack((Layer(lower), Layer(upper)), atom_layer, z_atom,
                                     cavity_radius))


def warn_if_inapplicable(stack: LayerStack) -> None:
    for note in stack.warnings:
        warnings.warn(note, ApplicabilityWarning, stacklevel=3)

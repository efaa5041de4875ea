"""Position-dependent potential U2, force, total potential and interface estimates.

All energies are in units of U0 = omega_10^3 |d_10|^2 / (12 pi^2 eps0 c^3),
forces in U0 omega_10 / c.  In those units the layer-j potential is

    U2 = 3/2 int dxi alpha mu_j LF(eps_j) int_{n_j xi}^inf du K(xi, u)

with K from :func:`lfvdw.green.kernel`; LF is the leading-order local-field
factor, replaced by 1 in uncorrected mode.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
import numpy as np

from . import green
from .cavity import local_field_factor, u1_approx, u1_exact
from .quadrature import QuadratureSpec, integrate_nested, integrate_semi_infinite
from .units import (AtomModel, Layer, LayerStack, MaterialModel, alpha_at, eps_at, mu_at,
                    validate_stack)

U2_PREFACTOR = 1.5  # 12 pi^2 * hbar mu0 / (8 pi^2) in reduced units

# s = NINHAM_FACTOR * R_c makes the interface terms of the two on-surface
# estimates coincide: s^3 = (16/3) pi^(-1/2) R_c^3, i.e. s ~ 1.444 R_c.
NINHAM_FACTOR = (16.0 / 3.0) ** (1.0 / 3.0) * math.pi ** (-1.0 / 6.0)


@dataclass
class U2Result:
    """Corrected and uncorrected U2 parts (and force) from one nested integration."""

    odd: float
    even: float
    force: float
    odd_uncorrected: float
    even_uncorrected: float
    force_uncorrected: float
    error: dict
    converged: bool
    evaluations: int
    context: dict = field(default_factory=dict)

    @property
    def u2(self) -> float:
        return self.odd + self.even

    @property
    def u2_uncorrected(self) -> float:
        return self.odd_uncorrected + self.even_uncorrected


@dataclass
class PotentialResult:
    """One evaluation of the full potential at a given atom position."""

    u1: float
    u2_odd: float
    u2_even: float
    force: float | None = None
    u1_error: float = 0.0
    u2_error: float = 0.0
    force_error: float = 0.0
    applicable: bool = True
    converged: bool = True
    flags: tuple[str, ...] = ()

    @property
    def u2(self) -> float:
        return self.u2_odd + self.u2_even

    @property
    def total(self) -> float:
        return self.u1 + self.u2


def _frequency_scale(stack: LayerStack, atom: AtomModel) -> float:
    scales = [w for w, _ in atom.transitions]
    for layer in stack.layers:
        m = layer.material
        if m.omega_pe:
            scales.append(m.omega_te)
        if m.omega_pm:
            scales.append(m.omega_tm)
    return max(scales)


def distance_guard(stack: LayerStack) -> str | None:
    """Flag positions closer to an interface than sqrt(eps(0) mu(0)) R_c."""
    host = stack.host
    reach = math.sqrt(host.eps0 * host.mu0) * stack.cavity_radius
    nearest = min(stack.interface_distances())
    if nearest < reach:
        return f"distance {nearest:.4g} to interface is below sqrt(eps(0)mu(0))*R_c = {reach:.4g}"
    return None


def u2_full(stack: LayerStack, atom: AtomModel | None = None, z_A: float | None = None,
            spec: QuadratureSpec | None = None, want_force: bool = True) -> U2Result:
    """U2 parts and force, with and without the local-field factor, in one pass."""
    atom = atom or AtomModel()
    if z_A is not None:
        stack = stack.with_atom(z=z_A)
    spec = spec or QuadratureSpec()
    zero = dict(odd=0.0, even=0.0, force=0.0)
    if all(layer.material == stack.host for layer in stack.layers):
        return U2Result(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, zero, True, 0)

    a, b = stack.interface_distances()
    d = stack.layer(stack.atom_layer).thickness
    nearest = min(a, b)
    if not nearest > 0:
        raise ValueError("the atom sits on an interface; U2 diverges there")
    host = stack.host
    n0 = math.sqrt(host.eps0 * host.mu0)
    outer_scale = min(_frequency_scale(stack, atom), 1.0 / (2.0 * n0 * nearest))
    inner_scale = 1.0 / (2.0 * min(nearest, d))
    nrows = 3 if want_force else 2

    def inner(xi, w):
        return green.kernel(stack, xi, w, want_force=want_force)

    def combine(xi, vals):
        weight = U2_PREFACTOR * alpha_at(atom, xi) * mu_at(host, xi)
        lf = local_field_factor(eps_at(host, xi))
        return np.concatenate([vals * (weight * lf), vals * weight])

    res = integrate_nested(inner, spec_outer=spec, outer_scale=outer_scale,
                           inner_scale=inner_scale, ncomp=nrows, combine=combine,
                           nout=2 * nrows)
    v, e = np.asarray(res.value), np.asarray(res.error_estimate)
    if want_force:
        odd, even, force, odd_u, even_u, force_u = v
        err = dict(odd=e[0], even=e[1], force=e[2], odd_uncorrected=e[3],
                   even_uncorrected=e[4], force_uncorrected=e[5])
    else:
        odd, even, odd_u, even_u = v
        force = force_u = math.nan
        err = dict(odd=e[0], even=e[1], odd_uncorrected=e[2], even_uncorrected=e[3])
    if stack.atom_layer in (1, stack.n):
        # Only one reflecting side: the even-reflection term vanishes identically.
        even = even_u = 0.0
    return U2Result(float(odd), float(even), float(force), float(odd_u), float(even_u),
                    float(force_u), {k: float(x) for k, x in err.items()}, res.converged,
                    res.evaluations, res.context)


def u2_at(stack: LayerStack, atom: AtomModel | None = None, z_A: float | None = None,
          corrected: bool = True, spec: QuadratureSpec | None = None) -> tuple[float, float]:
    """(odd, even) parts of U2 at the atom position, in units of U0."""
    res = u2_full(stack, atom, z_A, spec, want_force=False)
    if corrected:
        return res.odd, res.even
    return res.odd_uncorrected, res.even_uncorrected


def force_at(stack: LayerStack, atom: AtomModel | None = None, z_A: float | None = None,
             corrected: bool = True, spec: QuadratureSpec | None = None) -> float:
    """Force -dU2/dz along the global z axis (positive: towards larger z)."""
    res = u2_full(stack, atom, z_A, spec, want_force=True)
    return res.force if corrected else res.force_uncorrected


def total_at(stack: LayerStack, atom: AtomModel | None = None, z_A: float | None = None,
             spec: QuadratureSpec | None = None, corrected: bool = True,
             include_force: bool = True) -> PotentialResult:
    """U1 + U2 at the atom position with per-component errors and guard flags."""
    atom = atom or AtomModel()
    if z_A is not None:
        stack = stack.with_atom(z=z_A)
    flags = []
    guard = distance_guard(stack)
    if guard:
        flags.append("distance_guard")
    if not stack.applicable:
        flags.append("cavity_model")
    r1 = u1_exact(stack.host, atom, stack.cavity_radius, spec)
    r2 = u2_full(stack, atom, None, spec, want_force=include_force)
    if not (r1.converged and r2.converged):
        flags.append("nonconverged")
    if corrected:
        odd, even, force = r2.odd, r2.even, r2.force
        err2 = r2.error["odd"] + r2.error["even"]
        ferr = r2.error.get("force", 0.0)
    else:
        odd, even, force = r2.odd_uncorrected, r2.even_uncorrected, r2.force_uncorrected
        err2 = r2.error["odd_uncorrected"] + r2.error["even_uncorrected"]
        ferr = r2.error.get("force_uncorrected", 0.0)
    return PotentialResult(
        u1=float(r1.value), u2_odd=odd, u2_even=even,
        force=force if include_force else None,
        u1_error=float(r1.error_estimate), u2_error=err2, force_error=ferr,
        applicable=guard is None and stack.applicable,
        converged=r1.converged and r2.converged, flags=tuple(flags))


# -- on-interface estimates -------------------------------------------------

def _interface_media(stack: LayerStack, interface_index: int):
    if not 1 <= interface_index < stack.n:
        raise ValueError(f"interface index {interface_index} outside 1..{stack.n - 1}")
    return stack.layer(interface_index).material, stack.layer(interface_index + 1).material


def interface_integrand(eps1: MaterialModel, eps2: MaterialModel, atom: AtomModel,
                        cavity_radius: float, local_field: bool = True, part: str = "all"):
    """xi-integrand of the closed-form on-interface estimate (U0 units).

    ``part`` selects 'bulk', 'interface' or 'all' terms.
    """
    r3 = float(cavity_radius) ** 3

    def f(xi):
        e1, e2 = eps_at(eps1, xi), eps_at(eps2, xi)
        bulk = 12.0 * ((e1 - 1.0) / (2.0 * e1 + 1.0) + (e2 - 1.0) / (2.0 * e2 + 1.0))
        lf1 = local_field_factor(e1) if local_field else 1.0
        lf2 = local_field_factor(e2) if local_field else 1.0
        inter = -(e1 - e2) / (e1 + e2) * (lf1 / e1 - lf2 / e2)
        body = {"bulk": bulk, "interface": inter, "all": bulk + inter}[part]
        return -0.375 / r3 * alpha_at(atom, xi) * body
    return f


def interface_value(stack: LayerStack, atom: AtomModel | None = None, interface_index: int = 1,
                    mode: str = "closed_form", spec: QuadratureSpec | None = None,
                    local_field: bool = True, part: str = "all") -> float:
    """Estimate of the potential right on an interface.

    ``closed_form`` integrates the small-radius expression built from the
    leading cavity term and the -C3/z^3 law on both sides.  ``numeric``
    averages the full U1 + U2 at distance R_c on either side (the distance
    guard is deliberately ignored there).
    """
    atom = atom or AtomModel()
    m1, m2 = _interface_media(stack, interface_index)
    if mode == "closed_form":
        if m1.is_vacuum and m2.is_vacuum:
            return 0.0
        res = integrate_semi_infinite(
            interface_integrand(m1, m2, atom, stack.cavity_radius, local_field, part), spec,
            scale=_frequency_scale(stack, atom))
        return float(res.value)
    if mode == "numeric":
        z0 = stack.interfaces()[interface_index - 1]
        r = stack.cavity_radius
        lower = total_at(stack.at_global(z0 - r), atom, spec=spec, corrected=local_field,
                         include_force=False)
        upper = total_at(stack.at_global(z0 + r), atom, spec=spec, corrected=local_field,
                         include_force=False)
        return 0.5 * (lower.total + upper.total)
    raise ValueError(f"unknown mode {mode!r}; expected 'closed_form' or 'numeric'")


def ninham_length(cavity_radius: float) -> float:
    """Molecular size s at which the two interface terms coincide (s ~ 1.44 R_c)."""
    return NINHAM_FACTOR * cavity_radius


def ninham_interface_value(eps1: MaterialModel, eps2: MaterialModel, atom: AtomModel | None,
                           s: float, spec: QuadratureSpec | None = None,
                           part: str = "all") -> float:
    """On-surface potential of a finite-size molecule (U0 units), self-energy included."""
    atom = atom or AtomModel()
    if not s > 0:
        raise ValueError("molecular size s must be positive")
    pref = 6.0 / (math.sqrt(math.pi) * s**3)

    def f(xi):
        e1, e2 = eps_at(eps1, xi), eps_at(eps2, xi)
        bulk = 0.5 * (1.0 / e1 + 1.0 / e2)
        inter = (e1 - e2) / (e1 + e2) * (1.0 / e1 - 1.0 / e2) / 3.0
        body = {"bulk": bulk, "interface": inter, "all": bulk + inter}[part]
        return pref * alpha_at(atom, xi) * body

    scale = max([1.0] + [w for w, _ in atom.transitions])
    return float(integrate_semi_infinite(f, spec, scale=scale).value)


# -- scans -------------------------------------------------------------------

SCAN_AXES = ("z", "omega_pe", "cavity_radius", "thickness")


@dataclass(frozen=True)
class ScanRequest:
    """A one-dimensional scan over a stack template.

    ``axis`` is one of 'z' (global atom position), 'omega_pe' (electric plasma
    frequency of ``target_layer``), 'cavity_radius' or 'thickness' (of
    ``target_layer``).  For non-z axes the atom stays at ``z`` (global).
    """

    stack: LayerStack
    atom: AtomModel = field(default_factory=AtomModel)
    axis: str = "z"
    start: float = 0.01
    stop: float = 1.0
    count: int = 10
    spacing: str = "linear"
    both_sides: bool = False
    values: tuple[float, ...] | None = None
    z: float | None = None
    target_layer: int = 2
    local_field: bool = True
    include_u1: bool = True
    include_force: bool = True
    override_distance_guard: bool = False
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)
    workers: int = 1

    def __post_init__(self):
        if self.axis not in SCAN_AXES:
            raise ValueError(f"unknown scan axis {self.axis!r}; expected one of {SCAN_AXES}")
        if self.values is None:
            if self.count < 2:
                raise ValueError("a scan needs at least 2 grid points")
            if self.spacing not in ("linear", "log"):
                raise ValueError("spacing must be 'linear' or 'log'")
            if self.spacing == "log" and not (self.start > 0 and self.stop > 0):
                raise ValueError("log spacing needs positive bounds")

    def grid(self) -> list[float]:
        """Scan points; z points closer than R_c to an interface are dropped
        unless the distance guard is overridden."""
        if self.values is not None:
            return [float(v) for v in self.values]
        if self.spacing == "log":
            g = np.geomspace(self.start, self.stop, self.count)
        else:
            g = np.linspace(self.start, self.stop, self.count)
        g = [float(v) for v in g]
        if self.both_sides:
            g = [-v for v in reversed(g)] + g
        if self.axis == "z" and not self.override_distance_guard:
            edges = self.stack.interfaces()
            r = self.stack.cavity_radius
            g = [v for v in g if all(abs(v - e) >= r for e in edges)]
        return g


@dataclass
class ScanRow:
    value: float
    u1: float = math.nan
    u1_approx: float = math.nan
    u2_odd: float = math.nan
    u2_even: float = math.nan
    u2_corrected: float = math.nan
    u2_uncorrected: float = math.nan
    delta_u2: float = math.nan
    total: float = math.nan
    force: float = math.nan
    u1_error: float = math.nan
    u2_error: float = math.nan
    force_error: float = math.nan
    flags: tuple[str, ...] = ()


def _configure(request: ScanRequest, value: float) -> tuple[LayerStack, float]:
    stack = request.stack
    if request.axis == "z":
        return stack, value
    z = stack.to_global() if request.z is None else request.z
    if request.axis == "cavity_radius":
        return replace(stack, cavity_radius=value), z
    layers = list(stack.layers)
    target = layers[request.target_layer - 1]
    if request.axis == "omega_pe":
        layers[request.target_layer - 1] = replace(target, material=replace(target.material,
                                                                            omega_pe=value))
    else:
        layers[request.target_layer - 1] = replace(target, thickness=value)
    return replace(stack, layers=tuple(layers)), z


def evaluate_row(request: ScanRequest, value: float) -> ScanRow:
    """Compute one scan row; faults are caught and recorded in ``flags``."""
    row = ScanRow(value)
    try:
        template, z = _configure(request, value)
        stack = validate_stack(template.at_global(z))
        flags = list(stack.warnings and ("cavity_model",))
        guard = distance_guard(stack)
        if guard:
            flags.append("distance_guard")
            if not request.override_distance_guard:
                row.flags = tuple(flags) + ("skipped",)
                return row
        r2 = u2_full(stack, request.atom, None, request.spec, want_force=request.include_force)
        if request.include_u1:
            r1 = u1_exact(stack.host, request.atom, stack.cavity_radius, request.spec)
            row.u1, row.u1_error = float(r1.value), float(r1.error_estimate)
            row.u1_approx = float(u1_approx(stack.host, request.atom, stack.cavity_radius,
                                            request.spec).value)
            if not r1.converged:
                flags.append("nonconverged")
        else:
            row.u1 = row.u1_approx = row.u1_error = 0.0
        if not r2.converged:
            flags.append("nonconverged")
        if request.local_field:
            row.u2_odd, row.u2_even = r2.odd, r2.even
            row.u2_error = r2.error["odd"] + r2.error["even"]
            row.force = r2.force
            row.force_error = r2.error.get("force", math.nan)
        else:
            row.u2_odd, row.u2_even = r2.odd_uncorrected, r2.even_uncorrected
            row.u2_error = r2.error["odd_uncorrected"] + r2.error["even_uncorrected"]
            row.force = r2.force_uncorrected
            row.force_error = r2.error.get("force_uncorrected", math.nan)
        row.u2_corrected = r2.u2
        row.u2_uncorrected = r2.u2_uncorrected
        row.delta_u2 = row.u2_corrected - row.u2_uncorrected
        row.total = row.u1 + row.u2_odd + row.u2_even
        row.flags = tuple(dict.fromkeys(flags))
    except Exception as exc:  # recorded per row, the scan carries on
        row.flags = row.flags + (f"fault:{type(exc).__name__}:{exc}",)
    return row


def _row_task(args):
    request, value = args
    return evaluate_row(request, value)


def run_scan(request: ScanRequest) -> list[ScanRow]:
    """Evaluate every grid point; rows come back in grid order."""
    grid = request.grid()
    if request.workers > 1:
        with ProcessPoolExecutor(max_workers=request.workers) as pool:
            return list(pool.map(_row_task, [(request, v) for v in grid]))
    return [evaluate_row(request, v) for v in grid]


def two_layer_stack(medium1: MaterialModel, medium2: MaterialModel, cavity_radius: float = 0.01,
                    z_global: float = 1.0) -> LayerStack:
    """Two half-spaces with the interface at z = 0 and the atom at global ``z_global``."""
    base = LayerStack((Layer(medium1), Layer(medium2)), 2, 1.0, cavity_radius)
    return base.at_global(z_global)


def three_layer_stack(medium1: MaterialModel, medium2: MaterialModel, medium3: MaterialModel,
                      thickness: float, cavity_radius: float = 0.01,
                      z_global: float | None = None) -> LayerStack:
    z_global = thickness / 2 if z_global is None else z_global
    base = LayerStack((Layer(medium1), Layer(medium2, thickness), Layer(medium3)), 2,
                      thickness / 2, cavity_radius)
    return base.at_global(z_global)


__all__ = [
    "U2Result", "PotentialResult", "ScanRequest", "ScanRow", "u2_full", "u2_at", "force_at",
    "total_at", "interface_value", "interface_integrand", "ninham_interface_value",
    "ninham_length", "run_scan", "evaluate_row", "distance_guard", "two_layer_stack",
    "three_layer_stack", "NINHAM_FACTOR", "SCAN_AXES",
]

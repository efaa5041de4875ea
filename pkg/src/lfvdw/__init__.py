"""Local-field corrected van der Waals potentials of atoms in planar magnetodielectric stacks.

Quantities are in reduced units (hbar = c = eps0 = mu0 = 1, omega_10 = 1);
potentials are reported in units of U0 = omega_10^3 |d_10|^2 / (12 pi^2 eps0 c^3).
"""
__version__ = "0.1.0"

from .asymptotics import (AsymptoticCoefficients, c1_nonretarded, c3_nonretarded,
                          c4_derivative_signs, c4_from_models, c4_retarded, c4_small_contrast,
                          coefficients, microscopic_potentials, sphere_excess_polarizability,
                          sphere_potentials)
from .cavity import c_factor, d_factor, local_field_factor, u1_approx, u1_exact
from .green import recurse_r, series_expansion_oracle, single_interface_r, trace_integrand
from .potential import (PotentialResult, ScanRequest, ScanRow, force_at, interface_value,
                        ninham_interface_value, ninham_length, run_scan, three_layer_stack,
                        total_at, two_layer_stack, u2_at, u2_full)
from .quadrature import QuadratureError, QuadratureResult, QuadratureSpec
from .units import (AtomModel, Layer, LayerStack, MaterialModel, StackError, alpha_at, eps_at,
                    mu_at, validate_stack)

__all__ = [
    "__version__",
    "AsymptoticCoefficients", "c1_nonretarded", "c3_nonretarded", "c4_derivative_signs",
    "c4_from_models", "c4_retarded", "c4_small_contrast", "coefficients",
    "microscopic_potentials", "sphere_excess_polarizability", "sphere_potentials",
    "c_factor", "d_factor", "local_field_factor", "u1_approx", "u1_exact",
    "recurse_r", "series_expansion_oracle", "single_interface_r", "trace_integrand",
    "PotentialResult", "ScanRequest", "ScanRow", "force_at", "interface_value",
    "ninham_interface_value", "ninham_length", "run_scan", "three_layer_stack", "total_at",
    "two_layer_stack", "u2_at", "u2_full",
    "QuadratureError", "QuadratureResult", "QuadratureSpec",
    "AtomModel", "Layer", "LayerStack", "MaterialModel", "StackError", "alpha_at", "eps_at",
    "mu_at", "validate_stack",
]

"""Concrete predator/prey systems and their reference formulas."""

from .fermion import (
    FermiPP,
    fermi_density,
    fermi_density_matrix,
    fermi_hamiltonian,
    fermi_matrices,
    fermi_mode_propagator,
    fermi_phases,
    number_state,
)
from .gated import (
    RiccatiData,
    gated_exact_mean_x1,
    probe_states,
    riccati_data,
    riccati_exact_mean_T1,
    riccati_r,
    riccati_residual,
    riccati_residual_report,
    riccati_S,
    riccati_T1,
    riccati_v,
)
from .presets import (
    CubicPP3,
    DegenerateFrequencyError,
    GatedPP,
    QuadraticPP,
    amplitude_delta,
    build_hamiltonian,
    cubic_mean_reference,
    envelope_V,
    gated_perturbative_x1,
    quadratic_mean_reference,
)
from .registry import PRESETS, PresetInfo, lookup_preset

__all__ = [
    "FermiPP", "fermi_density", "fermi_density_matrix", "fermi_hamiltonian", "fermi_matrices",
    "fermi_mode_propagator", "fermi_phases", "number_state",
    "RiccatiData", "gated_exact_mean_x1", "probe_states", "riccati_data", "riccati_exact_mean_T1",
    "riccati_r", "riccati_residual", "riccati_residual_report", "riccati_S", "riccati_T1", "riccati_v",
    "CubicPP3", "DegenerateFrequencyError", "GatedPP", "QuadraticPP", "amplitude_delta",
    "build_hamiltonian", "cubic_mean_reference", "envelope_V", "gated_perturbative_x1",
    "quadratic_mean_reference",
    "PRESETS", "PresetInfo", "lookup_preset",
]

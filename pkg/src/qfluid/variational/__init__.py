"""Reduced (Gaussian-ansatz) models of electrons in harmonic and anharmonic wells."""
from __future__ import annotations

from .chaos import (
    DEGENERATE_AMPLITUDE,
    LYAPUNOV_OFFSET,
    LyapunovResult,
    PoincareSet,
    coverage,
    lyapunov_max,
    poincare_section,
)
from .coefficients import (
    BETA_GRADIENT,
    AlphaCoefficients,
    QuadratureError,
    analytic_alpha,
    default_alpha,
    derive_alpha_coefficients,
)
from .well1d import (
    IntegrationError,
    State1D,
    Trajectory1D,
    Well1DParams,
    breathing_frequency,
    equilibrium_sigma,
    integrate_1d,
    potential_1d,
    width_force,
)
from .well3d import (
    ENERGY_DRIFT_BOUND,
    EnergyDriftWarning,
    State3D,
    Trajectory3D,
    Well3DParams,
    default_dt,
    equilibrium_widths,
    excitation_state,
    integrate_3d,
    normal_frequencies,
    potential_3d,
)

__all__ = [
    "DEGENERATE_AMPLITUDE",
    "LYAPUNOV_OFFSET",
    "LyapunovResult",
    "PoincareSet",
    "coverage",
    "lyapunov_max",
    "poincare_section",
    "BETA_GRADIENT",
    "AlphaCoefficients",
    "QuadratureError",
    "analytic_alpha",
    "default_alpha",
    "derive_alpha_coefficients",
    "IntegrationError",
    "State1D",
    "Trajectory1D",
    "Well1DParams",
    "breathing_frequency",
    "equilibrium_sigma",
    "integrate_1d",
    "potential_1d",
    "width_force",
    "ENERGY_DRIFT_BOUND",
    "EnergyDriftWarning",
    "State3D",
    "Trajectory3D",
    "Well3DParams",
    "default_dt",
    "equilibrium_widths",
    "excitation_state",
    "integrate_3d",
    "normal_frequencies",
    "potential_3d",
]

"""Nonlinear quantum-hydrodynamic solver in 1D Cartesian and spherical-radial geometry."""
from .observables import mean_position, mean_radius, particle_number, rms_width, thomas_fermi_residual
from .poisson import PoissonError, gauss_field, poisson_residual, solve_poisson
from .solver import (
    DynamicsResult,
    FluidState,
    NumericalInstabilityError,
    Perturbation,
    QHDSolver,
    RelaxationError,
    RelaxationResult,
    SolverConfig,
    default_dt,
    flow_residual,
    displace,
    effective_force,
    ground_state_profiles,
    kick,
    potential_gauge,
    relax_ground_state,
    run_dynamics,
    stability_limit,
    step,
    velocity_gradient_kick,
    wave_potential,
)
from .systems import FluidSystem, HarmonicWell, JelliumShell, JelliumSlab, build_jellium

__all__ = [
    "DynamicsResult",
    "FluidState",
    "FluidSystem",
    "HarmonicWell",
    "JelliumShell",
    "JelliumSlab",
    "NumericalInstabilityError",
    "Perturbation",
    "PoissonError",
    "QHDSolver",
    "RelaxationError",
    "RelaxationResult",
    "SolverConfig",
    "build_jellium",
    "default_dt",
    "displace",
    "effective_force",
    "flow_residual",
    "gauss_field",
    "ground_state_profiles",
    "kick",
    "potential_gauge",
    "mean_position",
    "mean_radius",
    "particle_number",
    "poisson_residual",
    "relax_ground_state",
    "rms_width",
    "run_dynamics",
    "solve_poisson",
    "stability_limit",
    "step",
    "thomas_fermi_residual",
    "velocity_gradient_kick",
    "wave_potential",
]

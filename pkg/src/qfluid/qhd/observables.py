"""Scalar observables and diagnostics of fluid states."""
from __future__ import annotations

import numpy as np
from scipy.integrate import trapezoid

from ..closures import ClosureParams, PolytropicEOS, v_xc
from ..grid import Grid
from .poisson import solve_poisson

__all__ = [
    "particle_number",
    "mean_radius",
    "mean_position",
    "rms_width",
    "thomas_fermi_residual",
]


def particle_number(n, grid: Grid) -> float:
    """Finite-volume electron count; conserved exactly by the flux-form scheme."""
    return grid.integrate(np.asarray(n, dtype=float))


def mean_radius(n, grid: Grid) -> float:
    """<r> = int r n 4 pi r^2 dr / int n 4 pi r^2 dr by the trapezoidal rule."""
    if not grid.is_spherical:
        raise ValueError("mean_radius needs a spherical grid")
    r = grid.x
    w = r * r * np.asarray(n, dtype=float)
    return float(trapezoid(r * w, r) / trapezoid(w, r))


def mean_position(n, grid: Grid) -> float:
    x = grid.x
    n = np.asarray(n, dtype=float)
    return float(trapezoid(x * n, x) / trapezoid(n, x))


def rms_width(n, grid: Grid) -> float:
    """Standard deviation of the density profile."""
    x = grid.x
    n = np.asarray(n, dtype=float)
    norm = trapezoid(n, x)
    mean = trapezoid(x * n, x) / norm
    return float(np.sqrt(trapezoid((x - mean) ** 2 * n, x) / norm))


def thomas_fermi_residual(state, system, pressure: PolytropicEOS | None = None,
                          closure: ClosureParams | None = None, region: float = 0.1):
    """Defect of the Thomas-Fermi balance phi - w(n) - V_xc(n) - V_ext = mu.

    ``mu`` is the least-squares constant over the nodes where n exceeds
    ``region`` times the maximum density.  The Bohm potential is left out on
    purpose, so the residual measures its local importance.  Returns
    ``(residual, mu)``.
    """
    grid = system.grid
    n = np.asarray(state.n, dtype=float)
    eos = pressure if pressure is not None else PolytropicEOS.fermi(1.0)
    xc = closure.xc if closure is not None else "none"
    phi = solve_poisson(n - system.background, grid, system.kappa)
    with np.errstate(divide="ignore"):
        balance = phi - np.asarray(eos.enthalpy(n)) - np.asarray(v_xc(n, xc)) - system.v_ext
    sel = n > region * n.max()
    mu = float(np.mean(balance[sel]))
    return balance - mu, mu


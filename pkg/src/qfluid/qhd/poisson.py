"""Poisson solvers for lap(phi) = kappa * s on uniform 1D grids.

Two independent routes are provided.  :func:`gauss_field` integrates the
source cumulatively (Gauss's law) to get the face field directly; this is what
the time stepper uses.  :func:`solve_poisson` assembles the conservative
three-point operator and solves the banded system for the node potential.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import solve_banded

from ..grid import Grid

__all__ = ["PoissonError", "gauss_field", "solve_poisson", "poisson_residual"]


class PoissonError(RuntimeError):
    pass


def gauss_field(source, grid: Grid, kappa: float, offset: float = 0.0) -> np.ndarray:
    """Face values of d(phi)/dx from the enclosed source.

    ``offset`` subtracts that fraction of the total source from the enclosed
    amount; 0.5 gives the free-space field of a 1D distribution.
    """
    s = np.asarray(source, dtype=float)
    q = np.cumsum(grid.volumes * s)
    return kappa * (q[:-1] - offset * q[-1]) / grid.face_areas


def _boundary_values(s, grid: Grid, kappa: float):
    if grid.is_spherical:
        q = grid.integrate(s)
        return None, -kappa * q / (4.0 * math.pi * grid.x_max)
    w = grid.volumes * s
    left = 0.5 * kappa * float(np.dot(w, np.abs(grid.x - grid.x_min)))
    right = 0.5 * kappa * float(np.dot(w, np.abs(grid.x - grid.x_max)))
    return left, right


def _operator_bands(grid: Grid):
    """Banded form of the flux-form Laplacian (rows scaled by volume)."""
    m = grid.n_points
    c = grid.face_areas / grid.spacing
    ab = np.zeros((3, m))
    ab[0, 1:] = c
    ab[2, :-1] = c
    diag = np.zeros(m)
    diag[:-1] -= c
    diag[1:] -= c
    ab[1] = diag
    return ab


def solve_poisson(source, grid: Grid, kappa: float = 4.0 * math.pi, tol: float = 1e-10) -> np.ndarray:
    """Node potential phi with lap(phi) = kappa * source.

    Spherical grids use a regular centre and phi(r_max) = -kappa Q / (4 pi r_max),
    the monopole tail of the enclosed source Q; for a neutral system this is
    phi = 0.  Cartesian grids take both end values from the free-space Green's
    function (kappa / 2) |x - x'|.
    """
    s = np.asarray(source, dtype=float)
    if s.shape != (grid.n_points,):
        raise ValueError("source must live on the grid nodes")
    ab = _operator_bands(grid)
    rhs = kappa * s * grid.volumes
    left, right = _boundary_values(s, grid, kappa)
    m = grid.n_points
    # Dirichlet rows
    ab[1, -1], ab[2, -2] = 1.0, 0.0
    rhs[-1] = right
    if left is not None:
        ab[1, 0], ab[0, 1] = 1.0, 0.0
        rhs[0] = left
    try:
        phi = solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:
        raise PoissonError(f"singular Poisson system on {m} points: {exc}") from exc
    res = poisson_residual(phi, s, grid, kappa)
    scale = float(np.sum(np.abs(kappa * s * grid.volumes)))
    if np.any(s) and not res <= tol * scale:
        raise PoissonError(f"Poisson residual {res:.3e} exceeds {tol:g} of the source norm {scale:.3e}")
    return phi


def poisson_residual(phi, source, grid: Grid, kappa: float) -> float:
    """Max abs defect of the volume-integrated equation on the non-Dirichlet rows."""
    lap = grid.laplacian(np.asarray(phi, dtype=float))
    defect = (lap - kappa * np.asarray(source, dtype=float)) * grid.volumes
    start = 0 if grid.is_spherical else 1
    return float(np.max(np.abs(defect[start:-1])))

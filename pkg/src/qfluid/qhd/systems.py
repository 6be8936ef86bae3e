"""Physical systems for the fluid solver: jellium nanoshells, slabs and harmonic wells.

Each system knows how to lay itself onto a :class:`~qfluid.grid.Grid`, giving a
:class:`FluidSystem` that bundles the neutralising background, the external
potential and the electrostatic coupling used by the solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ..closures import ClosureParams, PolytropicEOS
from ..grid import Grid

__all__ = [
    "FluidSystem",
    "JelliumShell",
    "JelliumSlab",
    "HarmonicWell",
    "build_jellium",
    "FOUR_PI",
]

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True, eq=False)
class FluidSystem:
    """A system discretised on a grid.

    The electrostatic potential phi obeys lap(phi) = kappa (n - background) and
    pushes electrons with force +grad(phi).  ``field_offset`` fixes the
    boundary condition of the field: 0 for a vanishing field at the left end
    (spherical centre), 0.5 for the free-space 1D Green's function.
    """

    grid: Grid
    background: np.ndarray
    v_ext: np.ndarray
    kappa: float
    field_offset: float
    n_electrons: float
    reference_density: float
    natural_frequency: float
    initial_density: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        m = self.grid.n_points
        if self.background.shape != (m,) or self.v_ext.shape != (m,):
            raise ValueError("background and v_ext must live on the grid nodes")
        if np.any(self.background < 0):
            raise ValueError("background density must be non-negative")
        if not self.n_electrons > 0:
            raise ValueError("the system must hold electrons")
        if self.grid.is_spherical and self.field_offset != 0.0:
            raise ValueError("spherical systems need a zero field at the centre")
        if not (self.reference_density > 0 and self.natural_frequency > 0):
            raise ValueError("reference_density and natural_frequency must be positive")


def _overlap_fraction(grid: Grid, a: float, b: float) -> np.ndarray:
    """Fraction of each node control volume lying inside [a, b]."""
    edges = np.concatenate(([grid.x_min], grid.faces, [grid.x_max]))
    lo = np.clip(edges[:-1], a, b)
    hi = np.clip(edges[1:], a, b)
    if grid.is_spherical:
        inside = (4.0 * math.pi / 3.0) * (hi**3 - lo**3)
    else:
        inside = hi - lo
    return inside / grid.volumes


def _logistic_profile(x, a, b, width):
    """Plateau on [a, b] with exponential (Fermi-function) edges.

    Exponential tails keep lap(sqrt n) / sqrt n bounded, unlike Gaussian ones.
    """
    return expit((x - a) / width) * expit((b - x) / width)


@dataclass(frozen=True)
class JelliumShell:
    """Uniform positive background of density ``n0`` between ``R_i`` and ``R_e``."""

    R_i: float
    R_e: float
    n0: float

    def __post_init__(self):
        if not 0.0 <= self.R_i < self.R_e:
            raise ValueError("need 0 <= R_i < R_e")
        if not self.n0 > 0:
            raise ValueError("n0 must be positive")

    @property
    def R(self) -> float:
        return 0.5 * (self.R_i + self.R_e)

    @property
    def Delta(self) -> float:
        return self.R_e - self.R_i

    @property
    def r_s(self) -> float:
        return (3.0 / (4.0 * math.pi * self.n0)) ** (1.0 / 3.0)

    @property
    def N(self) -> float:
        return (self.R_e**3 - self.R_i**3) / self.r_s**3

    def default_grid(self, n_points: int = 2000, margin: float = 30.0) -> Grid:
        return Grid.spherical(self.R_e + margin, n_points)

    def background(self, grid: Grid) -> np.ndarray:
        """Cell-averaged jellium density; it integrates to ``N`` exactly when the shell fits."""
        if not grid.is_spherical:
            raise ValueError("a nanoshell needs a spherical grid")
        return self.n0 * _overlap_fraction(grid, self.R_i, self.R_e)

    def system(self, grid: Grid) -> FluidSystem:
        if grid.x_max <= self.R_e:
            raise ValueError("grid must extend beyond the outer radius")
        bg = self.background(grid)
        return FluidSystem(
            grid, bg, np.zeros(grid.n_points), FOUR_PI, 0.0, grid.integrate(bg),
            self.n0, math.sqrt(FOUR_PI * self.n0), self.initial_density(grid), "nanoshell",
        )

    def initial_density(self, grid: Grid, width: float = 1.0) -> np.ndarray:
        """Smoothed step profile used to seed the ground-state relaxation."""
        if self.R_i == 0.0:
            return self.n0 * expit((self.R_e - grid.x) / width)
        return self.n0 * _logistic_profile(grid.x, self.R_i, self.R_e, width)


def build_jellium(R: float, Delta: float, r_s: float) -> JelliumShell:
    """Shell of mean radius ``R`` and thickness ``Delta`` for a metal of radius ``r_s``."""
    if not Delta > 0:
        raise ValueError("Delta must be positive")
    if not R > 0.5 * Delta:
        raise ValueError(f"shell geometry invalid: need R > Delta/2, got R={R}, Delta={Delta}")
    if not r_s > 0:
        raise ValueError("r_s must be positive")
    return JelliumShell(R - 0.5 * Delta, R + 0.5 * Delta, 3.0 / (4.0 * math.pi * r_s**3))


@dataclass(frozen=True)
class JelliumSlab:
    """Planar jellium slab between ``x_left`` and ``x_right`` in atomic units."""

    x_left: float
    x_right: float
    n0: float

    def __post_init__(self):
        if not (self.x_right > self.x_left and self.n0 > 0):
            raise ValueError("need x_right > x_left and n0 > 0")

    def background(self, grid: Grid) -> np.ndarray:
        if grid.is_spherical:
            raise ValueError("a slab needs a Cartesian grid")
        return self.n0 * _overlap_fraction(grid, self.x_left, self.x_right)

    def system(self, grid: Grid) -> FluidSystem:
        bg = self.background(grid)
        initial = self.n0 * _logistic_profile(grid.x, self.x_left, self.x_right, 1.0)
        return FluidSystem(
            grid, bg, np.zeros(grid.n_points), FOUR_PI, 0.5, grid.integrate(bg),
            self.n0, math.sqrt(FOUR_PI * self.n0), initial, "slab",
        )


@dataclass(frozen=True)
class HarmonicWell:
    """Electron gas in a 1D harmonic trap, in units where the trap frequency scales to one.

    Lengths are measured in units of the trap length and densities relative to
    the jellium density n0 that would give plasma frequency ``omega0``.  The
    gas has ``N = A sqrt(2 pi)`` electrons, a 1D Fermi pressure n^3 / n_bar^2
    and a Bohm term with prefactor ``H**2``; the Hartree field obeys
    phi'' = n.
    """

    omega0: float = 1.0
    A: float = 1.0
    H: float = 0.5
    n_bar: float = 1.0

    def __post_init__(self):
        if not (self.omega0 > 0 and self.H > 0 and self.n_bar > 0 and self.A > 0):
            raise ValueError("omega0, A, H and n_bar must be positive")

    @property
    def N(self) -> float:
        return self.A * math.sqrt(2.0 * math.pi)

    def closure(self) -> ClosureParams:
        return ClosureParams(gamma=3.0, zeta=self.H**2, xc="none")

    def pressure(self) -> PolytropicEOS:
        return PolytropicEOS(gamma=3.0, n_ref=self.n_bar, P_ref=self.n_bar)

    def default_grid(self, n_points: int = 801, half_width: float | None = None) -> Grid:
        if half_width is None:
            half_width = 8.0 + 1.5 * self.A
        return Grid.cartesian(-half_width, half_width, n_points)

    def system(self, grid: Grid) -> FluidSystem:
        if grid.is_spherical:
            raise ValueError("the harmonic well is one-dimensional")
        v_ext = 0.5 * self.omega0**2 * grid.x**2
        sigma = self.width_guess
        return FluidSystem(
            grid, np.zeros(grid.n_points), v_ext, 1.0, 0.5, self.N,
            self.A / sigma, self.omega0, self.gaussian_density(grid, sigma), "harmonic_well",
        )

    @property
    def width_guess(self) -> float:
        """Rough equilibrium width: the larger of the Bohm and Coulomb balances."""
        return max(math.sqrt(0.5 * self.H), math.sqrt(0.5) * self.A, 0.5)

    def gaussian_density(self, grid: Grid, sigma: float, d: float = 0.0) -> np.ndarray:
        """Gaussian profile (A / sigma) exp(-(x - d)^2 / 2 sigma^2)."""
        return self.A / sigma * np.exp(-((grid.x - d) ** 2) / (2.0 * sigma**2))

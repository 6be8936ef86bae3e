"""Uniform 1D grids (Cartesian or spherical-radial) and their finite-volume geometry.

Nodes carry scalar fields (density, potentials).  Faces sit halfway between
nodes and carry fluxes and the velocity.  The node control volumes and face
areas make the divergence and Laplacian operators conservative in both
geometries; the outermost faces are closed walls.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import trapezoid

__all__ = ["Grid", "CARTESIAN", "SPHERICAL", "MIN_POINTS"]

CARTESIAN = "cartesian1d"
SPHERICAL = "spherical_radial"
MIN_POINTS = 16


@dataclass(frozen=True)
class Grid:
    geometry: str
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.geometry not in (CARTESIAN, SPHERICAL):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        if int(self.n_points) != self.n_points or self.n_points < MIN_POINTS:
            raise ValueError(f"n_points must be an integer >= {MIN_POINTS}, got {self.n_points!r}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.geometry == SPHERICAL and self.x_min != 0.0:
            raise ValueError("spherical grids start at r = 0")

    @classmethod
    def spherical(cls, r_max: float, n_points: int) -> Grid:
        return cls(SPHERICAL, 0.0, float(r_max), int(n_points))

    @classmethod
    def cartesian(cls, x_min: float, x_max: float, n_points: int) -> Grid:
        return cls(CARTESIAN, float(x_min), float(x_max), int(n_points))

    @property
    def is_spherical(self) -> bool:
        return self.geometry == SPHERICAL

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.n_points)

    @cached_property
    def faces(self) -> np.ndarray:
        return 0.5 * (self.x[1:] + self.x[:-1])

    @cached_property
    def face_areas(self) -> np.ndarray:
        if self.is_spherical:
            return 4.0 * math.pi * self.faces**2
        return np.ones(self.n_points - 1)

    @cached_property
    def volumes(self) -> np.ndarray:
        """Node control volumes; they sum to the full domain volume."""
        edges = np.concatenate(([self.x_min], self.faces, [self.x_max]))
        if self.is_spherical:
            return (4.0 * math.pi / 3.0) * np.diff(edges**3)
        return np.diff(edges)

    def integrate(self, f: np.ndarray) -> float:
        """Finite-volume integral of a node field over the domain."""
        return float(np.dot(self.volumes, f))

    def trapezoid(self, f: np.ndarray) -> float:
        """Trapezoidal integral including the spherical 4 pi r^2 measure."""
        if self.is_spherical:
            f = 4.0 * math.pi * self.x**2 * f
        return float(trapezoid(f, dx=self.spacing))

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        """Conservative three-point Laplacian with zero-flux outer walls.

        In spherical geometry the node at r = 0 reduces to the regularised
        form 6 (f_1 - f_0) / h^2, i.e. 3 d^2f/dr^2.
        """
        flux = self.face_areas * np.diff(f) / self.spacing
        div = np.empty_like(f, dtype=float)
        div[0] = flux[0]
        div[1:-1] = flux[1:] - flux[:-1]
        div[-1] = -flux[-1]
        return div / self.volumes

    def gradient(self, f: np.ndarray) -> np.ndarray:
        """Centred node gradient, second order including the end points."""
        return np.gradient(f, self.spacing, edge_order=2)

    def face_gradient(self, f: np.ndarray) -> np.ndarray:
        return np.diff(f) / self.spacing

"""Pressure, quantum-potential and exchange-correlation closures (atomic units)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid

__all__ = [
    "FERMI_PRESSURE_COEFF",
    "EXCHANGE_COEFF",
    "BREY_GAMMA",
    "BREY_DELTA",
    "XC_MODELS",
    "PolytropicEOS",
    "ClosureParams",
    "SpinDensityPair",
    "pressure_fermi",
    "fermi_enthalpy",
    "pressure_polytropic",
    "bohm_potential",
    "quantum_pressure_iso",
    "v_exchange_lda",
    "v_correlation_brey",
    "v_xc",
    "spin_pressure_mep",
]

FERMI_PRESSURE_COEFF = (3.0 * math.pi**2) ** (2.0 / 3.0) / 5.0
EXCHANGE_COEFF = (3.0 / math.pi) ** (1.0 / 3.0)
BREY_GAMMA = 0.03349
BREY_DELTA = 18.376
XC_MODELS = ("none", "lda_exchange", "lda_exchange_plus_brey")


def _density(n, name="n"):
    n = np.asarray(n, dtype=float)
    if np.any(n < 0) or np.any(np.isnan(n)):
        raise ValueError(f"{name} must be non-negative")
    return n


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class PolytropicEOS:
    """P = P_ref (n / n_ref)**gamma."""

    gamma: float
    n_ref: float
    P_ref: float

    def __post_init__(self):
        if not (self.gamma > 0 and self.n_ref > 0 and self.P_ref >= 0):
            raise ValueError("PolytropicEOS needs gamma > 0, n_ref > 0, P_ref >= 0")

    @classmethod
    def isothermal(cls, n_ref: float, T: float, gamma: float = 1.0) -> PolytropicEOS:
        """Reference state of an ideal gas, P_ref = n_ref k_B T."""
        return cls(gamma=gamma, n_ref=n_ref, P_ref=n_ref * T)

    @classmethod
    def fermi(cls, n_ref: float) -> PolytropicEOS:
        return cls(gamma=5.0 / 3.0, n_ref=n_ref, P_ref=pressure_fermi(n_ref))

    def pressure(self, n):
        return pressure_polytropic(n, self)

    def enthalpy(self, n):
        """Specific enthalpy w(n) with dw/dn = (dP/dn) / n."""
        n = _density(n)
        if self.gamma == 1.0:
            with np.errstate(divide="ignore"):
                return _scalar_or_array(self.P_ref / self.n_ref * np.log(n / self.n_ref))
        coeff = self.P_ref * self.gamma / ((self.gamma - 1.0) * self.n_ref**self.gamma)
        return _scalar_or_array(coeff * n ** (self.gamma - 1.0))


@dataclass(frozen=True)
class ClosureParams:
    gamma: float = 5.0 / 3.0
    zeta: float = 1.0
    xc: str = "none"

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if not self.zeta >= 0:
            raise ValueError(f"zeta must be non-negative, got {self.zeta!r}")
        if self.xc not in XC_MODELS:
            raise ValueError(f"xc must be one of {XC_MODELS}, got {self.xc!r}")


@dataclass(frozen=True)
class SpinDensityPair:
    """Density n and spin-polarisation magnitude |S| (hbar = 1)."""

    n: float
    S_mag: float

    def __post_init__(self):
        if self.n < 0 or self.S_mag < 0:
            raise ValueError("n and |S| must be non-negative")
        if 2.0 * self.S_mag > self.n * (1.0 + 1e-14):
            raise ValueError("unphysical polarisation: 2|S| exceeds n")

    @property
    def polarization(self) -> float:
        return 2.0 * self.S_mag / self.n if self.n > 0 else 0.0


def pressure_fermi(n):
    """Zero-temperature degeneracy pressure (3 pi^2)^(2/3) n^(5/3) / 5."""
    n = _density(n)
    return _scalar_or_array(FERMI_PRESSURE_COEFF * n ** (5.0 / 3.0))


def fermi_enthalpy(n):
    """Local Fermi energy (3 pi^2 n)^(2/3) / 2, the enthalpy of the Fermi pressure."""
    n = _density(n)
    return _scalar_or_array(0.5 * (3.0 * math.pi**2 * n) ** (2.0 / 3.0))


def pressure_polytropic(n, eos: PolytropicEOS):
    n = _density(n)
    return _scalar_or_array(eos.P_ref * (n / eos.n_ref) ** eos.gamma)


def _sqrt_density(n, grid: Grid, floor):
    n = np.asarray(n, dtype=float)
    if n.shape != (grid.n_points,):
        raise ValueError(f"density has shape {n.shape}, grid expects ({grid.n_points},)")
    if floor is None:
        if not np.all(n > 0):
            raise ValueError("density must be strictly positive for the Bohm term")
    elif not (floor > 0 and np.all(n >= floor)):
        raise ValueError(f"density falls below the floor {floor!r}")
    return np.sqrt(n)


def bohm_potential(n, grid: Grid, zeta: float = 1.0, floor: float | None = None) -> np.ndarray:
    """Bohm potential -zeta/2 * lap(sqrt n) / sqrt n on ``grid``.

    sqrt(n) is formed first and the three-point Laplacian applied to it, so a
    homogeneous density gives exactly zero.
    """
    psi = _sqrt_density(n, grid, floor)
    return -0.5 * zeta * grid.laplacian(psi) / psi


def quantum_pressure_iso(n, grid: Grid, floor: float | None = None) -> np.ndarray:
    """Isotropic quantum pressure ((grad sqrt n)^2 - sqrt n lap sqrt n) / 2.

    Its gradient equals n grad V_B (zeta = 1) exactly in one dimension; in
    spherical geometry the two differ by the anisotropic part of the tensor.
    """
    psi = _sqrt_density(n, grid, floor)
    return 0.5 * (grid.gradient(psi) ** 2 - psi * grid.laplacian(psi))


def v_exchange_lda(n):
    """LDA exchange potential -(3/pi)^(1/3) n^(1/3)."""
    n = _density(n)
    return _scalar_or_array(-EXCHANGE_COEFF * np.cbrt(n))


def v_correlation_brey(n):
    """Brey correlation potential -0.03349 ln(1 + 18.376 n^(1/3))."""
    n = _density(n)
    return _scalar_or_array(-BREY_GAMMA * np.log1p(BREY_DELTA * np.cbrt(n)))


def v_xc(n, model: str):
    """Exchange-correlation potential for one of :data:`XC_MODELS`."""
    if model == "none":
        return _scalar_or_array(np.zeros_like(_density(n)))
    if model == "lda_exchange":
        return v_exchange_lda(n)
    if model == "lda_exchange_plus_brey":
        return _scalar_or_array(np.asarray(v_exchange_lda(n)) + v_correlation_brey(n))
    raise ValueError(f"unknown xc model {model!r}")


def spin_pressure_mep(pair: SpinDensityPair) -> float:
    """Maximum-entropy pressure of a spin-polarised degenerate gas.

    Sum of the degeneracy pressures of the two spin populations n -/+ 2|S|.
    """
    n, s2 = pair.n, 2.0 * pair.S_mag
    coeff = (6.0 * math.pi**2) ** (2.0 / 3.0) / (5.0 * 2.0 ** (5.0 / 3.0))
    return coeff * (max(n - s2, 0.0) ** (5.0 / 3.0) + (n + s2) ** (5.0 / 3.0))

"""Hartree atomic units, material parameters and derived equilibrium quantities.

Everything inside the package is expressed in Hartree atomic units
(hbar = m_e = e = 4 pi eps0 = 1).  Conversions to laboratory units happen only
at the I/O boundary through :data:`UNITS`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import physical_constants

__all__ = [
    "UnitConversion",
    "UNITS",
    "SPEED_OF_LIGHT",
    "BOHR_MAGNETON",
    "VACUUM_PERMEABILITY",
    "MaterialSpec",
    "DerivedQuantities",
    "plasma_frequency",
    "derive_quantities",
    "SODIUM",
]


@dataclass(frozen=True)
class UnitConversion:
    """Multiplicative factors from atomic units to laboratory units.

    ``effective_mass`` and ``dielectric`` rescale the atomic units into
    effective atomic units (energy unit m*/eps^2 hartree, length unit
    eps/m* bohr) for semiconductor work; both default to vacuum values.
    """

    hartree_to_eV: float = physical_constants["Hartree energy in eV"][0]
    bohr_to_nm: float = physical_constants["Bohr radius"][0] * 1e9
    au_time_to_fs: float = physical_constants["atomic unit of time"][0] * 1e15
    effective_mass: float = 1.0
    dielectric: float = 1.0

    def __post_init__(self):
        if self.effective_mass <= 0 or self.dielectric <= 0:
            raise ValueError("effective_mass and dielectric must be positive")

    @property
    def energy_to_eV(self) -> float:
        return self.hartree_to_eV * self.effective_mass / self.dielectric**2

    @property
    def length_to_nm(self) -> float:
        return self.bohr_to_nm * self.dielectric / self.effective_mass

    @property
    def time_to_fs(self) -> float:
        return self.au_time_to_fs * self.dielectric**2 / self.effective_mass

    def to_eV(self, energy):
        return energy * self.energy_to_eV

    def from_eV(self, energy_eV):
        return energy_eV / self.energy_to_eV

    def to_nm(self, length):
        return length * self.length_to_nm

    def from_nm(self, length_nm):
        return length_nm / self.length_to_nm

    def to_fs(self, time):
        return time * self.time_to_fs

    def from_fs(self, time_fs):
        return time_fs / self.time_to_fs


UNITS = UnitConversion()

# Electromagnetic constants expressed in atomic units.
SPEED_OF_LIGHT = 1.0 / physical_constants["fine-structure constant"][0]
BOHR_MAGNETON = 0.5
VACUUM_PERMEABILITY = 4.0 * math.pi / SPEED_OF_LIGHT**2


@dataclass(frozen=True)
class MaterialSpec:
    """A jellium metal characterised by its Wigner-Seitz radius (bohr)."""

    r_s: float
    label: str = ""

    def __post_init__(self):
        if not self.r_s > 0:
            raise ValueError(f"r_s must be positive, got {self.r_s!r}")


SODIUM = MaterialSpec(r_s=4.0, label="Na")


def plasma_frequency(r_s: float) -> float:
    """Bulk plasma frequency sqrt(3 / r_s^3) in hartree.

    Multiply by ``UNITS.hartree_to_eV`` for electron-volts.
    """
    if not r_s > 0:
        raise ValueError(f"r_s must be positive, got {r_s!r}")
    if math.isinf(r_s):
        return 0.0
    return math.sqrt(3.0 / r_s**3)


@dataclass(frozen=True)
class DerivedQuantities:
    """Equilibrium quantities of a homogeneous electron gas at density ``n0``.

    ``lambda_D`` and ``H`` need a finite temperature; reading them at
    ``T_e == 0`` raises :class:`ValueError`.
    """

    n0: float
    omega_p: float
    E_F: float
    T_F: float
    lambda_TF: float
    T_e: float = 0.0

    @property
    def omega_p_eV(self) -> float:
        return UNITS.to_eV(self.omega_p)

    @property
    def v_th(self) -> float:
        return math.sqrt(self.T_e)

    @property
    def lambda_D(self) -> float:
        if self.T_e <= 0:
            raise ValueError("Debye length is undefined at zero temperature")
        return self.v_th / self.omega_p

    @property
    def H(self) -> float:
        if self.T_e <= 0:
            raise ValueError("quantum parameter H is undefined at zero temperature")
        return self.omega_p / self.T_e


def derive_quantities(spec: MaterialSpec, T_e: float = 0.0) -> DerivedQuantities:
    """Compute n0, omega_p, E_F, T_F and lambda_TF from r_s; ``T_e`` in hartree."""
    if T_e < 0:
        raise ValueError(f"T_e must be non-negative, got {T_e!r}")
    r_s = spec.r_s
    n0 = 3.0 / (4.0 * math.pi * r_s**3)
    E_F = 0.5 * (3.0 * math.pi**2 * n0) ** (2.0 / 3.0)
    return DerivedQuantities(
        n0=n0,
        omega_p=plasma_frequency(r_s),
        E_F=E_F,
        T_F=E_F,
        lambda_TF=math.sqrt(2.0 * E_F / (4.0 * math.pi * n0)),
        T_e=float(T_e),
    )

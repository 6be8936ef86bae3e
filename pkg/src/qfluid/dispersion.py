"""Linear dispersion relations of the kinetic and fluid models, and closure matching.

All frequencies are returned squared, in atomic units (hbar = m = 1).  The
kinetic forms are the real long-wavelength expansions only; no Landau damping.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .units import BOHR_MAGNETON, VACUUM_PERMEABILITY

__all__ = [
    "ModelValidityError",
    "ValidityWarning",
    "FitConditioningError",
    "LangmuirParams",
    "AcousticParams",
    "SpinDispersionParams",
    "mean_square_velocity",
    "omega2_langmuir_fluid",
    "omega2_langmuir_kinetic",
    "kinetic_validity",
    "omega2_acoustic_kinetic",
    "omega2_acoustic_fluid",
    "omega2_spin",
    "EvenTaylorFit",
    "fit_even_taylor",
    "ClosureMatch",
    "match_closure",
    "LANGMUIR_VALIDITY_LIMIT",
]

LANGMUIR_VALIDITY_LIMIT = 0.3


class ModelValidityError(ValueError):
    """Parameters outside the domain where a dispersion law is meaningful."""


class ValidityWarning(UserWarning):
    """A long-wavelength expansion is being evaluated beyond its range."""


class FitConditioningError(RuntimeError):
    pass


def _wavenumber(k):
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise ValueError("wavenumber must be non-negative")
    return k


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class LangmuirParams:
    omega_p: float
    v2_mean: float
    gamma: float = 3.0
    zeta: float = 1.0

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("omega_p must be positive")
        if not self.v2_mean >= 0:
            raise ValueError("v2_mean must be non-negative")


def mean_square_velocity(distribution: str, *, T: float = 0.0, E_F: float = 0.0) -> float:
    """Equilibrium <v_x^2> for a Maxwellian at temperature ``T`` or a T=0 Fermi gas.

    The degenerate value is v_F^2 / 5 = 2 E_F / 5.
    """
    if distribution == "maxwell":
        return float(T)
    if distribution == "fermi":
        return 0.4 * E_F
    raise ValueError(f"unknown distribution {distribution!r}")


def omega2_langmuir_fluid(k, p: LangmuirParams):
    k = _wavenumber(k)
    k2 = k * k
    return _out(p.omega_p**2 + p.gamma * k2 * p.v2_mean + 0.25 * p.zeta * k2 * k2)


def kinetic_validity(k, p: LangmuirParams):
    """True where k sqrt(<v^2>) / omega stays below the expansion limit."""
    k = _wavenumber(k)
    k2 = k * k
    omega = np.sqrt(p.omega_p**2 + 3.0 * k2 * p.v2_mean + 0.25 * k2 * k2)
    return _out(k * math.sqrt(p.v2_mean) / omega <= LANGMUIR_VALIDITY_LIMIT)


def omega2_langmuir_kinetic(k, p: LangmuirParams):
    """Quantum Bohm-Gross law omega_p^2 + 3 k^2 <v^2> + k^4 / 4.

    Emits :class:`ValidityWarning` where the long-wavelength expansion fails.
    """
    k = _wavenumber(k)
    if not np.all(kinetic_validity(k, p)):
        warnings.warn(
            f"k sqrt(<v^2>)/omega exceeds {LANGMUIR_VALIDITY_LIMIT}; expansion unreliable",
            ValidityWarning,
            stacklevel=2,
        )
    k2 = k * k
    return _out(p.omega_p**2 + 3.0 * k2 * p.v2_mean + 0.25 * k2 * k2)


@dataclass(frozen=True)
class AcousticParams:
    """Ion-acoustic parameters.

    ``c_s_kinetic`` is sqrt(k_B T_e / m_i) = lambda_D omega_pi and is derived
    when omitted; the fluid sound speed carries the extra sqrt(gamma).
    """

    lambda_D: float
    omega_pi: float
    H: float
    gamma: float = 1.0
    zeta: float = 1.0 / 3.0
    c_s_kinetic: float | None = None

    def __post_init__(self):
        if not (self.lambda_D > 0 and self.omega_pi > 0 and self.gamma > 0):
            raise ValueError("lambda_D, omega_pi and gamma must be positive")
        if self.H < 0 or self.zeta < 0:
            raise ValueError("H and zeta must be non-negative")
        c_s = self.lambda_D * self.omega_pi
        if self.c_s_kinetic is None:
            object.__setattr__(self, "c_s_kinetic", c_s)
        elif abs(self.c_s_kinetic - c_s) > 1e-12 * c_s:
            raise ValueError("c_s_kinetic must equal lambda_D * omega_pi")

    @property
    def c_s_fluid(self) -> float:
        return math.sqrt(self.gamma) * self.c_s_kinetic


def omega2_acoustic_kinetic(k, p: AcousticParams):
    k = _wavenumber(k)
    k2 = k * k
    denom = 1.0 + (1.0 - p.H**2 / 12.0) * k2 * p.lambda_D**2
    if np.any(denom <= 0):
        raise ModelValidityError("acoustic kinetic law out of validity: 1 + (1 - H^2/12) k^2 lambda_D^2 <= 0")
    return _out(p.c_s_kinetic**2 * k2 / denom)


def omega2_acoustic_fluid(k, p: AcousticParams):
    """Fluid ion-acoustic law with polytropic electrons and a zeta-weighted Bohm term.

    The quartic term in the denominator is dimensionless
    (zeta H^2/4 k^4 lambda_D^4), so omega^2 saturates at omega_pi^2 for large k.
    """
    k = _wavenumber(k)
    k2 = k * k
    lam2 = p.lambda_D**2
    quantum = 0.25 * p.zeta * p.H**2 * k2 * k2 * lam2 * lam2
    num = p.c_s_fluid**2 * k2 + quantum * p.omega_pi**2
    return _out(num / (1.0 + p.gamma * k2 * lam2 + quantum))


@dataclass(frozen=True)
class SpinDispersionParams:
    """Spin-polarised Langmuir parameters in atomic units.

    The xc derivatives are taken with respect to n and the magnetisation
    m_z = 2 S_z; B_xc is a magnetic field, so mu_B * B_xc is an energy.
    The magnetostatic term uses mu_B = 1/2 and mu_0 = 4 pi / c^2.
    """

    omega_p: float
    T_e: float
    n0: float
    gamma: float = 3.0
    eta0: float = 0.0
    dVxc_dn: float = 0.0
    dVxc_dmz: float = 0.0
    dBxc_dn: float = 0.0
    dBxc_dmz: float = 0.0
    include_magnetostatic: bool = True

    def __post_init__(self):
        if not 0.0 <= self.eta0 <= 1.0:
            raise ValueError("eta0 must lie in [0, 1]")
        if self.omega_p <= 0 or self.n0 <= 0 or self.T_e < 0:
            raise ValueError("omega_p, n0 must be positive and T_e non-negative")


def omega2_spin(k, p: SpinDispersionParams):
    k = _wavenumber(k)
    k2 = k * k
    eta, mu_B = p.eta0, BOHR_MAGNETON
    xc = p.dVxc_dn + eta * p.dVxc_dmz + eta * mu_B * p.dBxc_dn + eta**2 * mu_B * p.dBxc_dmz
    w2 = p.omega_p**2 + p.gamma * k2 * p.T_e + k2 * p.n0 * xc
    if p.include_magnetostatic:
        w2 = w2 - k2 * mu_B**2 * VACUUM_PERMEABILITY * p.n0 * eta**2
    return _out(w2)


@dataclass(frozen=True)
class EvenTaylorFit:
    """Least-squares coefficients of f(k) = sum_j c_j k^(2j) on a small-k stencil."""

    coefficients: np.ndarray
    residual: float
    condition: float
    k_max: float


def fit_even_taylor(
    func, k_max: float, n_terms: int, n_stencil: int | None = None, max_condition: float = 1e10
) -> EvenTaylorFit:
    """Extract the even Taylor coefficients of ``func`` by fitting on (0, k_max].

    The stencil is Chebyshev-distributed in x = (k / k_max)^2 and the fit is
    performed in x, which keeps the Vandermonde matrix well conditioned.
    ``residual`` is the max abs misfit on the stencil.
    """
    if k_max <= 0 or n_terms < 1:
        raise ValueError("k_max must be positive and n_terms >= 1")
    m = n_stencil or 4 * n_terms
    j = np.arange(m)
    x = 0.5 * (1.0 - np.cos(np.pi * (j + 0.5) / m))
    k = k_max * np.sqrt(x)
    V = np.vander(x, n_terms, increasing=True)
    cond = float(np.linalg.cond(V))
    if not cond < max_condition:
        raise FitConditioningError(
            f"Taylor fit ill-conditioned: cond={cond:.3e} (limit {max_condition:.1e}), "
            f"n_terms={n_terms}, n_stencil={m}"
        )
    f = np.asarray(func(k), dtype=float)
    c, *_ = np.linalg.lstsq(V, f, rcond=None)
    residual = float(np.max(np.abs(V @ c - f)))
    coefficients = c / k_max ** (2.0 * np.arange(n_terms))
    return EvenTaylorFit(coefficients, residual, cond, k_max)


@dataclass(frozen=True)
class ClosureMatch:
    """Kinetic vs fluid Taylor coefficients for one regime.

    ``orders`` lists the powers of k.  Langmuir coefficients are those of
    omega^2; acoustic ones are those of omega^2 / (c_s^2 k^2), each model
    normalised by its own sound speed.
    """

    regime: str
    gamma: float
    zeta: float
    orders: tuple[int, ...]
    kinetic: np.ndarray
    fluid: np.ndarray
    residual_kinetic: float
    residual_fluid: float
    condition: float
    parameters: dict = field(default_factory=dict)

    @property
    def difference(self) -> np.ndarray:
        return self.fluid - self.kinetic

    @property
    def relative_difference(self) -> np.ndarray:
        scale = np.maximum(np.abs(self.kinetic), np.abs(self.fluid))
        return np.abs(self.difference) / np.where(scale > 0, scale, 1.0)

    def coefficient(self, order: int, model: str = "kinetic") -> float:
        return float(getattr(self, model)[self.orders.index(order)])


def match_closure(
    regime: str,
    gamma: float,
    zeta: float,
    *,
    omega_p: float = 1.0,
    v2_mean: float = 1.0,
    H: float = 0.0,
    lambda_D: float = 1.0,
    omega_pi: float = 1.0,
) -> ClosureMatch:
    """Compare kinetic and fluid dispersion laws through their small-k coefficients."""
    if regime == "langmuir":
        p_fluid = LangmuirParams(omega_p, v2_mean, gamma, zeta)
        p_kin = LangmuirParams(omega_p, v2_mean)
        k_max = 0.1 * omega_p / math.sqrt(max(v2_mean, omega_p))
        fk = fit_even_taylor(lambda k: omega2_langmuir_kinetic(k, p_kin), k_max, 3, 16)
        ff = fit_even_taylor(lambda k: omega2_langmuir_fluid(k, p_fluid), k_max, 3, 16)
        orders = (0, 2, 4)
        kin, flu = fk.coefficients, ff.coefficients
        params = {"omega_p": omega_p, "v2_mean": v2_mean}
    elif regime == "acoustic":
        p = AcousticParams(lambda_D, omega_pi, H, gamma, zeta)
        k_max = 0.2 / lambda_D

        def ratio(law, c_s):
            return lambda k: law(k, p) / (c_s**2 * k**2)

        n_terms = 7
        fk = fit_even_taylor(ratio(omega2_acoustic_kinetic, p.c_s_kinetic), k_max, n_terms, 40)
        ff = fit_even_taylor(ratio(omega2_acoustic_fluid, p.c_s_fluid), k_max, n_terms, 40)
        orders = (0, 2)
        kin, flu = fk.coefficients[:2], ff.coefficients[:2]
        params = {"H": H, "lambda_D": lambda_D, "omega_pi": omega_pi}
    else:
        raise ValueError(f"regime must be 'langmuir' or 'acoustic', got {regime!r}")
    return ClosureMatch(
        regime=regime,
        gamma=gamma,
        zeta=zeta,
        orders=orders,
        kinetic=np.asarray(kin),
        fluid=np.asarray(flu),
        residual_kinetic=fk.residual,
        residual_fluid=ff.residual,
        condition=max(fk.condition, ff.condition),
        parameters=params,
    )

"""Dimensionless coefficients of the 3D Gaussian-ansatz width potential.

For the density n = N (2 pi)^(-3/2) / (sx sy sz) exp(-sum x_i^2 / 2 s_i^2) each
energy per electron factors into a pure number times a power of N and of the
widths:

    Hartree      alpha1 * N (sx sy sz)^(1/3) * sum 1/s_i^2
    gradient     alpha2 * beta * (sx sy sz / N)^(1/3) * sum 1/s_i^2
    Fermi        alpha3 * (N / sx sy sz)^(2/3)
    exchange     alpha4 * (N / sx sy sz)^(1/3)
    Bohm         (1/8) * sum 1/s_i^2

The coefficients are obtained by adaptive quadrature of the energy densities
and dividing out these factors.  The correlation-type term is taken as the
spin-resolved gradient correction beta * sum_spin |grad n_s|^2 / n_s^(4/3)
with beta = 0.0042; this fixes the convention for beta (see ``convention``).
The Hartree factorisation is exact for isotropic widths only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from ..closures import EXCHANGE_COEFF, FERMI_PRESSURE_COEFF

__all__ = [
    "BETA_GRADIENT",
    "QuadratureError",
    "AlphaCoefficients",
    "analytic_alpha",
    "derive_alpha_coefficients",
    "default_alpha",
]

BETA_GRADIENT = 0.0042
BETA_CONVENTION = (
    "beta multiplies the spin-resolved gradient correction "
    "sum_s beta |grad n_s|^2 / n_s^(4/3), n_s = n/2; beta = 0.0042"
)


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class AlphaCoefficients:
    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    beta: float
    bohm: float
    errors: dict = field(default_factory=dict)
    convention: str = BETA_CONVENTION


def analytic_alpha() -> dict:
    """Closed-form Gaussian integrals of the same coefficients."""
    two_pi = 2.0 * math.pi
    return {
        "alpha1": 1.0 / (6.0 * math.sqrt(math.pi)),
        "alpha2": 2.0 ** (1.0 / 3.0) * math.sqrt(two_pi) * 1.5**2.5,
        "alpha3": 1.5 * FERMI_PRESSURE_COEFF * 0.6**1.5 / two_pi,
        "alpha4": 0.75 * EXCHANGE_COEFF * 0.75**1.5 / math.sqrt(two_pi),
        "bohm": 0.125,
    }


def _quad(f, a, b, epsrel):
    val, err, info = quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=400, full_output=True)[:3]
    if not np.isfinite(val) or err > 100.0 * epsrel * abs(val) + 1e-300:
        raise QuadratureError(f"quadrature did not converge: value {val!r}, error estimate {err!r}")
    return val, err


def _gauss_moment(s: float, p: float, m: int, epsrel: float):
    """int x^m exp(-p x^2 / (2 s^2)) dx over the real line."""
    val, err = _quad(lambda x: x**m * math.exp(-p * x * x / (2.0 * s * s)), -math.inf, math.inf, epsrel)
    return val, err


def _product_integral(sigma, p, weights, epsrel):
    """int exp(-p sum x_i^2/2s_i^2) * sum_i w_i x_i^2 d^3r, with weights w_i (zero weights skip the moment)."""
    zeroth = [_gauss_moment(s, p, 0, epsrel) for s in sigma]
    if weights is None:
        val = math.prod(z[0] for z in zeroth)
        rel = sum(z[1] / z[0] for z in zeroth)
        return val, rel
    total, rel = 0.0, 0.0
    for i, s in enumerate(sigma):
        second = _gauss_moment(s, p, 2, epsrel)
        term = weights[i] * second[0] * math.prod(zeroth[j][0] for j in range(3) if j != i)
        total += term
        rel = max(rel, second[1] / second[0] + sum(zeroth[j][1] / zeroth[j][0] for j in range(3) if j != i))
    return total, rel


def derive_alpha_coefficients(sigma=(1.0, 1.0, 1.0), n_electrons: float = 1.0,
                              epsrel: float = 1e-13) -> AlphaCoefficients:
    """Evaluate each term on the Gaussian ansatz and factor out its (N, sigma) dependence.

    Returns the coefficients with relative quadrature error estimates in
    ``errors``.  Raises :class:`QuadratureError` when an integral does not
    reach the requested accuracy.
    """
    s = np.asarray(sigma, dtype=float)
    if s.shape != (3,) or np.any(~(s > 0)):
        raise ValueError("sigma must be three positive widths")
    N = float(n_electrons)
    if not N > 0:
        raise ValueError("n_electrons must be positive")
    P = float(np.prod(s))
    inv2 = float(np.sum(1.0 / s**2))
    c = N * (2.0 * math.pi) ** -1.5 / P  # peak density
    errors = {}

    # Fermi: (3/10)(3 pi^2)^(2/3) int n^(5/3)
    v, e = _product_integral(s, 5.0 / 3.0, None, epsrel)
    alpha3 = 1.5 * FERMI_PRESSURE_COEFF * c ** (5.0 / 3.0) * v / N / (N / P) ** (2.0 / 3.0)
    errors["alpha3"] = e

    # LDA exchange: (3/4)(3/pi)^(1/3) int n^(4/3)
    v, e = _product_integral(s, 4.0 / 3.0, None, epsrel)
    alpha4 = 0.75 * EXCHANGE_COEFF * c ** (4.0 / 3.0) * v / N / (N / P) ** (1.0 / 3.0)
    errors["alpha4"] = e

    # |grad n|^2 = n^2 sum x_i^2 / s_i^4
    w = 1.0 / s**4
    # gradient correction: 2 * (1/4)|grad n|^2 / (n/2)^(4/3) = 2^(1/3) n^(2/3) sum x_i^2/s_i^4
    v, e = _product_integral(s, 2.0 / 3.0, w, epsrel)
    alpha2 = 2.0 ** (1.0 / 3.0) * c ** (2.0 / 3.0) * v / N / ((P / N) ** (1.0 / 3.0) * inv2)
    errors["alpha2"] = e

    # von Weizsaecker: (1/8) int |grad n|^2 / n
    v, e = _product_integral(s, 1.0, w, epsrel)
    bohm = 0.125 * c * v / N / inv2
    errors["bohm"] = e

    # Hartree per electron: (N / sqrt(pi)) int_0^inf prod_i (1 + 4 s_i^2 t^2)^(-1/2) dt
    v, e = _quad(lambda t: 1.0 / math.sqrt(math.prod(1.0 + 4.0 * si * si * t * t for si in s)),
                 0.0, math.inf, epsrel)
    alpha1 = N / math.sqrt(math.pi) * v / (N * P ** (1.0 / 3.0) * inv2)
    errors["alpha1"] = e / v
    return AlphaCoefficients(alpha1, alpha2, alpha3, alpha4, BETA_GRADIENT, bohm, errors)


@lru_cache(maxsize=1)
def default_alpha() -> AlphaCoefficients:
    """Coefficients on the isotropic unit Gaussian, computed once per process."""
    return derive_alpha_coefficients()

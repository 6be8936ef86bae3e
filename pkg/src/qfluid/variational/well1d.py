"""Gaussian-ansatz reduction of the 1D harmonic well (scaled units).

Lengths are in units of the thermal length, time in units of 1/omega0 and
density in units of n0.  The Lagrangian of the dipole ``d`` and the width
``sigma`` is L = (d'^2 + sigma'^2)/2 - d^2/2 - U(sigma) with

    U(sigma) = sigma^2/2 - (sqrt2/2) A sigma + sqrt3 A^2 / (6 nbar^2 sigma^2) + H^2 / (8 sigma^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "IntegrationError",
    "Well1DParams",
    "State1D",
    "Trajectory1D",
    "potential_1d",
    "width_force",
    "equilibrium_sigma",
    "breathing_frequency",
    "integrate_1d",
]

_SQRT2_2 = math.sqrt(2.0) / 2.0
_SQRT3 = math.sqrt(3.0)


class IntegrationError(RuntimeError):
    """A reduced-model trajectory left the physical domain (a width reached zero)."""

    def __init__(self, message: str, t: float, state):
        super().__init__(f"{message} at t = {t:.6g}")
        self.t = t
        self.state = state


@dataclass(frozen=True)
class Well1DParams:
    """A = N / sqrt(2 pi) (scaled), H the scaled Planck constant, n_bar the EOS reference density."""

    A: float
    H: float
    n_bar: float = 1.0

    def __post_init__(self):
        if not self.A >= 0:
            raise ValueError(f"A must be non-negative, got {self.A!r}")
        if not self.H > 0:
            raise ValueError(f"H must be positive, got {self.H!r}")
        if not self.n_bar > 0:
            raise ValueError(f"n_bar must be positive, got {self.n_bar!r}")

    @property
    def N(self) -> float:
        return self.A * math.sqrt(2.0 * math.pi)

    @property
    def pressure_coeff(self) -> float:
        return _SQRT3 * self.A**2 / self.n_bar**2


@dataclass(frozen=True)
class State1D:
    d: float
    sigma: float
    d_dot: float = 0.0
    sigma_dot: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")


@dataclass(frozen=True, eq=False)
class Trajectory1D:
    t: np.ndarray
    d: np.ndarray
    sigma: np.ndarray
    d_dot: np.ndarray
    sigma_dot: np.ndarray
    params: Well1DParams


def potential_1d(sigma, p: Well1DParams):
    """Width potential U(sigma); raises for sigma <= 0."""
    s = np.asarray(sigma, dtype=float)
    if np.any(~(s > 0)):
        raise ValueError("sigma must be positive")
    u = 0.5 * s**2 - _SQRT2_2 * p.A * s + (p.pressure_coeff / 6.0 + p.H**2 / 8.0) / s**2
    return float(u) if u.ndim == 0 else u


def width_force(sigma: float, p: Well1DParams) -> float:
    """-dU/dsigma, the right-hand side of the width equation."""
    return -sigma + _SQRT2_2 * p.A + (p.pressure_coeff / 3.0 + p.H**2 / 4.0) / sigma**3


def equilibrium_sigma(p: Well1DParams) -> float:
    """Unique positive root of dU/dsigma = 0.

    The force is strictly decreasing in sigma, so the root is bracketed by
    expanding an interval around the Coulomb and quantum estimates.
    """
    c = p.pressure_coeff / 3.0 + p.H**2 / 4.0
    guess = max(_SQRT2_2 * p.A, c**0.25, 1e-3)
    lo, hi = guess, guess
    for _ in range(200):
        if width_force(lo, p) > 0:
            break
        lo *= 0.5
    for _ in range(200):
        if width_force(hi, p) < 0:
            break
        hi *= 2.0
    if not (width_force(lo, p) > 0 > width_force(hi, p)):
        raise RuntimeError(f"could not bracket the equilibrium width for {p}")
    return brentq(width_force, lo, hi, args=(p,), xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=500)


def breathing_frequency(p: Well1DParams) -> float:
    """Omega = sqrt(U''(sigma*)), the linearised width oscillation frequency."""
    s = equilibrium_sigma(p)
    return math.sqrt(1.0 + (p.pressure_coeff + 0.75 * p.H**2) / s**4)


def integrate_1d(initial: State1D, p: Well1DParams, t_end: float, dt: float,
                 sample_every: int = 1) -> Trajectory1D:
    """Classical RK4 for d'' = -d and sigma'' = width_force(sigma).

    The two equations are advanced side by side but do not share any term, so
    the dipole solution is independent of the width.
    """
    if not (dt > 0 and t_end >= 0):
        raise ValueError("need dt > 0 and t_end >= 0")
    nsteps = int(round(t_end / dt))
    n_out = nsteps // sample_every + 1
    out = np.empty((n_out, 4))
    y = np.array([initial.d, initial.sigma, initial.d_dot, initial.sigma_dot], dtype=float)

    def f(v):
        return np.array([v[2], v[3], -v[0], width_force(v[1], p)])

    out[0] = y
    j = 1
    for i in range(1, nsteps + 1):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not y[1] > 0:
            raise IntegrationError("width collapsed", i * dt, y.copy())
        if i % sample_every == 0:
            out[j] = y
            j += 1
    t = dt * sample_every * np.arange(n_out)
    return Trajectory1D(t, out[:, 0], out[:, 1], out[:, 2], out[:, 3], p)

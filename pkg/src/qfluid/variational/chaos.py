"""Poincare sections, an area-coverage measure and the largest Lyapunov exponent."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .well3d import Trajectory3D, Well3DParams, _as_vector, _deriv, default_dt, equilibrium_widths

__all__ = [
    "DEGENERATE_AMPLITUDE",
    "LYAPUNOV_OFFSET",
    "PoincareSet",
    "LyapunovResult",
    "poincare_section",
    "coverage",
    "lyapunov_max",
]

DEGENERATE_AMPLITUDE = 1e-8
# fixed initial separation: equal components along all 12 coordinates, norm 1e-8
LYAPUNOV_OFFSET = np.full(12, 1e-8 / math.sqrt(12.0))


@dataclass(frozen=True, eq=False)
class PoincareSet:
    points: np.ndarray  # (m, 2): (d_x, d_y) at the crossings
    times: np.ndarray
    surface: str
    warnings: tuple = ()

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class LyapunovResult:
    exponent: float
    times: np.ndarray
    trace: np.ndarray  # running estimate after each renormalisation
    interval: float
    dt: float


def _hermite(s, p0, p1, m0, m1, h):
    s2, s3 = s * s, s * s * s
    return ((2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * h * m0
            + (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * h * m1)


def _crossing(f0, f1, m0, m1, h) -> float:
    """Root in [0, 1] of the cubic Hermite interpolant of f; linear fallback."""
    c3 = 2 * f0 - 2 * f1 + h * m0 + h * m1
    c2 = -3 * f0 + 3 * f1 - 2 * h * m0 - h * m1
    c1 = h * m0
    roots = np.roots([c3, c2, c1, f0]) if abs(c3) > 0 else np.roots([c2, c1, f0])
    real = [r.real for r in roots if abs(r.imag) < 1e-9 and -1e-12 <= r.real <= 1 + 1e-12]
    if real:
        return min(max(min(real), 0.0), 1.0)
    return f0 / (f0 - f1)


def poincare_section(traj: Trajectory3D, surface: str = "auto", sigma_z_eq: float | None = None) -> PoincareSet:
    """Record (d_x, d_y) where the orbit crosses the section surface upwards.

    ``surface``: ``"d_z"`` (d_z = 0, d_z' > 0), ``"sigma_z"`` (sigma_z =
    sigma_z,eq, sigma_z' > 0) or ``"auto"``, which uses d_z unless the d_z
    amplitude stays below 1e-8 and falls back to sigma_z.  Crossings are
    located by cubic Hermite interpolation between samples.
    """
    y = traj.y
    if surface == "auto":
        surface = "d_z" if np.max(np.abs(y[:, 2])) >= DEGENERATE_AMPLITUDE else "sigma_z"
    if surface == "d_z":
        f, fdot = y[:, 2], y[:, 8]
    elif surface == "sigma_z":
        if sigma_z_eq is None:
            sigma_z_eq = float(equilibrium_widths(traj.params)[2])
        f, fdot = y[:, 5] - sigma_z_eq, y[:, 11]
    else:
        raise ValueError(f"unknown surface {surface!r}")
    idx = np.nonzero((f[:-1] < 0) & (f[1:] >= 0))[0]
    h = traj.t[1] - traj.t[0] if traj.t.size > 1 else 0.0
    pts = np.empty((idx.size, 2))
    times = np.empty(idx.size)
    for m, j in enumerate(idx):
        s = _crossing(f[j], f[j + 1], fdot[j], fdot[j + 1], h)
        for c in range(2):
            pts[m, c] = _hermite(s, y[j, c], y[j + 1, c], y[j, 6 + c], y[j + 1, 6 + c], h)
        times[m] = traj.t[j] + s * h
    notes = ()
    if idx.size == 0:
        notes = (f"no crossings of the {surface} surface",)
        warnings.warn(notes[0], RuntimeWarning, stacklevel=2)
    return PoincareSet(pts, times, surface, notes)


def coverage(points, bins: int | None = None) -> float:
    """Fraction of occupied cells in a bins x bins grid over the bounding box.

    The default ``bins = max(4, floor(sqrt(m / 2)))`` for m points gives an
    area-filling set about two points per cell, while a closed curve only
    occupies of order ``bins`` cells, so regular sections score low and
    ergodic ones high.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a non-empty (m, 2) array")
    if bins is None:
        bins = max(4, int(math.sqrt(pts.shape[0] / 2.0)))
    lo, hi = pts.min(0), pts.max(0)
    span = np.where(hi > lo, hi - lo, 1.0)
    cells = np.minimum(((pts - lo) / span * bins).astype(int), bins - 1)
    occupied = np.unique(cells[:, 0] * bins + cells[:, 1]).size
    return occupied / bins**2


@njit(cache=True)
def _benettin(y1, offset, q, dt, steps, n_intervals):
    y2 = y1 + offset
    d0 = math.sqrt(np.sum(offset * offset))
    grad = np.empty(6)
    k = np.empty((4, 12))
    tmp = np.empty(12)
    logs = np.empty(n_intervals)
    for m in range(n_intervals):
        for y in (y1, y2):
            for _ in range(steps):
                _deriv(y, q, grad, k[0])
                for i in range(12):
                    tmp[i] = y[i] + 0.5 * dt * k[0, i]
                _deriv(tmp, q, grad, k[1])
                for i in range(12):
                    tmp[i] = y[i] + 0.5 * dt * k[1, i]
                _deriv(tmp, q, grad, k[2])
                for i in range(12):
                    tmp[i] = y[i] + dt * k[2, i]
                _deriv(tmp, q, grad, k[3])
                for i in range(12):
                    y[i] += dt / 6.0 * (k[0, i] + 2.0 * k[1, i] + 2.0 * k[2, i] + k[3, i])
        if not (y1[3] > 0 and y1[4] > 0 and y1[5] > 0 and y2[3] > 0 and y2[4] > 0 and y2[5] > 0):
            return logs[:m], False
        sep = y2 - y1
        d = math.sqrt(np.sum(sep * sep))
        logs[m] = math.log(d / d0)
        for i in range(12):
            y2[i] = y1[i] + sep[i] * (d0 / d)
    return logs, True


def lyapunov_max(p: Well3DParams, initial, t_end: float, interval: float = 1.0,
                 dt: float | None = None) -> LyapunovResult:
    """Two-trajectory (Benettin) estimate of the largest Lyapunov exponent.

    The companion orbit starts at ``initial + LYAPUNOV_OFFSET`` and is pulled
    back to the reference separation every ``interval`` time units.  The
    default step is a quarter of :func:`default_dt`.
    """
    if not (t_end > 0 and interval > 0):
        raise ValueError("t_end and interval must be positive")
    dt = default_dt(p) / 4.0 if dt is None else float(dt)
    steps = max(1, int(round(interval / dt)))
    dt = interval / steps
    n_int = int(t_end / interval)
    if n_int < 1:
        raise ValueError("t_end must cover at least one renormalisation interval")
    y1 = _as_vector(initial)
    logs, ok = _benettin(y1, LYAPUNOV_OFFSET.copy(), p.packed(), dt, steps, n_int)
    if not ok:
        from .well1d import IntegrationError

        raise IntegrationError("a width collapsed to zero", logs.size * interval, y1.copy())
    times = interval * np.arange(1, n_int + 1)
    trace = np.cumsum(logs) / times
    return LyapunovResult(float(trace[-1]), times, trace, interval, dt)

"""Spectra of sampled time series and peak extraction."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks as _scipy_find_peaks

from .units import UNITS

__all__ = [
    "MIN_SAMPLES",
    "WINDOWS",
    "TimeSeries",
    "Spectrum",
    "Peak",
    "spectrum",
    "find_peaks",
    "signal_energy",
    "spectral_energy",
]

MIN_SAMPLES = 64
WINDOWS = ("none", "hann")


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled signal starting at ``t0`` with spacing ``dt_sample``."""

    t0: float
    dt_sample: float
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if not self.dt_sample > 0:
            raise ValueError("dt_sample must be positive")
        if not np.all(np.isfinite(v)):
            raise ValueError("time series contains non-finite samples")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_samples(cls, times, values, label: str = "", rtol: float = 1e-9) -> TimeSeries:
        """Build from explicit sample times, checking that they are uniform."""
        times = np.asarray(times, dtype=float)
        if times.size < 2:
            raise ValueError("need at least two samples")
        steps = np.diff(times)
        dt = float(np.mean(steps))
        if np.max(np.abs(steps - dt)) > rtol * max(abs(dt), 1.0) * 10:
            raise ValueError("samples are not uniformly spaced")
        return cls(float(times[0]), dt, np.asarray(values, dtype=float), label)

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt_sample * np.arange(self.values.size)

    @property
    def duration(self) -> float:
        return self.values.size * self.dt_sample


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Magnitude of the discrete Fourier transform on angular frequencies ``omega`` (a.u.)."""

    omega: np.ndarray
    amplitude: np.ndarray
    window: str
    n_samples: int
    dt_sample: float

    @property
    def omega_eV(self) -> np.ndarray:
        return UNITS.to_eV(self.omega)

    @property
    def resolution(self) -> float:
        return 2.0 * math.pi / (self.n_samples * self.dt_sample)

    @property
    def resolution_eV(self) -> float:
        return UNITS.to_eV(self.resolution)


@dataclass(frozen=True)
class Peak:
    frequency: float
    amplitude: float
    prominence: float

    def __post_init__(self):
        if not self.prominence > 0:
            raise ValueError("peak prominence must be positive")

    @property
    def frequency_eV(self) -> float:
        return UNITS.to_eV(self.frequency)


def _window(name: str, n: int) -> np.ndarray:
    if name == "none":
        return np.ones(n)
    if name == "hann":
        return np.hanning(n)
    raise ValueError(f"window must be one of {WINDOWS}, got {name!r}")


def _prepared(series: TimeSeries, window: str) -> np.ndarray:
    if len(series) < MIN_SAMPLES:
        raise ValueError(f"spectrum needs at least {MIN_SAMPLES} samples, got {len(series)}")
    v = series.values
    # an exactly constant record has no oscillating part; avoid mean round-off
    x = np.zeros_like(v) if np.ptp(v) == 0 else v - np.mean(v)
    return x * _window(window, x.size)


def spectrum(series: TimeSeries, window: str = "hann") -> Spectrum:
    """De-mean, window and transform; the bin spacing is 2 pi / (N dt)."""
    x = _prepared(series, window)
    amp = np.abs(np.fft.rfft(x))
    omega = 2.0 * math.pi * np.fft.rfftfreq(x.size, series.dt_sample)
    return Spectrum(omega, amp, window, x.size, series.dt_sample)


def signal_energy(series: TimeSeries, window: str = "hann") -> float:
    """Sum of squares of the de-meaned, windowed samples."""
    x = _prepared(series, window)
    return float(np.dot(x, x))


def spectral_energy(spec: Spectrum) -> float:
    """Parseval sum over the one-sided spectrum; equals :func:`signal_energy`."""
    p = spec.amplitude**2
    weights = np.full(p.size, 2.0)
    weights[0] = 1.0
    if spec.n_samples % 2 == 0:
        weights[-1] = 1.0
    return float(np.dot(weights, p) / spec.n_samples)


def _refine(amp: np.ndarray, k: int) -> tuple[float, float]:
    """Vertex of the parabola through bins k-1, k, k+1 (on log amplitude when possible)."""
    if k == 0 or k == amp.size - 1:
        return 0.0, float(amp[k])
    y = amp[k - 1 : k + 2]
    use_log = np.all(y > 0)
    if use_log:
        y = np.log(y)
    denom = y[0] - 2.0 * y[1] + y[2]
    if denom >= 0:
        return 0.0, float(amp[k])
    delta = 0.5 * (y[0] - y[2]) / denom
    top = y[1] - 0.25 * (y[0] - y[2]) * delta
    return float(delta), float(np.exp(top) if use_log else top)


def find_peaks(spec: Spectrum, min_prominence: float = 0.05, relative: bool = True) -> list[Peak]:
    """Local maxima with at least ``min_prominence``, strongest first.

    With ``relative`` the threshold is a fraction of the largest amplitude.
    Frequencies are refined by three-bin quadratic interpolation.
    """
    amp = spec.amplitude
    if amp.size < 3 or not np.any(amp > 0):
        return []
    threshold = min_prominence * float(amp.max()) if relative else min_prominence
    idx, props = _scipy_find_peaks(amp, prominence=max(threshold, np.finfo(float).tiny))
    dw = spec.omega[1] - spec.omega[0]
    peaks = []
    for k, prom in zip(idx, props["prominences"]):
        delta, top = _refine(amp, int(k))
        peaks.append(Peak(float(spec.omega[k] + delta * dw), top, float(prom)))
    peaks.sort(key=lambda p: p.amplitude, reverse=True)
    return peaks

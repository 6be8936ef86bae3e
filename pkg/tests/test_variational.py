from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from qfluid.spectral import TimeSeries, find_peaks, spectrum
from qfluid.variational import (
    ENERGY_DRIFT_BOUND,
    EnergyDriftWarning,
    IntegrationError,
    State1D,
    State3D,
    Well1DParams,
    Well3DParams,
    analytic_alpha,
    breathing_frequency,
    coverage,
    default_alpha,
    derive_alpha_coefficients,
    equilibrium_sigma,
    equilibrium_widths,
    excitation_state,
    integrate_1d,
    integrate_3d,
    lyapunov_max,
    normal_frequencies,
    poincare_section,
    potential_1d,
    potential_3d,
    width_force,
)

FIG4 = dict(k=(5.0, 5.0, 1.0), zeta_anh=0.01, N=50.0)


@pytest.fixture(scope="module")
def fig4():
    return Well3DParams.derived(**FIG4)


# ---------------------------------------------------------------- 1D model


def test_well1d_validation():
    with pytest.raises(ValueError):
        Well1DParams(A=-1, H=1)
    with pytest.raises(ValueError):
        Well1DParams(A=1, H=0)
    with pytest.raises(ValueError):
        State1D(0.0, 0.0)
    with pytest.raises(ValueError):
        potential_1d(0.0, Well1DParams(1, 1))


def test_potential_free_of_coulomb():
    p = Well1DParams(A=0.0, H=1.3)
    s = np.linspace(0.2, 3, 20)
    assert np.allclose(potential_1d(s, p), s**2 / 2 + p.H**2 / (8 * s**2), rtol=1e-15)
    assert equilibrium_sigma(p) == pytest.approx((p.H**2 / 4) ** 0.25, rel=1e-12)


def test_potential_confining():
    p = Well1DParams(A=2.0, H=0.5)
    assert potential_1d(1e-4, p) > 1e6
    assert potential_1d(1e4, p) > 1e6


@given(st.floats(0.0, 20.0), st.floats(0.05, 5.0), st.floats(0.3, 3.0))
def test_force_is_minus_gradient(A, H, nb):
    p = Well1DParams(A, H, nb)
    s = equilibrium_sigma(p)
    assert abs(width_force(s, p)) < 1e-10 * max(1.0, s)
    h = 1e-5 * s
    fd = -(potential_1d(s * 1.3 + h, p) - potential_1d(s * 1.3 - h, p)) / (2 * h)
    assert fd == pytest.approx(width_force(s * 1.3, p), rel=1e-6, abs=1e-8)


def test_equilibrium_examples():
    assert equilibrium_sigma(Well1DParams(0.0, 1.0)) == pytest.approx(0.5**0.5, rel=1e-12)
    big = Well1DParams(A=1e3, H=0.5)
    assert equilibrium_sigma(big) / (math.sqrt(2) / 2 * 1e3) == pytest.approx(1.0, rel=1e-2)
    sig = [equilibrium_sigma(Well1DParams(1.0, H)) for H in np.linspace(0.1, 4, 30)]
    assert np.all(np.diff(sig) > 0)


def test_breathing_frequency_limits():
    assert breathing_frequency(Well1DParams(0.0, 0.7)) == pytest.approx(2.0, rel=1e-13)
    A = np.linspace(0.0, 50.0, 201)
    om = np.array([breathing_frequency(Well1DParams(a, 0.5)) for a in A])
    assert np.all(np.diff(om) < 0)
    assert np.all((om > 1.0) & (om <= 2.0 + 1e-13))
    assert om[-1] < 1.01


def test_breathing_frequency_reference_values():
    # frozen from an independent evaluation of the width equation
    for A, om, sig in [(0.5, 1.6268, 0.7835), (1.0, 1.4623, 1.1395), (2.0, 1.2881, 1.8125)]:
        p = Well1DParams(A, 0.5)
        assert breathing_frequency(p) == pytest.approx(om, abs=1e-4)
        assert equilibrium_sigma(p) == pytest.approx(sig, abs=1e-4)


def test_dipole_is_harmonic():
    p = Well1DParams(2.0, 0.5)
    tr = integrate_1d(State1D(0.3, equilibrium_sigma(p) * 1.2), p, 50.0, 0.01, 10)
    assert np.max(np.abs(tr.d - 0.3 * np.cos(tr.t))) < 1e-8


def test_dipole_independent_of_width():
    p = Well1DParams(2.0, 0.5)
    a = integrate_1d(State1D(0.3, 1.0, 0.1), p, 20.0, 0.01)
    b = integrate_1d(State1D(0.3, 3.0, 0.1, -0.5), p, 20.0, 0.01)
    assert np.array_equal(a.d, b.d)


def test_width_fixed_point():
    p = Well1DParams(1.0, 0.5)
    s = equilibrium_sigma(p)
    tr = integrate_1d(State1D(0.0, s), p, 100.0, 0.01, 100)
    assert np.max(np.abs(tr.sigma - s)) < 1e-12


def test_small_breathing_matches_linearisation():
    p = Well1DParams(1.0, 0.5)
    s = equilibrium_sigma(p)
    tr = integrate_1d(State1D(0.0, s * 1.001), p, 400.0, 0.01, 20)
    spec = spectrum(TimeSeries(0.0, 0.2, tr.sigma))
    peak = find_peaks(spec)[0]
    assert abs(peak.frequency - breathing_frequency(p)) < 2 * spec.resolution


def test_width_collapse_raises():
    p = Well1DParams(0.0, 1e-3)
    with pytest.raises(IntegrationError):
        integrate_1d(State1D(0.0, 1.0, 0.0, -1e3), p, 1.0, 0.01)


# ---------------------------------------------------------------- coefficients


def test_alpha3_matches_closed_form():
    a = derive_alpha_coefficients()
    oracle = 0.3 * (3 * math.pi**2) ** (2 / 3) * 0.6**1.5 / (2 * math.pi)
    assert a.alpha3 == pytest.approx(oracle, rel=1e-8)
    assert a.alpha3 == pytest.approx(0.212381, abs=1e-6)


def test_all_alphas_match_closed_forms():
    a = derive_alpha_coefficients()
    ref = analytic_alpha()
    for name in ("alpha1", "alpha2", "alpha3", "alpha4", "bohm"):
        assert getattr(a, name) == pytest.approx(ref[name], rel=1e-9), name
    assert a.bohm == pytest.approx(0.125, rel=1e-10)
    assert a.alpha4 == pytest.approx(0.191376, abs=1e-6)
    assert a.beta == 0.0042 and "beta" in a.convention


def test_hartree_coefficient_independent_oracle():
    # self-energy of a unit isotropic Gaussian: 1 / (2 sqrt(pi) sigma)
    a = default_alpha()
    assert a.alpha1 * 3 == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-10)
    # direct 3D quadrature of the exchange integral as a second route
    r = quad(lambda r: 4 * math.pi * r * r * ((2 * math.pi) ** -1.5 * math.exp(-r * r / 2)) ** (4 / 3), 0, math.inf)[0]
    assert a.alpha4 == pytest.approx(0.75 * (3 / math.pi) ** (1 / 3) * r, rel=1e-9)


@given(st.permutations([0.7, 1.3, 2.1]), st.floats(0.5, 100.0))
@settings(max_examples=10)
def test_alpha_invariant_under_widths(sig, N):
    a = derive_alpha_coefficients(sigma=tuple(sig), n_electrons=N)
    b = derive_alpha_coefficients(sigma=(0.7, 1.3, 2.1), n_electrons=1.0)
    for name in ("alpha2", "alpha3", "alpha4", "bohm"):
        assert getattr(a, name) == pytest.approx(getattr(b, name), rel=1e-9)
    assert a.alpha1 == pytest.approx(b.alpha1, rel=1e-9)


def test_alpha_bad_input():
    with pytest.raises(ValueError):
        derive_alpha_coefficients(sigma=(1, 0, 1))
    with pytest.raises(ValueError):
        derive_alpha_coefficients(n_electrons=0)


# ---------------------------------------------------------------- 3D model


def _fd_grad(x, p, h=1e-6):
    g = np.empty(6)
    for i in range(6):
        e = np.zeros(6)
        e[i] = h
        g[i] = (potential_3d(x + e, p)[0] - potential_3d(x - e, p)[0]) / (2 * h)
    return g


@given(st.lists(st.floats(-1.5, 1.5), min_size=3, max_size=3), st.lists(st.floats(0.5, 3.0), min_size=3, max_size=3))
@settings(max_examples=40)
def test_gradient_matches_finite_differences(d, s):
    p = Well3DParams.derived(**FIG4)
    x = np.array(d + s)
    U, g = potential_3d(x, p)
    fd = _fd_grad(x, p)
    assert np.allclose(g, fd, rtol=1e-6, atol=1e-8 * max(1.0, abs(U)))


def test_coupling_vanishes_without_anharmonicity():
    p0 = Well3DParams.derived((5, 5, 1), 0.0, 50)
    s = np.array([1.0, 1.2, 1.5])
    U1, _ = potential_3d(np.r_[0.4, -0.2, 0.3, s], p0)
    U0, _ = potential_3d(np.r_[0.0, 0.0, 0.0, s], p0)
    assert U1 - U0 == pytest.approx(0.5 * (5 * 0.16 + 5 * 0.04 + 0.09), rel=1e-13)


def test_permutation_symmetry():
    p = Well3DParams.derived((2.0, 2.0, 2.0), 0.05, 20)
    x = np.array([0.1, 0.2, 0.3, 1.0, 1.5, 2.0])
    perm = [2, 0, 1]
    xp = np.r_[x[:3][perm], x[3:][perm]]
    assert potential_3d(x, p)[0] == pytest.approx(potential_3d(xp, p)[0], rel=1e-14)


def test_equilibrium_widths_fig4(fig4):
    s = equilibrium_widths(fig4)
    assert np.allclose(s, [1.1118, 1.1118, 1.4350], atol=1e-4)
    assert np.max(np.abs(potential_3d(np.r_[0, 0, 0, s], fig4)[1])) < 1e-9
    om = normal_frequencies(fig4)
    assert np.all(om > 0) and om.max() == pytest.approx(5.09, abs=0.01)


def test_decoupled_dipole_frequencies():
    p = Well3DParams.derived((4.0, 2.0, 1.0), 0.0, 10)
    s = equilibrium_widths(p)
    init = State3D(np.array([0.1, 0.2, 0.3]), s)
    tr = integrate_3d(init, p, 30.0, dt=0.002, sample_every=10)
    assert np.allclose(tr.d, np.array([0.1, 0.2, 0.3]) * np.cos(np.sqrt([4.0, 2.0, 1.0]) * tr.t[:, None]), atol=1e-9)


def test_decoupling_bitwise():
    p = Well3DParams.derived((4.0, 2.0, 1.0), 0.0, 10)
    a = integrate_3d(State3D(np.array([0.1, 0.2, 0.3]), np.array([1.0, 1.0, 1.0])), p, 20.0, dt=0.002)
    b = integrate_3d(State3D(np.array([0.1, 0.2, 0.3]), np.array([2.0, 0.7, 1.4]), sigma_dot=np.ones(3)), p, 20.0, dt=0.002)
    assert np.array_equal(a.d, b.d)


def test_fixed_point_stability(fig4):
    s = equilibrium_widths(fig4)
    tr = integrate_3d(State3D(np.zeros(3), s), fig4, 1000.0, sample_every=100)
    assert np.max(np.abs(tr.d)) == 0.0
    assert np.max(np.abs(tr.sigma - s)) < 1e-9


@pytest.mark.parametrize("delta", [0.01, 3.0])
def test_energy_drift_bound(fig4, delta):
    tr = integrate_3d(excitation_state(fig4, delta), fig4, 1e4, sample_every=50)
    assert tr.max_relative_drift < ENERGY_DRIFT_BOUND
    assert tr.warnings == ()


def test_drift_warning_for_coarse_dt(fig4):
    with pytest.warns(EnergyDriftWarning):
        tr = integrate_3d(excitation_state(fig4, 3.0), fig4, 200.0, dt=0.05)
    assert tr.warnings


def test_state_validation(fig4):
    with pytest.raises(ValueError):
        State3D(np.zeros(3), np.array([1.0, -1.0, 1.0]))
    with pytest.raises(ValueError):
        Well3DParams((1, 1), 0, 1, 1, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        potential_3d(np.r_[0, 0, 0, 1, 0, 1], fig4)


def test_excitation_protocol(fig4):
    st_ = excitation_state(fig4, 0.5)
    assert np.array_equal(st_.d, [0.5, 0.5, 0.5])
    assert np.array_equal(st_.d_dot, [0.5, -0.5, 0.0])
    assert np.array_equal(st_.sigma_dot, np.zeros(3))


# ---------------------------------------------------------------- sections and exponents


def test_degenerate_orbit_switches_surface(fig4):
    s = equilibrium_widths(fig4)
    init = State3D(np.array([0.5, 0.0, 0.0]), s * 1.01)
    tr = integrate_3d(init, fig4, 200.0, sample_every=4)
    sec = poincare_section(tr)
    assert sec.surface == "sigma_z"
    assert len(sec) > 10


def test_no_crossings_warns(fig4):
    s = equilibrium_widths(fig4)
    tr = integrate_3d(State3D(np.zeros(3), s), fig4, 10.0)
    with pytest.warns(RuntimeWarning):
        sec = poincare_section(tr, surface="d_z")
    assert len(sec) == 0 and sec.warnings


def test_crossings_lie_on_surface(fig4):
    tr = integrate_3d(excitation_state(fig4, 0.5), fig4, 300.0, sample_every=8)
    sec = poincare_section(tr, surface="d_z")
    fine = integrate_3d(excitation_state(fig4, 0.5), fig4, 300.0, sample_every=1)
    # interpolated crossings agree with the densely sampled orbit
    for t, pt in zip(sec.times[:20], sec.points[:20]):
        dense = [np.interp(t, fine.t, fine.y[:, c]) for c in range(3)]
        assert abs(dense[2]) < 1e-4
        assert np.allclose(dense[:2], pt, atol=1e-4)


def test_coverage_metric():
    th = np.linspace(0, 2 * np.pi, 2000)
    circle = np.c_[np.cos(th), np.sin(th)]
    rng_free = np.c_[np.modf(np.arange(2000) * 0.618034)[0], np.modf(np.arange(2000) * 0.754878)[0]]
    assert coverage(circle) < 0.3
    assert coverage(rng_free) > 0.6
    with pytest.raises(ValueError):
        coverage(np.zeros((0, 2)))


def test_lyapunov_integrable_case():
    p = Well3DParams.derived((4.0, 2.0, 1.0), 0.0, 10)
    init = State3D(np.array([0.3, 0.2, 0.1]), equilibrium_widths(p))
    res = lyapunov_max(p, init, 500.0)
    assert abs(res.exponent) < math.log(500.0) / 500.0
    assert res.trace.size == 500


def test_lyapunov_validation(fig4):
    with pytest.raises(ValueError):
        lyapunov_max(fig4, excitation_state(fig4, 0.1), 0.5)

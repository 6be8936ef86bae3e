from __future__ import annotations

import time
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qfluid.dispersion import (
    AcousticParams,
    FitConditioningError,
    LangmuirParams,
    ModelValidityError,
    SpinDispersionParams,
    ValidityWarning,
    fit_even_taylor,
    match_closure,
    mean_square_velocity,
    omega2_acoustic_fluid,
    omega2_acoustic_kinetic,
    omega2_langmuir_fluid,
    omega2_langmuir_kinetic,
    omega2_spin,
)
from qfluid.units import BOHR_MAGNETON, VACUUM_PERMEABILITY


def test_langmuir_fluid_values():
    p = LangmuirParams(omega_p=1.0, v2_mean=1.0, gamma=3.0, zeta=1.0)
    assert omega2_langmuir_fluid(0.0, p) == 1.0
    assert omega2_langmuir_fluid(0.1, p) == pytest.approx(1 + 0.03 + 2.5e-5, rel=1e-14)
    classical = LangmuirParams(1.0, 1.0, 3.0, 0.0)
    k = np.linspace(0, 1, 11)
    assert np.allclose(omega2_langmuir_fluid(k, classical), 1 + 3 * k**2)


def test_langmuir_kinetic_matches_fluid_for_maxwellian():
    v2 = mean_square_velocity("maxwell", T=0.4)
    k = np.linspace(0, 0.2, 9)
    kin = omega2_langmuir_kinetic(k, LangmuirParams(1.0, v2))
    flu = omega2_langmuir_fluid(k, LangmuirParams(1.0, v2, 3.0, 1.0))
    assert np.allclose(kin, flu, rtol=1e-15)


def test_fermi_mean_square_velocity():
    e_f = 0.115
    assert mean_square_velocity("fermi", E_F=e_f) == pytest.approx(2 * e_f / 5)
    p = LangmuirParams(1.0, mean_square_velocity("fermi", E_F=e_f))
    m = match_closure("langmuir", 3.0, 1.0, v2_mean=p.v2_mean)
    assert m.coefficient(2) == pytest.approx(3 * p.v2_mean, rel=1e-10)
    with pytest.raises(ValueError):
        mean_square_velocity("bose")


def test_kinetic_validity_warning():
    p = LangmuirParams(1.0, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        omega2_langmuir_kinetic(0.05, p)
    with pytest.warns(ValidityWarning):
        omega2_langmuir_kinetic(1.0, p)


def test_negative_wavenumber_rejected():
    with pytest.raises(ValueError):
        omega2_langmuir_fluid(-0.1, LangmuirParams(1.0, 1.0))


def test_acoustic_kinetic():
    p = AcousticParams(lambda_D=1.0, omega_pi=0.3, H=0.0)
    assert p.c_s_kinetic == pytest.approx(0.3)
    assert omega2_acoustic_kinetic(1.0, p) == pytest.approx(0.09 / 2)
    k = 1e-4
    assert np.sqrt(omega2_acoustic_kinetic(k, p)) / k == pytest.approx(0.3, rel=1e-7)
    p12 = AcousticParams(1.0, 0.3, H=np.sqrt(12.0))
    k = np.linspace(0, 5, 6)
    assert np.allclose(omega2_acoustic_kinetic(k, p12), 0.09 * k**2, rtol=1e-12)
    with pytest.raises(ModelValidityError):
        omega2_acoustic_kinetic(2.0, AcousticParams(1.0, 0.3, H=4.0))
    with pytest.raises(ValueError):
        AcousticParams(1.0, 0.3, 0.0, c_s_kinetic=0.5)


def test_acoustic_fluid_limits():
    p = AcousticParams(lambda_D=2.0, omega_pi=0.5, H=1.5, gamma=1.0, zeta=1 / 3)
    k = 1e-5
    assert np.sqrt(omega2_acoustic_fluid(k, p)) / k == pytest.approx(p.c_s_fluid, rel=1e-8)
    classical = AcousticParams(2.0, 0.5, 1.5, gamma=1.0, zeta=0.0)
    k = np.linspace(0, 3, 7)
    assert np.allclose(omega2_acoustic_fluid(k, classical), 1.0 * k**2 / (1 + 4 * k**2), rtol=1e-14)
    # saturation at omega_pi^2
    assert omega2_acoustic_fluid(1e4, p) == pytest.approx(0.25, rel=1e-6)


def test_spin_dispersion():
    base = dict(omega_p=1.0, T_e=0.2, n0=0.01, gamma=3.0)
    k = np.linspace(0, 0.5, 6)
    p0 = SpinDispersionParams(**base)
    assert np.allclose(omega2_spin(k, p0), 1 + 3 * k**2 * 0.2)
    pxc = SpinDispersionParams(**base, dVxc_dn=-2.0, dBxc_dmz=5.0, dVxc_dmz=7.0)
    assert np.allclose(omega2_spin(k, pxc), 1 + 3 * k**2 * 0.2 + k**2 * 0.01 * (-2.0))
    p1 = SpinDispersionParams(**base, eta0=1.0)
    expected = 1 + 3 * k**2 * 0.2 - k**2 * BOHR_MAGNETON**2 * VACUUM_PERMEABILITY * 0.01
    assert np.allclose(omega2_spin(k, p1), expected, rtol=1e-14)
    off = SpinDispersionParams(**base, eta0=1.0, include_magnetostatic=False)
    assert np.allclose(omega2_spin(k, off), 1 + 3 * k**2 * 0.2)
    with pytest.raises(ValueError):
        SpinDispersionParams(**base, eta0=1.5)


def test_match_langmuir_gamma3():
    t0 = time.perf_counter()
    m = match_closure("langmuir", 3.0, 1.0)
    assert time.perf_counter() - t0 < 1.0
    assert m.orders == (0, 2, 4)
    assert np.all(m.relative_difference < 1e-10)
    assert np.allclose(m.kinetic, [1.0, 3.0, 0.25], rtol=1e-10)


def test_match_langmuir_gamma1_mismatch():
    m = match_closure("langmuir", 1.0, 1.0, v2_mean=0.7)
    assert m.difference[1] == pytest.approx(-2 * 0.7, rel=1e-9)


@pytest.mark.parametrize("H", [0.0, 0.5, 1.0, 2.0])
def test_match_acoustic(H):
    m = match_closure("acoustic", 1.0, 1.0 / 3.0, H=H)
    assert abs(m.difference[1]) < 1e-10
    assert m.coefficient(2, "kinetic") == pytest.approx(-(1 - H**2 / 12), rel=1e-9)
    assert m.coefficient(2, "fluid") == pytest.approx(-(1 - H**2 / 12), rel=1e-9)


def test_match_unknown_regime():
    with pytest.raises(ValueError):
        match_closure("spin", 1.0, 1.0)


def test_fit_conditioning_error():
    with pytest.raises(FitConditioningError, match="cond"):
        fit_even_taylor(lambda k: k**0, 1.0, 30, 30)


def test_langmuir_residual_scaling():
    """A two-term fit of omega^2 leaves the k^4 term, so the residual drops 16x when k_max halves."""
    p = LangmuirParams(1.0, 1.0, 3.0, 1.0)
    r1 = fit_even_taylor(lambda k: omega2_langmuir_fluid(k, p), 0.2, 2, 16).residual
    r2 = fit_even_taylor(lambda k: omega2_langmuir_fluid(k, p), 0.1, 2, 16).residual
    assert r1 / r2 == pytest.approx(16.0, rel=1e-6)


@given(st.floats(0.1, 3.0), st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.floats(0.0, 1.0))
def test_langmuir_monotone(omega_p, v2, zeta, kmax):
    p = LangmuirParams(omega_p, v2, 3.0, zeta)
    k = np.linspace(0, kmax, 50)
    assert np.all(np.diff(omega2_langmuir_fluid(k, p)) >= 0)


@given(st.floats(0.0, np.sqrt(12.0)), st.floats(0.1, 3.0))
def test_acoustic_kinetic_monotone(H, lam):
    p = AcousticParams(lam, 0.5, H)
    k = np.linspace(0, 5 / lam, 80)
    assert np.all(np.diff(omega2_acoustic_kinetic(k, p)) >= -1e-15)


@given(st.floats(0.0, 3.0), st.floats(0.1, 3.0), st.floats(0.0, 1.0))
def test_acoustic_fluid_monotone(H, gamma, zeta):
    # with lambda_D omega_pi = 1 the rational form rises monotonically towards omega_pi^2
    p = AcousticParams(1.0, 1.0, H, gamma, zeta)
    k = np.linspace(0, 10, 200)
    w2 = omega2_acoustic_fluid(k, p)
    assert np.all(np.diff(w2) >= -1e-12)


@given(st.floats(0.5, 3.0), st.floats(0.0, 1.0), st.floats(0.0, 2.0))
def test_continuity_in_parameters(gamma, zeta, H):
    k = np.linspace(0, 2, 21)
    eps = 1e-7
    a = omega2_acoustic_fluid(k, AcousticParams(1.0, 1.0, H, gamma, zeta))
    b = omega2_acoustic_fluid(k, AcousticParams(1.0, 1.0, H + eps, gamma + eps, zeta + eps))
    assert np.max(np.abs(a - b)) < 1e-5
    la = omega2_langmuir_fluid(k, LangmuirParams(1.0, 1.0, gamma, zeta))
    lb = omega2_langmuir_fluid(k, LangmuirParams(1.0, 1.0, gamma + eps, zeta + eps))
    assert np.max(np.abs(la - lb)) < 1e-5

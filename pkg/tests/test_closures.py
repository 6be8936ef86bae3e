from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qfluid.closures import (
    ClosureParams,
    PolytropicEOS,
    SpinDensityPair,
    bohm_potential,
    fermi_enthalpy,
    pressure_fermi,
    pressure_polytropic,
    quantum_pressure_iso,
    spin_pressure_mep,
    v_correlation_brey,
    v_exchange_lda,
    v_xc,
)
from qfluid.grid import Grid


def test_pressure_fermi_values():
    assert pressure_fermi(0.0) == 0.0
    assert pressure_fermi(1.0) == pytest.approx((3 * math.pi**2) ** (2 / 3) / 5, rel=1e-15)
    assert pressure_fermi(1.0) == pytest.approx(1.914, abs=1e-3)
    with pytest.raises(ValueError):
        pressure_fermi(-1.0)


@given(st.floats(1e-6, 10.0), st.floats(0.01, 100.0))
def test_pressure_fermi_homogeneity(n, lam):
    assert pressure_fermi(lam * n) == pytest.approx(lam ** (5 / 3) * pressure_fermi(n), rel=1e-12)


def test_polytropic():
    eos = PolytropicEOS(gamma=1.0, n_ref=2.0, P_ref=3.0)
    assert pressure_polytropic(2.0, eos) == 3.0
    n = np.linspace(0, 5, 11)
    assert np.allclose(np.diff(pressure_polytropic(n, eos), 2), 0.0, atol=1e-13)
    fermi = PolytropicEOS.fermi(0.3)
    n = np.geomspace(1e-6, 10, 50)
    assert np.allclose(fermi.pressure(n), pressure_fermi(n), rtol=1e-12)
    with pytest.raises(ValueError):
        PolytropicEOS(gamma=0.0, n_ref=1.0, P_ref=1.0)
    with pytest.raises(ValueError):
        pressure_polytropic(-1.0, eos)


def test_fermi_enthalpy_is_dP_over_n():
    eos = PolytropicEOS.fermi(0.1)
    n = np.geomspace(1e-4, 1.0, 20)
    assert np.allclose(eos.enthalpy(n), fermi_enthalpy(n), rtol=1e-12)
    # dw/dn = P'(n) / n
    h = 1e-6
    dw = (fermi_enthalpy(n * (1 + h)) - fermi_enthalpy(n * (1 - h))) / (2 * h * n)
    dp = (pressure_fermi(n * (1 + h)) - pressure_fermi(n * (1 - h))) / (2 * h * n)
    assert np.allclose(dw, dp / n, rtol=1e-7)


def test_closure_params_validation():
    with pytest.raises(ValueError):
        ClosureParams(zeta=-0.1)
    with pytest.raises(ValueError):
        ClosureParams(xc="gga")


def test_exchange_and_correlation_values():
    assert v_exchange_lda(0.0) == 0.0
    assert v_exchange_lda(1.0) == pytest.approx(-(3 / math.pi) ** (1 / 3), rel=1e-15)
    assert v_exchange_lda(1.0) == pytest.approx(-0.98477, abs=5e-5)  # printed value is rounded
    assert v_exchange_lda(1.0) == pytest.approx(-(3 * math.pi**2) ** (1 / 3) / math.pi, rel=1e-14)
    assert v_exchange_lda(8.0) == pytest.approx(2 * v_exchange_lda(1.0), rel=1e-14)
    assert v_correlation_brey(0.0) == 0.0
    assert v_correlation_brey(1.0) == pytest.approx(-0.09926, abs=1e-5)
    n = np.geomspace(1e-8, 10, 200)
    assert np.all(np.diff(v_correlation_brey(n)) < 0)
    assert np.allclose(v_xc(n, "lda_exchange_plus_brey"), v_exchange_lda(n) + v_correlation_brey(n))
    assert np.all(v_xc(n, "none") == 0)
    with pytest.raises(ValueError):
        v_xc(n, "bogus")
    with pytest.raises(ValueError):
        v_exchange_lda(-1.0)


@pytest.mark.parametrize("grid", [Grid.cartesian(-3, 3, 64), Grid.spherical(10, 64)])
def test_bohm_vanishes_on_constant(grid):
    n = np.full(grid.n_points, 0.37)
    assert np.max(np.abs(bohm_potential(n, grid))) < 1e-13
    assert np.max(np.abs(quantum_pressure_iso(n, grid))) < 1e-13


def _gauss(grid, sigma=1.0):
    return np.exp(-grid.x**2 / (2 * sigma**2))


def test_bohm_gaussian_oracle_second_order():
    errs = []
    for m in (201, 401, 801):
        g = Grid.cartesian(-6, 6, m)
        vb = bohm_potential(_gauss(g, 1.2), g, zeta=0.7)
        exact = 0.7 * (1 / (4 * 1.2**2) - g.x**2 / (8 * 1.2**4))
        inner = np.abs(g.x) < 5
        errs.append(np.max(np.abs(vb - exact)[inner]))
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(4, rel=0.05)
    g = Grid.cartesian(-6, 6, 801)
    assert bohm_potential(_gauss(g, 1.2), g)[400] == pytest.approx(1 / (4 * 1.2**2), rel=1e-4)


def test_quantum_pressure_gaussian_oracle():
    g = Grid.cartesian(-6, 6, 1601)
    s = 0.9
    pq = quantum_pressure_iso(_gauss(g, s), g)
    # sqrt n = exp(-x^2/4s^2): (psi')^2 - psi psi'' = exp(-x^2/2s^2) / (2 s^2)
    exact = 0.5 * np.exp(-g.x**2 / (2 * s**2)) / (2 * s**2)
    assert np.max(np.abs(pq - exact)[np.abs(g.x) < 5]) < 1e-5


def test_discrete_identity_grad_pq_equals_n_grad_vb_second_order():
    errs = []
    for m in (201, 401, 801):
        g = Grid.cartesian(-6, 6, m)
        n = _gauss(g, 1.0) + 0.2 * _gauss(Grid.cartesian(-6 - 1.0, 6 - 1.0, m), 0.7)
        lhs = g.gradient(quantum_pressure_iso(n, g))
        rhs = n * g.gradient(bohm_potential(n, g))
        inner = np.abs(g.x) < 4.5
        errs.append(np.max(np.abs(lhs - rhs)[inner]))
    assert errs[0] / errs[1] > 3.5 and errs[1] / errs[2] > 3.5


def test_bohm_floor_checks():
    g = Grid.cartesian(-1, 1, 32)
    n = np.zeros(g.n_points)
    with pytest.raises(ValueError):
        bohm_potential(n, g)
    with pytest.raises(ValueError):
        bohm_potential(np.full(g.n_points, 1e-20), g, floor=1e-12)
    with pytest.raises(ValueError):
        bohm_potential(np.ones(10), g)


@given(st.floats(1e-6, 10.0))
def test_mep_reduces_to_fermi(n):
    assert spin_pressure_mep(SpinDensityPair(n, 0.0)) == pytest.approx(pressure_fermi(n), rel=1e-12)


@given(st.floats(1e-6, 10.0))
def test_mep_full_polarisation(n):
    assert spin_pressure_mep(SpinDensityPair(n, n / 2)) == pytest.approx(2 ** (2 / 3) * pressure_fermi(n), rel=1e-12)


@given(st.floats(1e-3, 10.0), st.floats(0.0, 0.49), st.floats(0.001, 0.01))
def test_mep_increasing_in_polarisation(n, a, da):
    lo = spin_pressure_mep(SpinDensityPair(n, a * n))
    hi = spin_pressure_mep(SpinDensityPair(n, (a + da) * n))
    assert hi > lo


def test_spin_pair_validation():
    with pytest.raises(ValueError):
        SpinDensityPair(1.0, 0.6)
    with pytest.raises(ValueError):
        SpinDensityPair(-1.0, 0.0)
    assert SpinDensityPair(2.0, 0.5).polarization == pytest.approx(0.5)


def test_closures_are_pure():
    n = np.geomspace(1e-6, 5, 33)
    g = Grid.spherical(5, 33)
    assert np.array_equal(bohm_potential(n + 1, g), bohm_potential(n + 1, g))
    assert np.array_equal(v_xc(n, "lda_exchange_plus_brey"), v_xc(n, "lda_exchange_plus_brey"))

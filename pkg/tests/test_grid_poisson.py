from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import erf

from qfluid.grid import Grid
from qfluid.qhd import (
    build_jellium,
    gauss_field,
    mean_position,
    mean_radius,
    particle_number,
    poisson_residual,
    rms_width,
    solve_poisson,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid.cartesian(0, 1, 8)
    with pytest.raises(ValueError):
        Grid("spherical_radial", 1.0, 2.0, 32)
    with pytest.raises(ValueError):
        Grid.cartesian(1, 0, 32)


@pytest.mark.parametrize("grid", [Grid.cartesian(-2, 3, 50), Grid.spherical(7, 50)])
def test_volumes_sum_to_domain(grid):
    if grid.is_spherical:
        assert grid.volumes.sum() == pytest.approx(4 / 3 * math.pi * 7**3, rel=1e-13)
    else:
        assert grid.volumes.sum() == pytest.approx(5.0, rel=1e-14)


def test_laplacian_is_conservative():
    g = Grid.spherical(10, 101)
    f = np.exp(-(g.x - 4) ** 2)
    assert abs(g.integrate(g.laplacian(f))) < 1e-12


def test_radial_laplacian_origin():
    g = Grid.spherical(2, 201)
    lap = g.laplacian(g.x**2)
    assert lap[0] == pytest.approx(6.0, rel=1e-12)
    assert np.allclose(lap[1:-1], 6.0, rtol=1e-10)


def _gauss_oracle(x, A, s):
    """Free-space solution of phi'' = n for n = (A/s) exp(-x^2/2s^2)."""
    return A * s * np.exp(-(x**2) / (2 * s**2)) + A * math.sqrt(math.pi / 2) * x * erf(x / (math.sqrt(2) * s))


def test_poisson_gaussian_closed_form_second_order():
    A, s = 1.3, 0.8
    errs = []
    for m in (101, 201, 401, 801):
        g = Grid.cartesian(-8, 8, m)
        n = A / s * np.exp(-(g.x**2) / (2 * s**2))
        phi = solve_poisson(n, g, kappa=1.0)
        errs.append(np.max(np.abs(phi - _gauss_oracle(g.x, A, s))))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all(np.abs(ratios - 4.0) < 0.3), ratios


def test_poisson_uniform_sphere_second_order():
    errs = []
    for m in (101, 201, 401, 801):
        g = Grid.spherical(10, m)
        k = int(0.5 * (m - 1)) - 1
        a = g.faces[k]
        n = np.where(np.arange(m) <= k, 1.0, 0.0)
        Q = 4 / 3 * math.pi * a**3
        phi = solve_poisson(n, g)
        exact = np.where(g.x < a, -Q / (2 * a) * (3 - g.x**2 / a**2), -Q / np.maximum(g.x, 1e-300))
        errs.append(np.max(np.abs(phi - exact)))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all(ratios > 3.5), ratios


def test_poisson_zero_source():
    for g in (Grid.spherical(5, 64), Grid.cartesian(-1, 1, 64)):
        assert np.all(solve_poisson(np.zeros(64), g) == 0.0)


@pytest.mark.parametrize("geom", ["spherical", "cartesian"])
def test_two_routes_agree(geom):
    if geom == "spherical":
        g = Grid.spherical(40, 500)
        s = np.exp(-((g.x - 20) ** 2) / 8) - 0.5 * np.exp(-((g.x - 25) ** 2) / 4)
        kappa, offset = 4 * math.pi, 0.0
    else:
        g = Grid.cartesian(-10, 10, 500)
        s = np.exp(-((g.x - 1) ** 2))
        kappa, offset = 1.0, 0.5
    phi = solve_poisson(s, g, kappa)
    field = gauss_field(s, g, kappa, offset)
    assert np.allclose(g.face_gradient(phi), field, atol=1e-8 * np.max(np.abs(field)))
    scale = kappa * np.sum(np.abs(s) * g.volumes)
    assert poisson_residual(phi, s, g, kappa) < 1e-12 * scale


@given(st.floats(-3, 3), st.floats(0.3, 2.0))
def test_poisson_linear(shift, width):
    g = Grid.cartesian(-10, 10, 200)
    a = np.exp(-((g.x - shift) ** 2) / width)
    b = np.exp(-((g.x + 1) ** 2))
    lhs = solve_poisson(2 * a - b, g, 1.0)
    rhs = 2 * solve_poisson(a, g, 1.0) - solve_poisson(b, g, 1.0)
    assert np.allclose(lhs, rhs, atol=1e-9 * np.max(np.abs(lhs)))


def test_jellium_geometry():
    shell = build_jellium(40, 10, 4)
    assert (shell.R_i, shell.R_e) == (35, 45)
    assert shell.N == pytest.approx(48250 / 64, rel=1e-12)
    assert build_jellium(40, 25, 4).N == pytest.approx(1936.0, abs=0.1)
    assert build_jellium(40, 1e-6, 4).N < 1e-3
    with pytest.raises(ValueError):
        build_jellium(5, 10, 4)


def test_jellium_background_integral():
    shell = build_jellium(40, 10, 4)
    g = shell.default_grid(2000)
    assert g.x_max >= shell.R_e + 30
    assert particle_number(shell.background(g), g) == pytest.approx(shell.N, rel=1e-12)


def test_mean_radius_uniform_shell():
    g = Grid.spherical(60, 6001)
    n = np.where((g.x >= 35) & (g.x <= 45), 1.0, 0.0)
    exact = 0.75 * (45**4 - 35**4) / (45**3 - 35**3)
    assert exact == pytest.approx(40.4145, abs=1e-4)
    assert mean_radius(n, g) == pytest.approx(exact, rel=2e-4)


def test_mean_radius_thin_shell():
    g = Grid.spherical(60, 6001)
    n = np.exp(-((g.x - 30) ** 2) / (2 * 0.05**2))
    assert mean_radius(n, g) == pytest.approx(30.0, rel=1e-4)


def test_cartesian_moments():
    g = Grid.cartesian(-10, 10, 2001)
    n = np.exp(-((g.x - 0.7) ** 2) / (2 * 1.1**2))
    assert mean_position(n, g) == pytest.approx(0.7, abs=1e-9)
    assert rms_width(n, g) == pytest.approx(1.1, rel=1e-6)

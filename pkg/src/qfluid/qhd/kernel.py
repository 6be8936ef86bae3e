"""Compiled right-hand side and RK4 stepper of the staggered QHD scheme.

Density lives on the M nodes, velocity on the M - 1 interior faces; the two
end faces are closed walls.  The continuity equation is written in flux form
so that sum(vol * n) changes only through round-off.  The Euler equation is
advanced in potential form,

    du/dt = -d/dx [u^2/2 + w(n) + V_xc(n) + V_B(n) + V_ext] + d(phi)/dx - nu u,

with the electrostatic field taken from the enclosed charge.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

EOS_POWER = 0
EOS_LOG = 1
XC_NONE = 0
XC_X = 1
XC_XC = 2

_EXCHANGE = (3.0 / math.pi) ** (1.0 / 3.0)
_BREY_GAMMA = 0.03349
_BREY_DELTA = 18.376


@njit(cache=True)
def node_potential(n, u, h, vol, area, vext, zeta, eos_mode, eos_coeff, eos_exp, xc_mode, floor, out):
    """Per-electron potential energy at the nodes, without the Hartree part."""
    m = n.size
    for i in range(m):
        nf = n[i] if n[i] > floor else floor
        psi = math.sqrt(nf)
        lap = 0.0
        if i > 0:
            pl = n[i - 1] if n[i - 1] > floor else floor
            lap -= area[i - 1] * (psi - math.sqrt(pl)) / h
        if i < m - 1:
            pr = n[i + 1] if n[i + 1] > floor else floor
            lap += area[i] * (math.sqrt(pr) - psi) / h
        vb = -0.5 * zeta * lap / (vol[i] * psi)
        if eos_mode == EOS_POWER:
            w = eos_coeff * nf**eos_exp
        else:
            w = eos_coeff * math.log(nf)
        vxc = 0.0
        if xc_mode != XC_NONE:
            c = nf ** (1.0 / 3.0)
            vxc = -_EXCHANGE * c
            if xc_mode == XC_XC:
                vxc -= _BREY_GAMMA * math.log1p(_BREY_DELTA * c)
        ul = u[i - 1] if i > 0 else 0.0
        ur = u[i] if i < m - 1 else 0.0
        out[i] = 0.25 * (ul * ul + ur * ur) + w + vxc + vb + vext[i]


@njit(cache=True)
def rhs(n, u, dn, du, phi, h, vol, area, nbg, vext, kappa, offset, zeta,
        eos_mode, eos_coeff, eos_exp, xc_mode, nu, floor, mask):
    m = n.size
    # continuity
    prev = 0.0
    for i in range(m):
        nxt = 0.0
        if i < m - 1:
            nxt = area[i] * 0.5 * (n[i] + n[i + 1]) * u[i]
        dn[i] = -(nxt - prev) / vol[i]
        prev = nxt
    node_potential(n, u, h, vol, area, vext, zeta, eos_mode, eos_coeff, eos_exp, xc_mode, floor, phi)
    qtot = 0.0
    for i in range(m):
        qtot += vol[i] * (n[i] - nbg[i])
    q = 0.0
    for f in range(m - 1):
        q += vol[f] * (n[f] - nbg[f])
        if 0.5 * (n[f] + n[f + 1]) < mask:
            du[f] = 0.0
        else:
            g = kappa * (q - offset * qtot) / area[f]
            du[f] = -(phi[f + 1] - phi[f]) / h + g - nu * u[f]


@njit(cache=True)
def advance(n, u, nsteps, dt, h, vol, area, nbg, vext, kappa, offset, zeta,
            eos_mode, eos_coeff, eos_exp, xc_mode, nu, floor, mask):
    """Advance (n, u) in place by ``nsteps`` classical RK4 steps."""
    m = n.size
    n0 = np.empty(m)
    u0 = np.empty(m - 1)
    kn = np.empty((4, m))
    ku = np.empty((4, m - 1))
    nt = np.empty(m)
    ut = np.empty(m - 1)
    phi = np.empty(m)
    c = (0.0, 0.5, 0.5, 1.0)
    for _ in range(nsteps):
        n0[:] = n
        u0[:] = u
        for s in range(4):
            if s == 0:
                nt[:] = n0
                ut[:] = u0
            else:
                for i in range(m):
                    nt[i] = n0[i] + c[s] * dt * kn[s - 1, i]
                for f in range(m - 1):
                    ut[f] = u0[f] + c[s] * dt * ku[s - 1, f]
            rhs(nt, ut, kn[s], ku[s], phi, h, vol, area, nbg, vext, kappa, offset, zeta,
                eos_mode, eos_coeff, eos_exp, xc_mode, nu, floor, mask)
        for i in range(m):
            v = n0[i] + dt / 6.0 * (kn[0, i] + 2.0 * kn[1, i] + 2.0 * kn[2, i] + kn[3, i])
            n[i] = floor if v < floor else v
        for f in range(m - 1):
            if 0.5 * (n[f] + n[f + 1]) < mask:
                u[f] = 0.0
            else:
                u[f] = u0[f] + dt / 6.0 * (ku[0, f] + 2.0 * ku[1, f] + 2.0 * ku[2, f] + ku[3, f])


# ---------------------------------------------------------------------------
# Wave form.  For zeta > 0 and irrotational flow the same equations follow
# from psi = sqrt(n) exp(i S / hbar) with hbar = sqrt(zeta) and u = grad S:
#
#     i hbar dpsi/dt = -hbar^2/2 lap(psi) + [w(n) + V_xc(n) + V_ext - phi + nu S] psi
#
# The nu S term reproduces the -nu u friction of the Euler equation.  The
# discrete norm sum(vol |psi|^2) is the particle number.  psi is handled as
# separate real and imaginary arrays (a, b).


@njit(cache=True)
def face_velocity(a, b, hbar, h, n_mask, out):
    """u = hbar * arg(psi_{f+1} conj(psi_f)) / h, zero where the face density is below ``n_mask``."""
    for f in range(a.size - 1):
        nf = 0.5 * (a[f] * a[f] + b[f] * b[f] + a[f + 1] * a[f + 1] + b[f + 1] * b[f + 1])
        if nf < n_mask:
            out[f] = 0.0
        else:
            re = a[f + 1] * a[f] + b[f + 1] * b[f]
            im = b[f + 1] * a[f] - a[f + 1] * b[f]
            out[f] = hbar * math.atan2(im, re) / h


@njit(cache=True)
def wave_rhs(a, b, da, db, pot, cl, cr, gcoef, h, vol, area, nbg, vext, kappa, offset,
             eos_mode, eos_coeff, eos_exp, xc_mode, hbar, nu, floor, mask):
    """dpsi/dt for psi = a + i b.

    ``cl``/``cr`` are the Laplacian couplings area / (h vol) and ``gcoef`` is
    h kappa / area, from :func:`wave_coefficients`.
    """
    m = a.size
    qtot = 0.0
    if offset != 0.0:
        for i in range(m):
            qtot += vol[i] * (a[i] * a[i] + b[i] * b[i] - nbg[i])
    # electron potential energy -phi, from the enclosed charge
    q = 0.0
    phi = 0.0
    pot[0] = 0.0
    for f in range(m - 1):
        q += vol[f] * (a[f] * a[f] + b[f] * b[f] - nbg[f])
        phi += gcoef[f] * (q - offset * qtot)
        pot[f + 1] = -phi
    if nu != 0.0:
        # friction potential nu * S with S = int u dx; u ~ hbar Im(conj psi_f psi_f+1) / (h n_face)
        s = 0.0
        for f in range(m - 1):
            nf = 0.5 * (a[f] * a[f] + b[f] * b[f] + a[f + 1] * a[f + 1] + b[f + 1] * b[f + 1])
            if nf >= mask:
                s += hbar * (b[f + 1] * a[f] - a[f + 1] * b[f]) / nf
            pot[f + 1] += nu * s
    fermi = eos_mode == EOS_POWER and eos_exp == 2.0 / 3.0
    hh = 0.5 * hbar
    for i in range(m):
        n = a[i] * a[i] + b[i] * b[i]
        nf = n if n > floor else floor
        v = pot[i] + vext[i]
        if xc_mode != XC_NONE or fermi:
            c = np.cbrt(nf)
            if fermi:
                v += eos_coeff * c * c
            if xc_mode != XC_NONE:
                v -= _EXCHANGE * c
                if xc_mode == XC_XC:
                    v -= _BREY_GAMMA * math.log1p(_BREY_DELTA * c)
        if not fermi:
            if eos_mode == EOS_POWER:
                v += eos_coeff * nf**eos_exp
            else:
                v += eos_coeff * math.log(nf)
        la = 0.0
        lb = 0.0
        if i > 0:
            la += cl[i] * (a[i - 1] - a[i])
            lb += cl[i] * (b[i - 1] - b[i])
        if i < m - 1:
            la += cr[i] * (a[i + 1] - a[i])
            lb += cr[i] * (b[i + 1] - b[i])
        vh = v / hbar
        # dpsi/dt = -i (H psi) / hbar, H psi = -hbar^2/2 lap psi + v psi
        da[i] = -hh * lb + vh * b[i]
        db[i] = hh * la - vh * a[i]


@njit(cache=True)
def advance_wave(a, b, nsteps, dt, h, vol, area, nbg, vext, kappa, offset,
                 eos_mode, eos_coeff, eos_exp, xc_mode, hbar, nu, floor, mask):
    """Advance psi = a + i b in place by ``nsteps`` classical RK4 steps."""
    m = a.size
    cl, cr, gcoef = wave_coefficients(h, vol, area, kappa)
    a0 = np.empty(m)
    b0 = np.empty(m)
    at = np.empty(m)
    bt = np.empty(m)
    ka = np.empty((4, m))
    kb = np.empty((4, m))
    pot = np.empty(m)
    c = (0.0, 0.5, 0.5, 1.0)
    for _ in range(nsteps):
        a0[:] = a
        b0[:] = b
        for st in range(4):
            if st == 0:
                at[:] = a0
                bt[:] = b0
            else:
                w = c[st] * dt
                for i in range(m):
                    at[i] = a0[i] + w * ka[st - 1, i]
                    bt[i] = b0[i] + w * kb[st - 1, i]
            wave_rhs(at, bt, ka[st], kb[st], pot, cl, cr, gcoef, h, vol, area, nbg, vext, kappa, offset,
                     eos_mode, eos_coeff, eos_exp, xc_mode, hbar, nu, floor, mask)
        w = dt / 6.0
        for i in range(m):
            a[i] = a0[i] + w * (ka[0, i] + 2.0 * ka[1, i] + 2.0 * ka[2, i] + ka[3, i])
            b[i] = b0[i] + w * (kb[0, i] + 2.0 * kb[1, i] + 2.0 * kb[2, i] + kb[3, i])


@njit(cache=True)
def wave_coefficients(h, vol, area, kappa):
    m = vol.size
    cl = np.zeros(m)
    cr = np.zeros(m)
    for i in range(m):
        if i > 0:
            cl[i] = area[i - 1] / (h * vol[i])
        if i < m - 1:
            cr[i] = area[i] / (h * vol[i])
    gcoef = h * kappa / area
    return cl, cr, gcoef


@njit(cache=True)
def advance_imaginary(a, b, nsteps, dtau, n_total, h, vol, area, nbg, vext, kappa, offset,
                      eos_mode, eos_coeff, eos_exp, xc_mode, hbar, floor, mask):
    """RK4 in imaginary time, dpsi/dtau = -H psi / hbar, in place.

    Excited components decay like exp(-(E - mu) tau / hbar).  The norm is reset
    to ``n_total`` after every step; left free, it drifts and feeds back
    through the Hartree term.  The RK4 stability interval on the negative real
    axis (2.79) is close to the one on the imaginary axis (2.83), so the
    real-time step can be reused.
    """
    m = a.size
    cl, cr, gcoef = wave_coefficients(h, vol, area, kappa)
    a0 = np.empty(m)
    b0 = np.empty(m)
    at = np.empty(m)
    bt = np.empty(m)
    ka = np.empty((4, m))
    kb = np.empty((4, m))
    da = np.empty(m)
    db = np.empty(m)
    pot = np.empty(m)
    c = (0.0, 0.5, 0.5, 1.0)
    for _ in range(nsteps):
        a0[:] = a
        b0[:] = b
        for st in range(4):
            if st == 0:
                at[:] = a0
                bt[:] = b0
            else:
                w = c[st] * dtau
                for i in range(m):
                    at[i] = a0[i] + w * ka[st - 1, i]
                    bt[i] = b0[i] + w * kb[st - 1, i]
            wave_rhs(at, bt, da, db, pot, cl, cr, gcoef, h, vol, area, nbg, vext, kappa, offset,
                     eos_mode, eos_coeff, eos_exp, xc_mode, hbar, 0.0, floor, mask)
            # -H psi / hbar = -i (dpsi/dt) with dpsi/dt = da + i db
            for i in range(m):
                ka[st, i] = db[i]
                kb[st, i] = -da[i]
        w = dtau / 6.0
        for i in range(m):
            a[i] = a0[i] + w * (ka[0, i] + 2.0 * ka[1, i] + 2.0 * ka[2, i] + ka[3, i])
            b[i] = b0[i] + w * (kb[0, i] + 2.0 * kb[1, i] + 2.0 * kb[2, i] + kb[3, i])
        norm = 0.0
        for i in range(m):
            norm += vol[i] * (a[i] * a[i] + b[i] * b[i])
        f = math.sqrt(n_total / norm)
        for i in range(m):
            a[i] *= f
            b[i] *= f

"""Time integration, ground-state relaxation and perturbations of the QHD equations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from ..closures import (
    ClosureParams,
    PolytropicEOS,
    bohm_potential,
    v_correlation_brey,
    v_exchange_lda,
    v_xc,
)
from ..grid import Grid
from . import kernel
from .observables import mean_position, mean_radius, particle_number, rms_width
from .poisson import gauss_field, solve_poisson
from .systems import FluidSystem

__all__ = [
    "FluidState",
    "SolverConfig",
    "QHDSolver",
    "Perturbation",
    "RelaxationResult",
    "flow_residual",
    "DynamicsResult",
    "NumericalInstabilityError",
    "RelaxationError",
    "DT_SAFETY",
    "stability_limit",
    "wave_potential",
    "potential_gauge",
    "default_dt",
    "effective_force",
    "step",
    "relax_ground_state",
    "kick",
    "displace",
    "velocity_gradient_kick",
    "run_dynamics",
    "ground_state_profiles",
]

FLOOR_FRACTION = 1e-12
MASK_FACTOR = 10.0
SCHEMES = ("auto", "wave", "fluid")
# RK4 is stable for |omega dt| <= 2 sqrt(2) on the imaginary axis.  The
# stiffest mode is the grid-scale Bohm wave, omega = sqrt(zeta) |lambda| / 2
# with lambda the extreme eigenvalue of the discrete Laplacian.
RK4_IMAG_LIMIT = 2.0 * math.sqrt(2.0)
DT_SAFETY = 0.8


class NumericalInstabilityError(RuntimeError):
    def __init__(self, message: str, t: float):
        super().__init__(f"{message} at t = {t:.6g}")
        self.t = t


class RelaxationError(RuntimeError):
    def __init__(self, message: str, history):
        super().__init__(message)
        self.history = history


@dataclass
class FluidState:
    """Density on the grid nodes and velocity on the interior faces.

    States produced by the wave scheme also carry the complex amplitude
    ``psi`` (with |psi|^2 = n) so that repeated advances lose no phase
    information; it is dropped whenever n or u are replaced by hand.
    """

    n: np.ndarray
    u: np.ndarray
    t: float = 0.0
    psi: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.n = np.array(self.n, dtype=float)
        self.u = np.array(self.u, dtype=float)
        if self.psi is not None:
            self.psi = np.array(self.psi, dtype=complex)
        if self.n.ndim != 1 or self.u.shape != (self.n.size - 1,):
            raise ValueError("u must hold one value per face, i.e. len(n) - 1 entries")
        if not (np.all(np.isfinite(self.n)) and np.all(np.isfinite(self.u))):
            raise ValueError("state contains non-finite values")
        if np.any(self.n < 0):
            raise ValueError("density must be non-negative")

    @classmethod
    def at_rest(cls, n, t: float = 0.0) -> FluidState:
        n = np.asarray(n, dtype=float)
        return cls(n, np.zeros(n.size - 1), t)

    def copy(self, keep_psi: bool = True) -> FluidState:
        psi = self.psi.copy() if (keep_psi and self.psi is not None) else None
        return FluidState(self.n.copy(), self.u.copy(), self.t, psi)


def laplacian_spectral_radius(grid: Grid) -> float:
    """Largest |eigenvalue| of the conservative three-point Laplacian on ``grid``."""
    c = grid.face_areas / grid.spacing
    v = grid.volumes
    d = np.zeros(grid.n_points)
    d[:-1] -= c
    d[1:] -= c
    off = c / np.sqrt(v[:-1] * v[1:])
    lam = eigvalsh_tridiagonal(d / v, off, select="i", select_range=(0, 0))
    return float(-lam[0])


def stability_limit(grid: Grid, zeta: float, potential_span: float = 0.0) -> float:
    """Largest RK4 step for which the grid-scale Bohm wave stays stable.

    ``potential_span`` bounds |V| over the grid for the wave scheme, where the
    potential rotates the phase at V / hbar on top of the kinetic frequency.
    """
    if zeta <= 0:
        return math.inf
    hbar = math.sqrt(zeta)
    omega_max = 0.5 * hbar * laplacian_spectral_radius(grid) + abs(potential_span) / hbar
    return RK4_IMAG_LIMIT / omega_max


def wave_potential(system: FluidSystem, n, closure: ClosureParams, pressure: PolytropicEOS | None = None) -> np.ndarray:
    """Potential energy seen by psi at density ``n``, built as the wave kernel builds it."""
    grid = system.grid
    eos = pressure if pressure is not None else PolytropicEOS.fermi(1.0)
    floor = FLOOR_FRACTION * system.reference_density
    n = np.asarray(n, dtype=float)
    nf = np.maximum(n, floor)
    q = np.cumsum(grid.volumes * (n - system.background))
    phi = np.concatenate(([0.0], np.cumsum(grid.spacing * system.kappa / grid.face_areas
                                           * (q[:-1] - system.field_offset * q[-1]))))
    return -phi + np.asarray(eos.enthalpy(nf)) + np.asarray(v_xc(nf, closure.xc)) + system.v_ext


def potential_gauge(system: FluidSystem, closure: ClosureParams, pressure: PolytropicEOS | None = None,
                    n=None) -> tuple[float, float]:
    """(shift, span): the wave potential at the density maximum and a bound on |V - shift|.

    Subtracting a constant from the potential only changes the global phase
    of psi.  Taking it where the density peaks keeps the occupied region
    slowly rotating, and ``span`` (with a 25% margin for the evolving
    Hartree and pressure terms) enters :func:`stability_limit`.
    """
    if n is None:
        n = system.initial_density if system.initial_density is not None else system.background
    v = wave_potential(system, n, closure, pressure)
    shift = float(v[int(np.argmax(n))])
    return shift, 1.25 * float(np.max(np.abs(v - shift)))


def default_dt(system: FluidSystem, closure: ClosureParams, pressure: PolytropicEOS | None = None,
               sound_speed: float = 1.0) -> float:
    """``DT_SAFETY`` times the wave-scheme limit, capped by an advective CFL of 0.5."""
    grid = system.grid
    _, span = potential_gauge(system, closure, pressure) if closure.zeta > 0 else (0.0, 0.0)
    return min(DT_SAFETY * stability_limit(grid, closure.zeta, span), 0.5 * grid.spacing / sound_speed)


@dataclass(frozen=True)
class SolverConfig:
    """Numerical and closure settings of a run.

    ``pressure=None`` selects the zero-temperature Fermi pressure.  A
    ``density_floor`` or ``relaxation_friction`` of ``None`` is resolved per
    system: 1e-12 of the reference density and half the natural frequency.
    """

    dt: float
    t_end: float = 0.0
    closure: ClosureParams = field(default_factory=ClosureParams)
    pressure: PolytropicEOS | None = None
    density_floor: float | None = None
    relaxation_friction: float | None = None
    relaxation_tolerance: float = 1e-6
    max_relaxation_time: float = 20000.0
    sample_interval: float = 0.5
    scheme: str = "auto"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0 or self.sample_interval <= 0:
            raise ValueError("t_end must be >= 0 and sample_interval > 0")
        if self.density_floor is not None and not self.density_floor > 0:
            raise ValueError("density_floor must be positive")
        if self.relaxation_friction is not None and not self.relaxation_friction > 0:
            raise ValueError("relaxation_friction must be positive")
        if not self.relaxation_tolerance > 0:
            raise ValueError("relaxation_tolerance must be positive")

    def eos(self) -> PolytropicEOS:
        return self.pressure if self.pressure is not None else PolytropicEOS.fermi(1.0)

    def resolved_scheme(self) -> str:
        """``wave`` whenever a Bohm term is present, else ``fluid``."""
        if self.scheme == "auto":
            return "wave" if self.closure.zeta > 0 else "fluid"
        if self.scheme == "wave" and self.closure.zeta <= 0:
            raise ValueError("the wave scheme needs zeta > 0")
        return self.scheme


@dataclass(frozen=True)
class Perturbation:
    """Initial excitation.

    ``coulomb``: impulsive potential z tau / r, i.e. u += z tau / r^2.
    ``displacement``: rigid shift of the density by ``strength``.
    ``velocity_gradient``: u += strength * x, which excites the breathing mode.
    """

    kind: str
    strength: float
    tau: float = 1.0

    def __post_init__(self):
        if self.kind not in ("coulomb", "displacement", "velocity_gradient"):
            raise ValueError(f"unknown perturbation {self.kind!r}")


@dataclass
class RelaxationResult:
    state: FluidState
    history: list
    converged: bool
    friction: float
    polish_history: list = field(default_factory=list)


@dataclass
class DynamicsResult:
    times: np.ndarray
    observables: dict
    final_state: FluidState
    particle_number: float
    max_mass_drift: float
    max_flow: float
    steps: int
    dt: float


class QHDSolver:
    """Binds a discretised system to a configuration and drives the compiled kernels.

    Two discretisations of the same equations are available.  ``fluid``
    advances (n, u) on a staggered grid.  ``wave`` advances the Madelung
    amplitude psi = sqrt(n) exp(i S / hbar), hbar = sqrt(zeta), which stays
    regular where the density becomes vanishingly small.
    """

    def __init__(self, system: FluidSystem, config: SolverConfig):
        self.system = system
        self.config = config
        self.scheme = config.resolved_scheme()
        grid = system.grid
        zeta = config.closure.zeta
        shift, span = (0.0, 0.0)
        if self.scheme == "wave":
            shift, span = potential_gauge(system, config.closure, config.pressure)
        limit = stability_limit(grid, zeta, span)
        if config.dt > limit:
            raise ValueError(
                f"dt = {config.dt:.4g} exceeds the RK4 stability limit {limit:.4g} "
                f"for h = {grid.spacing:.4g}, zeta = {zeta:g}, potential span {span:.3g}"
            )
        self.hbar = math.sqrt(zeta)
        ref = system.reference_density
        self.floor = config.density_floor if config.density_floor is not None else FLOOR_FRACTION * ref
        self.mask = MASK_FACTOR * self.floor
        self.friction = (
            config.relaxation_friction
            if config.relaxation_friction is not None
            else 0.5 * system.natural_frequency
        )
        eos = config.eos()
        if eos.gamma == 1.0:
            mode, coeff, exp = kernel.EOS_LOG, eos.P_ref / eos.n_ref, 0.0
        else:
            mode = kernel.EOS_POWER
            coeff = eos.P_ref * eos.gamma / ((eos.gamma - 1.0) * eos.n_ref**eos.gamma)
            exp = eos.gamma - 1.0
        xc = {"none": kernel.XC_NONE, "lda_exchange": kernel.XC_X, "lda_exchange_plus_brey": kernel.XC_XC}
        self._geom = (
            grid.spacing,
            np.ascontiguousarray(grid.volumes),
            np.ascontiguousarray(grid.face_areas),
            np.ascontiguousarray(system.background, dtype=float),
            np.ascontiguousarray(system.v_ext - shift, dtype=float),
            float(system.kappa),
            float(system.field_offset),
        )
        self._closure = (mode, float(coeff), float(exp), xc[config.closure.xc])
        self.gauge = shift

    def set_gauge(self, shift: float) -> None:
        """Measure the wave-scheme potential from ``shift``; only the global phase of psi changes."""
        g = self._geom
        self.gauge = float(shift)
        self._geom = g[:4] + (np.ascontiguousarray(self.system.v_ext - self.gauge, dtype=float),) + g[5:]

    def chemical_potential(self, state: FluidState) -> float:
        """<psi|H|psi> / N, the rotation rate (times hbar) of a stationary state."""
        if self.scheme != "wave":
            raise ValueError("the chemical potential is defined through the wave scheme")
        psi = self.to_wave(state)
        a, b = np.ascontiguousarray(psi.real), np.ascontiguousarray(psi.imag)
        da, db = np.empty_like(a), np.empty_like(b)
        cl, cr, gcoef = kernel.wave_coefficients(*self._geom[:3], self._geom[5])
        kernel.wave_rhs(a, b, da, db, np.empty_like(a), cl, cr, gcoef, *self._geom, *self._closure,
                        self.hbar, 0.0, self.floor, self.mask)
        vol = self.grid.volumes
        # H psi = i hbar dpsi/dt
        return self.gauge + self.hbar * float(np.sum(vol * (b * da - a * db)) / np.sum(vol * (a * a + b * b)))

    def wave_residual(self, state: FluidState) -> float:
        """||(H - mu) psi|| / (||psi|| hbar omega) with mu the current gauge.

        Unlike the flow and dn/dt residuals this is not weighted towards the
        bulk: unbound amplitude in the tails or in a cavity shows up in full.
        """
        psi = self.to_wave(state)
        a, b = np.ascontiguousarray(psi.real), np.ascontiguousarray(psi.imag)
        da, db = np.empty_like(a), np.empty_like(b)
        cl, cr, gcoef = kernel.wave_coefficients(*self._geom[:3], self._geom[5])
        kernel.wave_rhs(a, b, da, db, np.empty_like(a), cl, cr, gcoef, *self._geom, *self._closure,
                        self.hbar, 0.0, self.floor, self.mask)
        vol = self.grid.volumes
        norm = math.sqrt(float(np.sum(vol * (da * da + db * db)) / np.sum(vol * (a * a + b * b))))
        return norm / self.system.natural_frequency

    def imaginary_time(self, state: FluidState, nsteps: int, n_total: float) -> FluidState:
        """``nsteps`` RK4 steps of dpsi/dtau = -(H - mu) psi / hbar at fixed norm ``n_total``."""
        if self.scheme != "wave":
            raise ValueError("imaginary-time steps need the wave scheme")
        psi = self.to_wave(state)
        a, b = np.ascontiguousarray(psi.real), np.ascontiguousarray(psi.imag)
        kernel.advance_imaginary(a, b, int(nsteps), self.config.dt, float(n_total), *self._geom,
                                 *self._closure, self.hbar, self.floor, self.mask)
        n = a * a + b * b
        return FluidState(n, np.zeros(n.size - 1), state.t, a + 1j * b)

    def regauge(self, state: FluidState) -> None:
        """Put the zero of the potential at the chemical potential of ``state``.

        A stationary state then barely rotates, which keeps the RK4 error of the
        nonlinear terms (and with it the particle-number drift) small.
        """
        if self.scheme == "wave":
            self.set_gauge(self.chemical_potential(state))

    @property
    def grid(self) -> Grid:
        return self.system.grid

    def prepare(self, n) -> FluidState:
        """Put a density profile at rest; the fluid scheme also floors it.

        The wave scheme applies the floor only inside the potential.  Raising
        |psi|^2 itself would plant amplitude in the classically forbidden tails
        that is far from stationary and radiates into the occupied region.
        """
        n = np.asarray(n, dtype=float)
        if np.any(n < 0) or not np.all(np.isfinite(n)):
            raise ValueError("density must be finite and non-negative")
        if self.scheme == "fluid":
            n = np.maximum(n, self.floor)
        return self._attach(FluidState.at_rest(n.copy()))

    def apply_mask(self, state: FluidState) -> FluidState:
        out = state.copy(keep_psi=False)
        out.u[0.5 * (out.n[1:] + out.n[:-1]) < self.mask] = 0.0
        return self._attach(out)

    # wave representation -------------------------------------------------
    def to_wave(self, state: FluidState) -> np.ndarray:
        if state.psi is not None:
            return state.psi.copy()
        phase = np.concatenate(([0.0], np.cumsum(state.u * self.grid.spacing))) / self.hbar
        return np.sqrt(state.n) * np.exp(1j * phase)

    def from_wave(self, psi: np.ndarray, t: float) -> FluidState:
        a, b = np.ascontiguousarray(psi.real), np.ascontiguousarray(psi.imag)
        n = a * a + b * b
        u = np.empty(n.size - 1)
        kernel.face_velocity(a, b, self.hbar, self.grid.spacing, self.mask, u)
        return FluidState(n, u, t, psi.copy())

    def _attach(self, state: FluidState) -> FluidState:
        if self.scheme == "wave" and state.psi is None:
            state.psi = self.to_wave(state)
        return state

    # evolution -----------------------------------------------------------
    def rhs(self, state: FluidState, friction: float = 0.0):
        """Time derivatives (dn/dt, du/dt); du/dt is only available for the fluid scheme."""
        if self.scheme == "wave":
            psi = self.to_wave(state)
            a, b = np.ascontiguousarray(psi.real), np.ascontiguousarray(psi.imag)
            da, db = np.empty_like(a), np.empty_like(b)
            cl, cr, gcoef = kernel.wave_coefficients(*self._geom[:3], self._geom[5])
            kernel.wave_rhs(a, b, da, db, np.empty_like(a), cl, cr, gcoef, *self._geom, *self._closure,
                            self.hbar, float(friction), self.floor, self.mask)
            return 2.0 * (a * da + b * db), None
        n, u = state.n, state.u
        dn, du, phi = np.empty_like(n), np.empty_like(u), np.empty_like(n)
        kernel.rhs(n, u, dn, du, phi, *self._geom, self.config.closure.zeta, *self._closure,
                   float(friction), self.floor, self.mask)
        return dn, du

    def advance(self, state: FluidState, nsteps: int, friction: float = 0.0) -> FluidState:
        t = state.t + nsteps * self.config.dt
        if self.scheme == "wave":
            psi = self.to_wave(state)
            a, b = np.ascontiguousarray(psi.real), np.ascontiguousarray(psi.imag)
            kernel.advance_wave(a, b, int(nsteps), self.config.dt, *self._geom, *self._closure,
                                self.hbar, float(friction), self.floor, self.mask)
            if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
                raise NumericalInstabilityError("non-finite wave amplitude", t)
            return self.from_wave(a + 1j * b, t)
        out = state.copy(keep_psi=False)
        kernel.advance(out.n, out.u, int(nsteps), self.config.dt, *self._geom, self.config.closure.zeta,
                       *self._closure, float(friction), self.floor, self.mask)
        out.t = t
        if not (np.all(np.isfinite(out.n)) and np.all(np.isfinite(out.u))):
            raise NumericalInstabilityError("non-finite field values", out.t)
        return out

    def step(self, state: FluidState) -> FluidState:
        return self.advance(state, 1)


def effective_force(state: FluidState, system: FluidSystem, config: SolverConfig,
                    floor: float | None = None) -> np.ndarray:
    """Face acceleration of the undamped Euler equation, assembled from the closures.

    This is an independent NumPy route to the compiled right-hand side.
    """
    grid = system.grid
    if floor is None:
        floor = config.density_floor or FLOOR_FRACTION * system.reference_density
    n = np.asarray(state.n, dtype=float)
    nf = np.maximum(n, floor)
    cl = config.closure
    u2 = np.concatenate(([0.0], state.u**2, [0.0]))
    kinetic = 0.25 * (u2[:-1] + u2[1:])
    potential = (
        kinetic
        + np.asarray(config.eos().enthalpy(nf))
        + np.asarray(v_xc(nf, cl.xc))
        + bohm_potential(nf, grid, cl.zeta, floor=floor)
        + system.v_ext
    )
    force = -grid.face_gradient(potential) + gauss_field(n - system.background, grid, system.kappa, system.field_offset)
    force[0.5 * (n[1:] + n[:-1]) < MASK_FACTOR * floor] = 0.0
    return force


def step(state: FluidState, system: FluidSystem, config: SolverConfig) -> FluidState:
    """One RK4 step of the undamped equations."""
    return QHDSolver(system, config).step(state)


def flow_residual(state: FluidState) -> float:
    """max |n_face u| / max n: the velocity weighted by the relative face density.

    In the evanescent tails the velocity of an essentially empty region is
    not meaningful, so the plain max |u| is not used as a stopping criterion.
    """
    n_face = 0.5 * (state.n[1:] + state.n[:-1])
    return float(np.max(np.abs(n_face * state.u)) / np.max(state.n))


def _residuals(solver: QHDSolver, state: FluidState):
    dn, _ = solver.rhs(state)
    dn_rel = float(np.max(np.abs(dn)) / (np.max(state.n) * solver.system.natural_frequency))
    return flow_residual(state), dn_rel


def _renormalised(state: FluidState, factor: float) -> FluidState:
    psi = state.psi * math.sqrt(factor) if state.psi is not None else None
    return FluidState(state.n * factor, state.u.copy(), state.t, psi)


def relax_ground_state(system: FluidSystem, config: SolverConfig, initial=None,
                       check_interval: float | None = None) -> RelaxationResult:
    """Damped fictitious dynamics until the flow and the density both come to rest.

    Convergence requires :func:`flow_residual` and max|dn/dt| / (omega max n)
    below ``config.relaxation_tolerance``.  The initial profile, and the
    state after every check interval, is rescaled to the system's electron
    count.

    Both residuals are density weighted, and the friction acts only through
    the flow, so unbound amplitude left in the tails or a cavity by the
    initial transient survives them.  Released, it beats against the ground
    state and drives a spurious oscillation.  With the wave scheme the damped
    stage is therefore followed by imaginary-time steps until
    :meth:`QHDSolver.wave_residual` is also below the tolerance.
    """
    solver = QHDSolver(system, config)
    grid = system.grid
    if initial is None:
        initial = system.initial_density
    n = np.maximum(np.asarray(initial, dtype=float), solver.floor)
    state = solver.prepare(n * (system.n_electrons / particle_number(n, grid)))
    solver.regauge(state)
    nu = solver.friction
    if check_interval is None:
        check_interval = 2.0 / system.natural_frequency
    chunk = max(1, int(round(check_interval / config.dt)))
    tol = config.relaxation_tolerance
    history = []
    while True:
        state = solver.advance(state, chunk, friction=nu)
        # the damped dynamics is fictitious, so the electron count is restored each chunk
        state = _renormalised(state, system.n_electrons / particle_number(state.n, grid))
        solver.regauge(state)
        u_inf, dn_rel = _residuals(solver, state)
        history.append((state.t, u_inf, dn_rel))
        if u_inf < tol and dn_rel < tol:
            break
        if state.t >= config.max_relaxation_time:
            raise RelaxationError(
                f"relaxation did not converge by t = {state.t:.1f}: max|u| = {u_inf:.3e}, "
                f"density residual = {dn_rel:.3e}, tolerance {tol:.1e}",
                history,
            )
    polish = []
    if solver.scheme == "wave":
        tau = 0.0
        while True:
            res = solver.wave_residual(state)
            polish.append((tau, res))
            if res < tol:
                break
            if state.t + tau >= config.max_relaxation_time:
                raise RelaxationError(
                    f"imaginary-time polish did not converge by tau = {tau:.1f}: "
                    f"wave residual = {res:.3e}, tolerance {tol:.1e}",
                    history,
                )
            state = solver.imaginary_time(state, chunk, system.n_electrons)
            solver.regauge(state)
            tau += chunk * config.dt
    return RelaxationResult(solver.prepare(state.n), history, True, nu, polish)


def kick(state: FluidState, grid, z: float, tau: float = 1.0) -> FluidState:
    """Integrate the impulsive potential z tau delta(t) / r: u += z tau / r^2 at the faces."""
    if not grid.is_spherical:
        raise ValueError("the Coulomb kick is defined for spherical grids")
    # the amplitude is rebuilt from (n, u) by whichever solver takes the state next
    out = state.copy(keep_psi=False)
    out.u += z * tau / grid.faces**2
    return out


def displace(state: FluidState, grid, delta: float) -> FluidState:
    """Rigidly shift the density by ``delta`` (Cartesian grids); mass is restored exactly."""
    if grid.is_spherical:
        raise ValueError("rigid displacement needs a Cartesian grid")
    n = np.interp(grid.x - delta, grid.x, state.n, left=state.n[0], right=state.n[-1])
    n *= particle_number(state.n, grid) / particle_number(n, grid)
    return FluidState(n, state.u.copy(), state.t)


def velocity_gradient_kick(state: FluidState, grid, epsilon: float) -> FluidState:
    """u += epsilon * x, the linear flow that excites the breathing mode."""
    out = state.copy(keep_psi=False)
    out.u += epsilon * grid.faces
    return out


def _apply(perturbation: Perturbation | None, state: FluidState, grid) -> FluidState:
    if perturbation is None:
        return state.copy()
    if perturbation.kind == "coulomb":
        return kick(state, grid, perturbation.strength, perturbation.tau)
    if perturbation.kind == "displacement":
        return displace(state, grid, perturbation.strength)
    return velocity_gradient_kick(state, grid, perturbation.strength)


def _observe(grid, n):
    if grid.is_spherical:
        return {"mean_radius": mean_radius(n, grid)}
    return {"mean_position": mean_position(n, grid), "width": rms_width(n, grid)}


def run_dynamics(ground: FluidState, system: FluidSystem, config: SolverConfig,
                 perturbation: Perturbation | None = None, progress=None) -> DynamicsResult:
    """Perturb ``ground`` and integrate without friction up to ``config.t_end``.

    Observables are sampled every ``sample_interval`` (rounded to whole
    steps): <r> on spherical grids, <x> and the rms width on Cartesian ones.
    """
    solver = QHDSolver(system, config)
    grid = system.grid
    solver.regauge(solver.prepare(ground.n))
    state = solver.apply_mask(_apply(perturbation, ground, grid))
    state.t = 0.0
    stride = max(1, int(round(config.sample_interval / config.dt)))
    n_samples = int(config.t_end / (stride * config.dt)) + 1
    n_ref = particle_number(state.n, grid)
    series = {k: np.empty(n_samples) for k in _observe(grid, state.n)}
    times = np.empty(n_samples)
    drift = 0.0
    flow = 0.0
    for j in range(n_samples):
        if j:
            state = solver.advance(state, stride)
        times[j] = state.t
        for key, value in _observe(grid, state.n).items():
            series[key][j] = value
        drift = max(drift, abs(particle_number(state.n, grid) - n_ref) / n_ref)
        flow = max(flow, flow_residual(state))
        if progress is not None:
            progress(j, n_samples)
    return DynamicsResult(times, series, state, n_ref, drift, flow, (n_samples - 1) * stride, config.dt)


def ground_state_profiles(state: FluidState, system: FluidSystem, config: SolverConfig) -> dict:
    """Columns of the ground-state profile: r, n, n_i, V_H, V_x, V_c, V_B.

    V_H follows the solver convention lap(V_H) = kappa (n - n_i) with the
    electron force +grad(V_H); the other potentials are electron energies.
    """
    grid = system.grid
    floor = config.density_floor or FLOOR_FRACTION * system.reference_density
    nf = np.maximum(state.n, floor)
    xc = config.closure.xc
    zeros = np.zeros_like(nf)
    return {
        "r": grid.x.copy(),
        "n": state.n.copy(),
        "n_i": system.background.copy(),
        "V_H": solve_poisson(state.n - system.background, grid, system.kappa),
        "V_x": np.asarray(v_exchange_lda(nf)) if xc != "none" else zeros,
        "V_c": np.asarray(v_correlation_brey(nf)) if xc == "lda_exchange_plus_brey" else zeros,
        "V_B": bohm_potential(nf, grid, config.closure.zeta, floor=floor),
    }

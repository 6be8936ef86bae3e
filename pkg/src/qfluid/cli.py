"""Command-line front end: ``qfluid [command] --config cfg.yaml --output dir``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O
failure.  On failure a JSON error record is printed to stderr and, when
possible, written to ``error.json`` in the output directory.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .closures import ClosureParams
from .config import ConfigError, RunConfig, config_from_dict, parse_config
from .dispersion import (
    AcousticParams,
    FitConditioningError,
    LangmuirParams,
    ModelValidityError,
    match_closure,
    mean_square_velocity,
    omega2_acoustic_fluid,
    omega2_acoustic_kinetic,
    omega2_langmuir_fluid,
    omega2_langmuir_kinetic,
)
from .io import read_csv, write_csv, write_json
from .qhd import (
    FluidState,
    HarmonicWell,
    NumericalInstabilityError,
    Perturbation,
    RelaxationError,
    SolverConfig,
    build_jellium,
    ground_state_profiles,
    relax_ground_state,
    run_dynamics,
)
from .qhd.solver import potential_gauge, stability_limit
from .spectral import TimeSeries, find_peaks, spectrum
from .variational import (
    IntegrationError,
    QuadratureError,
    Well1DParams,
    Well3DParams,
    breathing_frequency,
    coverage,
    default_alpha,
    equilibrium_sigma,
    equilibrium_widths,
    excitation_state,
    integrate_3d,
    lyapunov_max,
    poincare_section,
)

__all__ = ["EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERICAL", "EXIT_IO", "run", "main"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

NUMERICAL_ERRORS = (
    NumericalInstabilityError,
    RelaxationError,
    IntegrationError,
    QuadratureError,
    FitConditioningError,
    ModelValidityError,
    FloatingPointError,
    np.linalg.LinAlgError,
)

log = logging.getLogger("qfluid")


# -- systems -----------------------------------------------------------------

def _build(params):
    """(model, FluidSystem, SolverConfig factory arguments) for a ground-state/dynamics config."""
    s = params.system
    closure = ClosureParams(**params.closure.model_dump())
    if s.kind == "nanoshell":
        model = build_jellium(s.R, s.Delta, s.r_s)
        grid = model.default_grid(s.n_points, s.margin)
        pressure = None
        sound = (3.0 * math.pi**2 * model.n0) ** (1.0 / 3.0)
    else:
        model = HarmonicWell(s.omega0, s.A, s.H, s.n_bar)
        grid = model.default_grid(s.n_points, s.half_width)
        pressure = model.pressure()
        sound = math.sqrt(3.0) * model.A / model.width_guess / s.n_bar
    system = model.system(grid)
    span = potential_gauge(system, closure, pressure)[1] if closure.zeta > 0 else 0.0
    dt = min(params.solver.dt_safety * stability_limit(grid, closure.zeta, span), 0.5 * grid.spacing / sound)
    return model, system, closure, pressure, dt


def _solver_config(params, closure, pressure, dt, **extra) -> SolverConfig:
    return SolverConfig(
        dt=dt,
        closure=closure,
        pressure=pressure,
        relaxation_friction=params.solver.relaxation_friction,
        relaxation_tolerance=params.solver.relaxation_tolerance,
        max_relaxation_time=params.solver.max_relaxation_time,
        **extra,
    )


_PROFILE_UNITS = {"r": "bohr", "n": "bohr^-3", "n_i": "bohr^-3", "V_H": "hartree",
                  "V_x": "hartree", "V_c": "hartree", "V_B": "hartree"}


# -- commands ----------------------------------------------------------------

def _cmd_dispersion(p, out: Path) -> dict:
    k = np.linspace(0.0, p.k_max, p.n_k)
    notes = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if p.regime == "langmuir":
            if p.distribution == "maxwell":
                v2 = mean_square_velocity("maxwell", T=p.temperature)
            else:
                v2 = mean_square_velocity("fermi", E_F=p.fermi_energy)
            lp = LangmuirParams(p.omega_p, v2, p.gamma, p.zeta)
            fluid = omega2_langmuir_fluid(k, lp)
            kinetic = omega2_langmuir_kinetic(k, LangmuirParams(p.omega_p, v2))
            match = match_closure("langmuir", p.gamma, p.zeta, omega_p=p.omega_p, v2_mean=v2)
        else:
            ap = AcousticParams(p.lambda_D, p.omega_pi, p.H, p.gamma, p.zeta)
            fluid = omega2_acoustic_fluid(k, ap)
            kinetic = omega2_acoustic_kinetic(k, ap)
            match = match_closure("acoustic", p.gamma, p.zeta, H=p.H, lambda_D=p.lambda_D, omega_pi=p.omega_pi)
    notes = sorted({str(w.message) for w in caught})
    write_csv(out / "dispersion.csv", {"k": k, "omega2_fluid": fluid, "omega2_kinetic": kinetic},
              {"k": "bohr^-1", "omega2_fluid": "hartree^2", "omega2_kinetic": "hartree^2"})
    record = {
        "orders": list(match.orders),
        "kinetic": match.kinetic.tolist(),
        "fluid": match.fluid.tolist(),
        "difference": match.difference.tolist(),
        "relative_difference": match.relative_difference.tolist(),
        "condition": match.condition,
    }
    write_json(out / "closure_match.json", record)
    return {"closure_match": record, "warnings": notes}


def _cmd_ground_state(p, out: Path) -> dict:
    model, system, closure, pressure, dt = _build(p)
    cfg = _solver_config(p, closure, pressure, dt)
    res = relax_ground_state(system, cfg)
    prof = ground_state_profiles(res.state, system, cfg)
    if p.system.kind == "harmonic_well":
        prof = {("x" if k == "r" else k): v for k, v in prof.items()}
        units = {k: "scaled" for k in prof}
    else:
        units = _PROFILE_UNITS
    write_csv(out / "ground_state.csv", prof, units)
    t, flow, dn = res.history[-1]
    diag = {"N": float(system.n_electrons), "dt": dt, "relaxation_time": t,
            "flow_residual": flow, "density_residual": dn, "friction": res.friction}
    if res.polish_history:
        diag["imaginary_time"], diag["wave_residual"] = res.polish_history[-1]
    return diag


def _cmd_dynamics(p, out: Path) -> dict:
    model, system, closure, pressure, dt = _build(p)
    cfg = _solver_config(p, closure, pressure, dt, t_end=p.t_end, sample_interval=p.sample_interval)
    if p.ground_state:
        cols, _ = read_csv(p.ground_state)
        n = cols["n"]
        if n.size != system.grid.n_points:
            raise ConfigError(
                f"parameters.ground_state: profile has {n.size} points, the grid has {system.grid.n_points}"
            )
        ground = FluidState.at_rest(n)
    else:
        ground = relax_ground_state(system, cfg).state
    pert = Perturbation(p.perturbation.kind, p.perturbation.strength, p.perturbation.tau)
    res = run_dynamics(ground, system, cfg, pert)
    cols = {"t": res.times, **res.observables}
    length = "bohr" if p.system.kind == "nanoshell" else "scaled"
    units = {k: length for k in cols}
    units["t"] = "hbar/hartree" if p.system.kind == "nanoshell" else "1/omega0"
    write_csv(out / "dynamics.csv", cols, units)
    return {"N": float(system.n_electrons), "dt": dt, "steps": res.steps,
            "max_mass_drift": res.max_mass_drift, "max_flow": res.max_flow}


def _cmd_spectrum(p, out: Path) -> dict:
    cols, _ = read_csv(p.input)
    if p.column not in cols or "t" not in cols:
        raise ConfigError(f"parameters.column: {p.input} has no columns 't' and {p.column!r}")
    series = TimeSeries.from_samples(cols["t"], cols[p.column], p.column)
    spec = spectrum(series, p.window)
    write_csv(out / "spectrum.csv", {"omega_eV": spec.omega_eV, "amplitude": spec.amplitude},
              {"omega_eV": "eV", "amplitude": "arb"})
    peaks = [{"frequency_eV": pk.frequency_eV, "frequency": pk.frequency,
              "amplitude": pk.amplitude, "prominence": pk.prominence}
             for pk in find_peaks(spec, p.min_prominence)]
    write_json(out / "peaks.json", peaks)
    return {"resolution_eV": spec.resolution_eV, "n_samples": spec.n_samples, "n_peaks": len(peaks)}


def _cmd_variational_1d(p, out: Path) -> dict:
    A = np.linspace(p.A_min, p.A_max, p.n_A)
    omega = np.array([breathing_frequency(Well1DParams(a, p.H, p.n_bar)) for a in A])
    sigma = np.array([equilibrium_sigma(Well1DParams(a, p.H, p.n_bar)) for a in A])
    write_csv(out / "breathing.csv", {"A": A, "Omega": omega, "sigma_eq": sigma},
              {"A": "scaled", "Omega": "omega0", "sigma_eq": "scaled"})
    return {"Omega_first": float(omega[0]), "Omega_last": float(omega[-1])}


def _well3d(p):
    params = Well3DParams.derived(p.k, p.zeta_anh, p.N)
    return params, excitation_state(params, p.delta)


_TRAJ_COLUMNS = ("d_x", "d_y", "d_z", "sigma_x", "sigma_y", "sigma_z")


def _cmd_variational_3d(p, out: Path) -> dict:
    params, start = _well3d(p)
    traj = integrate_3d(start, params, p.t_end, sample_every=p.sample_every)
    cols = {"t": traj.t, **{c: traj.y[:, j] for j, c in enumerate(_TRAJ_COLUMNS)}, "E": traj.energy}
    write_csv(out / "trajectory.csv", cols, {k: "scaled" for k in cols})
    a = default_alpha()
    return {"dt": traj.dt, "max_relative_energy_drift": traj.max_relative_drift,
            "warnings": list(traj.warnings), "sigma_eq": equilibrium_widths(params).tolist(),
            "alpha": [a.alpha1, a.alpha2, a.alpha3, a.alpha4], "beta": a.beta,
            "beta_convention": a.convention}


def _cmd_poincare(p, out: Path) -> dict:
    params, start = _well3d(p)
    traj = integrate_3d(start, params, p.t_end, sample_every=p.sample_every)
    ps = poincare_section(traj, p.surface)
    write_csv(out / "poincare.csv", {"d_x": ps.points[:, 0], "d_y": ps.points[:, 1]},
              {"d_x": "scaled", "d_y": "scaled"})
    result = {"surface": ps.surface, "n_points": len(ps), "warnings": list(ps.warnings + traj.warnings),
              "coverage": coverage(ps.points) if len(ps) else None,
              "max_relative_energy_drift": traj.max_relative_drift}
    if p.lyapunov_t_end > 0:
        lyap = lyapunov_max(params, start, p.lyapunov_t_end, p.lyapunov_interval)
        result["lyapunov"] = lyap.exponent
        write_csv(out / "lyapunov.csv", {"t": lyap.times, "estimate": lyap.trace},
                  {"t": "scaled", "estimate": "1/scaled"})
    return result


def _sweep_child(args):
    data, out_dir = args
    cfg = config_from_dict({**data, "output_dir": out_dir})
    return run(cfg)


def _cmd_sweep(p, out: Path, workers: int | None = None) -> dict:
    jobs = []
    for i, data in enumerate(p.runs):
        cfg = config_from_dict({**data, "output_dir": "."})  # validate before launching anything
        if cfg.command == "sweep":
            raise ConfigError(f"parameters.runs.{i}: nested sweeps are not supported")
        jobs.append((data, str(out / f"{i:03d}_{cfg.name}")))
    n_workers = workers or p.workers
    if n_workers <= 1:
        codes = [_sweep_child(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            codes = list(pool.map(_sweep_child, jobs))
    return {"runs": [Path(j[1]).name for j in jobs], "exit_codes": codes}


COMMAND_TABLE = {
    "dispersion": _cmd_dispersion,
    "ground-state": _cmd_ground_state,
    "dynamics": _cmd_dynamics,
    "spectrum": _cmd_spectrum,
    "variational-1d": _cmd_variational_1d,
    "variational-3d": _cmd_variational_3d,
    "poincare": _cmd_poincare,
    "sweep": _cmd_sweep,
}


# -- orchestration -----------------------------------------------------------

def _error_record(exc: BaseException, code: int) -> dict:
    return {"error": type(exc).__name__, "message": str(exc), "exit_code": code}


def _fail(exc: BaseException, code: int, out: Path | None) -> int:
    record = _error_record(exc, code)
    print(json.dumps(record), file=sys.stderr)
    if out is not None:
        try:
            write_json(out / "error.json", record)
        except OSError:
            pass
    return code


def run(config: RunConfig, workers: int | None = None) -> int:
    """Execute one configuration and write its artifacts plus ``metadata.json``."""
    out = Path(config.output_dir)
    started = time.time()
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        return _fail(exc, EXIT_IO, None)
    try:
        handler = COMMAND_TABLE[config.command]
        if config.command == "sweep":
            result = handler(config.parameters, out, workers)
        else:
            with np.errstate(over="raise", invalid="raise", divide="ignore", under="ignore"):
                result = handler(config.parameters, out)
        write_json(out / "metadata.json", {
            "config": config.to_dict(),
            "version": __version__,
            "started": started,
            "elapsed_s": time.time() - started,
            "result": result,
        })
    except ConfigError as exc:
        return _fail(exc, EXIT_CONFIG, out)
    except NUMERICAL_ERRORS as exc:
        return _fail(exc, EXIT_NUMERICAL, out)
    except OSError as exc:
        return _fail(exc, EXIT_IO, out)
    if config.command == "sweep" and any(result["exit_codes"]):
        return max(result["exit_codes"])
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qfluid", description=__doc__.splitlines()[0])
    parser.add_argument("command", nargs="?", help="optional; must match the config's command")
    parser.add_argument("--config", required=True, help="YAML or JSON run configuration")
    parser.add_argument("--output", help="output directory (overrides output_dir)")
    parser.add_argument("--workers", type=int, help="parallel workers for sweep")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.output) if args.output else None
    try:
        cfg = parse_config(args.config)
        if args.command is not None and args.command != cfg.command:
            raise ConfigError(f"command: the config is for {cfg.command!r}, not {args.command!r}")
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        if out is not None:
            cfg = config_from_dict({**cfg.to_dict(), "output_dir": str(out)})
    except ConfigError as exc:
        return _fail(exc, EXIT_CONFIG, None)
    except OSError as exc:
        return _fail(exc, EXIT_IO, None)
    log.info("running %s into %s", cfg.command, cfg.output_dir)
    return run(cfg, args.workers)


if __name__ == "__main__":
    sys.exit(main())

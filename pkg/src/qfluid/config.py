"""Run configuration: a validated tree parsed from YAML (or JSON)."""
from __future__ import annotations

from pathlib import Path
from typing import Annotated, Literal, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

__all__ = [
    "COMMANDS",
    "ConfigError",
    "RunConfig",
    "parse_config",
    "config_from_dict",
    "config_from_metadata",
]

COMMANDS = (
    "dispersion",
    "ground-state",
    "dynamics",
    "spectrum",
    "variational-1d",
    "variational-3d",
    "poincare",
    "sweep",
)

Positive = Annotated[float, Field(gt=0)]
NonNegative = Annotated[float, Field(ge=0)]


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key and constraint."""


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ClosureConfig(Strict):
    gamma: Positive = 5.0 / 3.0
    zeta: NonNegative = 1.0
    xc: Literal["none", "lda_exchange", "lda_exchange_plus_brey"] = "lda_exchange_plus_brey"


class NanoshellConfig(Strict):
    kind: Literal["nanoshell"] = "nanoshell"
    R: Positive = 40.0
    Delta: Positive = 25.0
    r_s: Positive = 4.0
    n_points: Annotated[int, Field(ge=16)] = 2000
    margin: Positive = 30.0

    @model_validator(mode="after")
    def _hollow(self):
        if self.R <= self.Delta / 2.0:
            raise ValueError("R must exceed Delta / 2 (the inner radius must be positive)")
        return self


class WellConfig(Strict):
    kind: Literal["harmonic_well"] = "harmonic_well"
    A: Positive = 1.0
    H: Positive = 0.5
    n_bar: Positive = 1.0
    omega0: Positive = 1.0
    n_points: Annotated[int, Field(ge=16)] = 801
    half_width: Positive | None = None


SystemConfig = Annotated[Union[NanoshellConfig, WellConfig], Field(discriminator="kind")]


class SolverSettings(Strict):
    dt_safety: Annotated[float, Field(gt=0, le=1)] = 0.8
    relaxation_tolerance: Positive = 1e-6
    max_relaxation_time: Positive = 20000.0
    relaxation_friction: Positive | None = None


class DispersionParams(Strict):
    regime: Literal["langmuir", "acoustic"] = "langmuir"
    gamma: Positive = 3.0
    zeta: NonNegative = 1.0
    omega_p: Positive = 1.0
    distribution: Literal["maxwell", "fermi"] = "maxwell"
    temperature: NonNegative = 1.0
    fermi_energy: NonNegative = 0.0
    lambda_D: Positive = 1.0
    omega_pi: Positive = 1.0
    H: NonNegative = 0.0
    k_max: Positive = 0.3
    n_k: Annotated[int, Field(ge=2)] = 61


class GroundStateParams(Strict):
    system: SystemConfig = Field(default_factory=NanoshellConfig)
    closure: ClosureConfig = Field(default_factory=ClosureConfig)
    solver: SolverSettings = Field(default_factory=SolverSettings)

    @model_validator(mode="before")
    @classmethod
    def _defaults(cls, data):
        """Default the system kind to a nanoshell and resolve the closure from the system.

        A harmonic well defaults to the 1D Fermi closure (gamma = 3) with
        zeta = H^2 and no exchange-correlation.
        """
        if not isinstance(data, dict):
            return data
        data = dict(data)
        system = data.get("system", {})
        if isinstance(system, dict) and "kind" not in system:
            system = {"kind": "nanoshell", **system}
            data["system"] = system
        if data.get("closure") is None:
            if isinstance(system, WellConfig) or (isinstance(system, dict) and system.get("kind") == "harmonic_well"):
                H = system.H if isinstance(system, WellConfig) else system.get("H", WellConfig().H)
                data["closure"] = {"gamma": 3.0, "zeta": float(H) ** 2, "xc": "none"}
            else:
                data["closure"] = {}
        return data


class PerturbationConfig(Strict):
    kind: Literal["coulomb", "displacement", "velocity_gradient"] = "coulomb"
    strength: float = 1.0
    tau: Positive = 1.0


class DynamicsParams(GroundStateParams):
    ground_state: str | None = None
    perturbation: PerturbationConfig = Field(default_factory=PerturbationConfig)
    t_end: Positive = 1710.0
    sample_interval: Positive = 0.5


class SpectrumParams(Strict):
    input: str
    column: str = "mean_radius"
    window: Literal["none", "hann"] = "hann"
    min_prominence: Annotated[float, Field(gt=0, lt=1)] = 0.05


class Variational1DParams(Strict):
    H: Positive = 0.5
    n_bar: Positive = 1.0
    A_min: NonNegative = 0.0
    A_max: NonNegative = 50.0
    n_A: Annotated[int, Field(ge=2)] = 201

    @model_validator(mode="after")
    def _range(self):
        if self.A_max < self.A_min:
            raise ValueError("A_max must not be below A_min")
        return self


class Variational3DParams(Strict):
    k: tuple[Positive, Positive, Positive] = (5.0, 5.0, 1.0)
    zeta_anh: NonNegative = 0.01
    N: Positive = 50.0
    delta: float = 0.01
    t_end: Positive = 1000.0
    sample_every: Annotated[int, Field(ge=1)] = 16


class PoincareParams(Variational3DParams):
    t_end: Positive = 5000.0
    sample_every: Annotated[int, Field(ge=1)] = 4
    surface: Literal["auto", "d_z", "sigma_z"] = "auto"
    lyapunov_t_end: NonNegative = 2000.0
    lyapunov_interval: Positive = 1.0


class SweepParams(Strict):
    runs: list[dict] = Field(min_length=1)
    workers: Annotated[int, Field(ge=1)] = 1


PARAMS = {
    "dispersion": DispersionParams,
    "ground-state": GroundStateParams,
    "dynamics": DynamicsParams,
    "spectrum": SpectrumParams,
    "variational-1d": Variational1DParams,
    "variational-3d": Variational3DParams,
    "poincare": PoincareParams,
    "sweep": SweepParams,
}


class RunConfig(Strict):
    """A command, its fully-resolved parameters and the output directory.

    Every algorithm is deterministic; there is no random seed.
    """

    command: Literal[COMMANDS]  # type: ignore[valid-type]
    name: str = "run"
    output_dir: str = "output"
    parameters: Union[tuple(PARAMS.values())]  # type: ignore[valid-type]

    @model_validator(mode="before")
    @classmethod
    def _typed_parameters(cls, data):
        if isinstance(data, dict) and data.get("command") in PARAMS:
            params = data.get("parameters") or {}
            model = PARAMS[data["command"]]
            if not isinstance(params, model):
                data = {**data, "parameters": model.model_validate(params)}
        return data

    def to_dict(self) -> dict:
        return self.model_dump(mode="json")


def _describe(err: ValidationError, prefix: str = "") -> str:
    parts = []
    for e in err.errors():
        loc = ".".join([prefix] * bool(prefix) + [str(x) for x in e["loc"]])
        parts.append(f"{loc or '<root>'}: {e['msg']}")
    return "; ".join(parts)


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    model = PARAMS.get(data.get("command"))
    if model is not None:
        try:
            model.model_validate(data.get("parameters") or {})
        except ValidationError as err:
            raise ConfigError(_describe(err, "parameters")) from None
    try:
        return RunConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(_describe(err)) from None


def parse_config(path) -> RunConfig:
    """Read and validate a YAML/JSON configuration file."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ConfigError(f"cannot parse {path}: {err}") from None
    return config_from_dict(data)


def config_from_metadata(path) -> RunConfig:
    """Rebuild the RunConfig recorded in a run's metadata JSON."""
    data = yaml.safe_load(Path(path).read_text())
    return config_from_dict(data["config"])

"""Run configuration: one dataclass per TOML section, aggregated by `RunConfig`.

Every key has a default; `docs/configuration.md` lists them. Unknown sections or keys and
names that do not resolve to a built-in raise `ConfigError`.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 backport with the same API
    import tomli as tomllib
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any

from .discretization import Discretization
from .errors import ConfigError
from .generators import GeneratorName
from .models import LoadShape, ModelName

WORKERS_ENV = "PINNEDBEAM_WORKERS"


class StagePolicy(Enum):
    """What a refinement stage does when its non-resonance certificate fails."""

    # keep iterating, flag the stage
    RECORD = "record"

    # raise UncertifiedParameters
    REFUSE = "refuse"


class InversionMethod(Enum):
    """How refinement stages invert the linearized operator."""

    DIRECT = "direct"
    PRECONDITIONED = "preconditioned"


@dataclass(frozen=True)
class CoefficientSettings:
    """The `[coefficients]` section."""

    generator: str = GeneratorName.ZERO.value
    amplitude: float = 0.05
    n_x: int = 512
    p0_initial: float = 1.0
    discretization: str = Discretization.SINE_GALERKIN.value
    n_modes: int | None = None
    alpha_coefficients: tuple[float, ...] | None = None
    beta_coefficients: tuple[float, ...] | None = None
    samples: str | None = None


@dataclass(frozen=True)
class ForcingSettings:
    """The `[forcing]` section."""

    model: str = ModelName.CUBIC.value
    g: str = LoadShape.SINE.value
    g_amplitude: float = 1.0
    static: str = LoadShape.NONE.value
    static_amplitude: float = 0.0


@dataclass(frozen=True)
class FieldSettings:
    """The `[field]` section."""

    n_time: int = 8
    s: float = 1.0


@dataclass(frozen=True)
class SolverSettings:
    """The `[solver]` section."""

    epsilon: float = 1e-3
    omega: float = 2.5
    gamma: float = 0.01
    tau: float = 1.5
    N0: int = 4
    stages: int = 2
    N_cap: int = 64
    J: int = 16
    s: float = 1.0
    tol_stage: float = 1e-12
    max_iter_stage: int = 200
    contraction_max: float = 0.99
    tol_q: float = 1e-10
    max_iter_q: int = 50
    margin_min: float = 1e-6
    tol_eig: float = 1e-8
    stage_policy: str = StagePolicy.RECORD.value
    inversion: str = InversionMethod.DIRECT.value
    neumann_max_terms: int = 200


@dataclass(frozen=True)
class SieveSettings:
    """The `[sieve]` section."""

    omega_range: tuple[float, float] = (2.0, 3.0)
    gamma_ladder: tuple[float, ...] = (0.04, 0.02, 0.01)
    l_cap: int = 256
    smallness: float | None = None
    epsilon_grid: tuple[float, ...] = (0.0,)


@dataclass(frozen=True)
class OutputSettings:
    """The `[output]` section."""

    directory: str = "reports"
    seed: int = 0


_SECTIONS: dict[str, type] = {
    "coefficients": CoefficientSettings,
    "forcing": ForcingSettings,
    "field": FieldSettings,
    "solver": SolverSettings,
    "sieve": SieveSettings,
    "output": OutputSettings,
}

_TUPLE_KEYS = {
    "alpha_coefficients",
    "beta_coefficients",
    "omega_range",
    "gamma_ladder",
    "epsilon_grid",
}


def _section(cls: type, values: dict[str, Any], name: str) -> Any:
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(unknown)}")
    converted = {
        key: tuple(float(v) for v in value) if key in _TUPLE_KEYS and value is not None else value
        for key, value in values.items()
    }
    try:
        return cls(**converted)
    except TypeError as exc:
        raise ConfigError(f"invalid [{name}] section: {exc}") from exc


def _resolve(enum: type[Enum], value: str, key: str) -> None:
    try:
        enum(value)
    except ValueError:
        allowed = ", ".join(member.value for member in enum)  # type: ignore[attr-defined]
        raise ConfigError(f"{key} = {value!r} is not one of: {allowed}") from None


@dataclass(frozen=True)
class RunConfig:
    """
    A complete run configuration.

    Example:
        config = RunConfig.from_toml("desk.toml").with_overrides("solver", omega=2.37)
        print(config.digest)
    """

    coefficients: CoefficientSettings = dataclasses.field(default_factory=CoefficientSettings)
    forcing: ForcingSettings = dataclasses.field(default_factory=ForcingSettings)
    field: FieldSettings = dataclasses.field(default_factory=FieldSettings)
    solver: SolverSettings = dataclasses.field(default_factory=SolverSettings)
    sieve: SieveSettings = dataclasses.field(default_factory=SieveSettings)
    output: OutputSettings = dataclasses.field(default_factory=OutputSettings)

    def __post_init__(self) -> None:
        self.validate()

    @classmethod
    def from_mapping(cls, mapping: dict[str, Any]) -> RunConfig:
        """
        Build a configuration from nested section mappings.

        Raises:
            ConfigError: On unknown sections or keys and on invalid values.
        """
        unknown = sorted(set(mapping) - set(_SECTIONS))
        if unknown:
            raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
        sections = {}
        for name, cls_ in _SECTIONS.items():
            values = mapping.get(name, {})
            if not isinstance(values, dict):
                raise ConfigError(f"[{name}] must be a table")
            sections[name] = _section(cls_, values, name)
        return cls(**sections)

    @classmethod
    def from_toml(cls, path: str | os.PathLike[str]) -> RunConfig:
        """Load a TOML configuration file."""
        try:
            with Path(path).open("rb") as handle:
                data = tomllib.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
        return cls.from_mapping(data)

    def to_mapping(self) -> dict[str, Any]:
        """Nested plain mapping; `None` values are dropped so the result is TOML-safe."""
        out: dict[str, Any] = {}
        for name in _SECTIONS:
            values = asdict(getattr(self, name))
            out[name] = {
                key: list(value) if isinstance(value, tuple) else value
                for key, value in values.items()
                if value is not None
            }
        return out

    def with_overrides(self, section: str, **values: Any) -> RunConfig:
        """A copy with keys of one section replaced; `None` values are ignored."""
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section: {section}")
        current = getattr(self, section)
        updates = {key: value for key, value in values.items() if value is not None}
        merged = {**asdict(current), **updates}
        return replace(self, **{section: _section(_SECTIONS[section], merged, section)})

    @property
    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of the configuration."""
        canonical = json.dumps(self.to_mapping(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def validate(self) -> None:
        """
        Check value ranges and built-in names.

        Raises:
            ConfigError: On the first violation found.
        """
        c, f, fl, s, sv = self.coefficients, self.forcing, self.field, self.solver, self.sieve
        _resolve(GeneratorName, c.generator, "coefficients.generator")
        _resolve(Discretization, c.discretization, "coefficients.discretization")
        _resolve(ModelName, f.model, "forcing.model")
        _resolve(LoadShape, f.g, "forcing.g")
        _resolve(LoadShape, f.static, "forcing.static")
        _resolve(StagePolicy, s.stage_policy, "solver.stage_policy")
        _resolve(InversionMethod, s.inversion, "solver.inversion")
        if c.generator == GeneratorName.SAMPLES.value and not c.samples:
            raise ConfigError("coefficients.samples is required for the samples generator")
        if c.n_x < 64:
            raise ConfigError(f"coefficients.n_x must be at least 64, got {c.n_x}")
        if c.p0_initial <= 0:
            raise ConfigError("coefficients.p0_initial must be positive")
        if fl.n_time < 0 or fl.s < 0:
            raise ConfigError("field.n_time and field.s must be non-negative")
        for key in ("tol_stage", "tol_q", "margin_min", "tol_eig"):
            if getattr(s, key) <= 0:
                raise ConfigError(f"solver.{key} must be positive")
        if not 1.0 < s.tau < 2.0:
            raise ConfigError(f"solver.tau must lie in (1, 2), got {s.tau}")
        if not 0.0 < s.gamma < 1.0:
            raise ConfigError(f"solver.gamma must lie in (0, 1), got {s.gamma}")
        if s.epsilon < 0 or s.omega <= 0:
            raise ConfigError("solver.epsilon must be non-negative and solver.omega positive")
        if s.N0 < 2 or s.N_cap < s.N0 or s.stages < 0:
            raise ConfigError("need solver.N0 >= 2, solver.N_cap >= N0 and solver.stages >= 0")
        if s.J < 1 or s.J > c.n_x // 8:
            raise ConfigError(f"solver.J must lie in [1, n_x/8 = {c.n_x // 8}], got {s.J}")
        if not 0.0 < s.contraction_max < 1.0:
            raise ConfigError("solver.contraction_max must lie in (0, 1)")
        if s.max_iter_stage < 1 or s.max_iter_q < 1 or s.neumann_max_terms < 1:
            raise ConfigError("iteration limits must be positive")
        low, high = sv.omega_range
        if not low < high:
            raise ConfigError(f"sieve.omega_range must be increasing, got {sv.omega_range}")
        if any(not 0.0 < g < 1.0 for g in sv.gamma_ladder):
            raise ConfigError("sieve.gamma_ladder entries must lie in (0, 1)")
        if sv.l_cap < 1:
            raise ConfigError("sieve.l_cap must be positive")
        if sv.smallness is not None and sv.smallness <= 0:
            raise ConfigError("sieve.smallness must be positive when set")
        if any(e < 0 for e in sv.epsilon_grid):
            raise ConfigError("sieve.epsilon_grid entries must be non-negative")


def worker_count(default: int = 1) -> int:
    """Worker count from the environment, falling back to `default`."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return default
    try:
        count = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if count < 1:
        raise ConfigError(f"{WORKERS_ENV} must be positive, got {count}")
    return count

from __future__ import annotations

from enum import Enum
from functools import cached_property

import numpy as np

from .coefficients import CoefficientProfile, build_profile
from .config import (
    CoefficientSettings,
    ForcingSettings,
    RunConfig,
    SieveSettings,
    SolverSettings,
)
from .context import BeamContext
from .discretization import Discretization, SpatialBasis
from .eigensolver import (
    AsymptoticCoefficients,
    AsymptoticsReport,
    Spectrum,
    asymptotic_coefficients,
    fit_remainder,
    verify_asymptotics,
)
from .fields import TimeFourierField
from .generators import BaseGenerator, GeneratorName, Polynomial, Samples, SinePair, Zero
from .linop import LinearizedOperator, assemble_linop
from .lyapunov_schmidt import QSolveState, solve_q
from .models import (
    CubicForcing,
    ForcingModel,
    IdentityForcing,
    LinearForcing,
    ModelName,
    QuadraticForcing,
)
from .nash_moser import IterationSchedule, NashMoserState, solve
from .reporting import SolveReport
from .sieve import (
    Centres,
    MeasureReport,
    excluded_mask,
    extend_with_tail,
    measure_estimate,
    measure_rectangle,
)


class Preset(Enum):
    """Enumeration of predefined beam problems."""

    # constant beam, u^3 + sin(x) cos t, eps = 1e-3, omega = 2.5
    DESK = "desk"

    # constant beam, sin(x) cos t
    LINEAR = "linear"

    # sine-pair beam with a = 0.05, u^3 + sin(x) cos t
    SINE_PAIR = "sine_pair"


def build_generator(settings: CoefficientSettings) -> BaseGenerator:
    """
    Instantiate the generator named by `settings.generator`.

    Raises:
        ValueError: If the name does not resolve to a built-in.
    """
    match GeneratorName(settings.generator):
        case GeneratorName.ZERO:
            return Zero()
        case GeneratorName.SINE_PAIR:
            return SinePair().amplitude(settings.amplitude)
        case GeneratorName.POLYNOMIAL:
            generator = Polynomial().scaled(settings.amplitude)
            if settings.alpha_coefficients is not None:
                generator.alpha_coefficients(list(settings.alpha_coefficients))
            if settings.beta_coefficients is not None:
                generator.beta_coefficients(list(settings.beta_coefficients))
            return generator
        case GeneratorName.SAMPLES:
            return Samples().from_csv(settings.samples)  # type: ignore[arg-type]
        case _:  # type: ignore
            raise ValueError(f"Unknown generator: {settings.generator}")


def build_model(settings: ForcingSettings) -> ForcingModel:
    """Instantiate the forcing named by `settings.model` with its loads."""
    match ModelName(settings.model):
        case ModelName.LINEAR_FORCING:
            model: ForcingModel = LinearForcing()
        case ModelName.CUBIC:
            model = CubicForcing()
        case ModelName.QUADRATIC:
            model = QuadraticForcing()
        case ModelName.IDENTITY:
            model = IdentityForcing()
        case _:  # type: ignore
            raise ValueError(f"Unknown forcing model: {settings.model}")
    return model.load(settings.g, settings.g_amplitude).static_load(
        settings.static, settings.static_amplitude
    )


def build_profile_from(settings: CoefficientSettings) -> CoefficientProfile:
    return build_profile(build_generator(settings).pair(settings.n_x, settings.p0_initial))


class PeriodicBeam:
    """
    A forced pinned-pinned beam and the solvers for its time-periodic solutions.

    Bundles the coefficient profile, the spatial basis, the forcing model and the
    settings, and caches what they determine.

    Example:
        beam = PeriodicBeam.from_preset(Preset.DESK)
        state, report = beam.solve(omega=2.37)
        print(report)

    Attributes:
        config (RunConfig): The configuration the beam was built from.
        ctx (BeamContext): Problem data shared by the solvers.
    """

    def __init__(
        self,
        *,
        profile: CoefficientProfile,
        model: ForcingModel,
        config: RunConfig | None = None,
        basis: SpatialBasis | None = None,
    ) -> None:
        """
        Initialize the beam.

        Args:
            profile (CoefficientProfile): Beam coefficients.
            model (ForcingModel): The forcing.
            config (RunConfig | None): Settings; defaults throughout when omitted.
            basis (SpatialBasis | None): Discretization; built from the config when
                omitted.
        """
        self.config = config or RunConfig()
        c = self.config.coefficients
        basis = basis or SpatialBasis(profile.n_x, Discretization(c.discretization), c.n_modes)
        self.ctx = BeamContext(profile, basis, model, self.config.solver)

    @classmethod
    def from_config(cls, config: RunConfig) -> PeriodicBeam:
        """Build every component from a run configuration."""
        return cls(
            profile=build_profile_from(config.coefficients),
            model=build_model(config.forcing),
            config=config,
        )

    @classmethod
    def with_default_settings(cls) -> PeriodicBeam:
        """The constant beam with cubic forcing and every setting at its default."""
        return cls.from_config(RunConfig())

    @classmethod
    def from_preset(cls, preset: Preset) -> PeriodicBeam:
        """
        Create a beam from a predefined problem.

        Raises:
            ValueError: If an unknown preset is provided.
        """
        match preset:
            case Preset.DESK:
                return cls.from_config(RunConfig())
            case Preset.LINEAR:
                return cls.from_config(
                    RunConfig().with_overrides("forcing", model=ModelName.LINEAR_FORCING.value)
                )
            case Preset.SINE_PAIR:
                return cls.from_config(
                    RunConfig().with_overrides(
                        "coefficients", generator=GeneratorName.SINE_PAIR.value, amplitude=0.05
                    )
                )
            case _:  # type: ignore
                raise ValueError(f"Unknown preset: {preset}")

    @property
    def profile(self) -> CoefficientProfile:
        return self.ctx.profile

    @property
    def model(self) -> ForcingModel:
        return self.ctx.model

    @property
    def settings(self) -> SolverSettings:
        return self.ctx.settings

    @property
    def sieve_settings(self) -> SieveSettings:
        return self.config.sieve

    def with_settings(self, **values: object) -> PeriodicBeam:
        """A beam sharing profile and model, with `[solver]` keys replaced."""
        config = self.config.with_overrides("solver", **values)
        return PeriodicBeam(
            profile=self.profile, model=self.model, config=config, basis=self.ctx.basis
        )

    def spectrum(self, potential: np.ndarray | None = None, J: int | None = None) -> Spectrum:
        return self.ctx.spectrum(potential, J)

    @cached_property
    def _asymptotics(self) -> AsymptoticCoefficients:
        return asymptotic_coefficients(self.profile, np.zeros_like(self.ctx.x), self.ctx.max_modes)

    def asymptotics(
        self, j_range: tuple[int, int] | None = None
    ) -> tuple[AsymptoticCoefficients, AsymptoticsReport]:
        """Asymptotic coefficients at g = 0 and the residuals of the computed spectrum."""
        J = self.settings.J
        j_range = j_range or (1, J)
        spectrum = self.spectrum(J=max(J, j_range[1]))
        return self._asymptotics, verify_asymptotics(spectrum, self._asymptotics, j_range)

    def solve_q(
        self, epsilon: float | None = None, w: TimeFourierField | None = None
    ) -> QSolveState:
        epsilon = self.settings.epsilon if epsilon is None else epsilon
        if w is None:
            w = TimeFourierField.zeros(self.config.field.n_time, self.ctx.n_x)
        return solve_q(self.ctx, epsilon, w)

    def linearize(
        self,
        epsilon: float | None = None,
        omega: float | None = None,
        w: TimeFourierField | None = None,
        N: int | None = None,
    ) -> LinearizedOperator:
        """The linearized range operator at (epsilon, omega, w) in the unperturbed basis."""
        epsilon = self.settings.epsilon if epsilon is None else epsilon
        omega = self.settings.omega if omega is None else omega
        N = N or self.settings.N0
        if w is None:
            w = TimeFourierField.zeros(N, self.ctx.n_x)
        return assemble_linop(self.ctx, epsilon, omega, w, N, self.spectrum())

    def schedule(self) -> IterationSchedule:
        s = self.settings
        return IterationSchedule(s.N0, s.stages, s.N_cap)

    def solve(
        self, epsilon: float | None = None, omega: float | None = None
    ) -> tuple[NashMoserState, SolveReport]:
        """Run the staged iteration and certify the result."""
        epsilon = self.settings.epsilon if epsilon is None else epsilon
        omega = self.settings.omega if omega is None else omega
        inputs = {"config_digest": self.config.digest, "seed": self.config.output.seed}
        return solve(self.ctx, epsilon, omega, self.schedule(), inputs)

    def measure(
        self,
        epsilon: float = 0.0,
        gamma: float | None = None,
        omega_interval: tuple[float, float] | None = None,
    ) -> MeasureReport:
        """
        Measure the admissible frequencies in `omega_interval`.

        At epsilon > 0 the eigen family uses the spectrum at the potential of the
        time-mean solution for w = 0, and the unperturbed family is added.
        """
        sieve = self.sieve_settings
        gamma = self.settings.gamma if gamma is None else gamma
        low, high = omega_interval or sieve.omega_range
        top = sieve.l_cap * high + 1.0
        return measure_estimate(
            epsilon,
            (low, high),
            gamma,
            self.settings.tau,
            self.perturbed_centres(epsilon, top),
            self.resonance_centres(top) if epsilon else None,
            l_cap=sieve.l_cap,
            smallness=sieve.smallness,
        )

    def measure_rectangle(
        self, gamma: float | None = None, omega_interval: tuple[float, float] | None = None
    ) -> float:
        """Average admissible fraction over the `[sieve] epsilon_grid`."""
        sieve = self.sieve_settings
        gamma = self.settings.gamma if gamma is None else gamma
        low, high = omega_interval or sieve.omega_range
        top = sieve.l_cap * high + 1.0
        return measure_rectangle(
            sieve.epsilon_grid,
            (low, high),
            gamma,
            self.settings.tau,
            lambda eps: self.perturbed_centres(eps, top),
            self.resonance_centres(top),
            l_cap=sieve.l_cap,
            smallness=sieve.smallness,
        )

    def resonance_centres(self, top: float) -> Centres:
        """Real mu values of the unperturbed spectrum up to `top`.

        Beyond the resolved modes the values come from the asymptotic expansion and carry
        its error bound as slack.
        """
        return self._centres(None, top)

    def perturbed_centres(self, epsilon: float, top: float) -> Centres:
        """Real mu values at the potential eps f_u(v) of the time mean v solved for w = 0."""
        if epsilon == 0.0:
            return self.resonance_centres(top)
        q_state = solve_q(self.ctx, epsilon, TimeFourierField.zeros(1, self.ctx.n_x))
        potential = epsilon * self.ctx.compose(q_state.u, 1, n_out=0).mean
        return self._centres(potential, top)

    def _centres(self, potential: np.ndarray | None, top: float) -> Centres:
        spectrum = self.ctx.covering_spectrum(potential, top)
        if potential is None:
            asym = self._asymptotics
        else:
            asym = asymptotic_coefficients(self.profile, potential, self.ctx.max_modes)
        return extend_with_tail(spectrum, fit_remainder(spectrum, asym), top)

    def sample_excluded(
        self, omegas: np.ndarray, epsilon: float = 0.0, gamma: float | None = None
    ) -> np.ndarray:
        """Pointwise exclusion mask, the sampling counterpart of `measure`."""
        sieve = self.sieve_settings
        gamma = self.settings.gamma if gamma is None else gamma
        omegas = np.asarray(omegas, dtype=float)
        top = sieve.l_cap * float(np.max(omegas)) + 1.0
        return excluded_mask(
            omegas,
            gamma,
            self.settings.tau,
            self.perturbed_centres(epsilon, top),
            self.resonance_centres(top) if epsilon else None,
            epsilon=epsilon,
            l_cap=sieve.l_cap,
            smallness=sieve.smallness,
        )

    def __str__(self) -> str:
        c, s = self.config.coefficients, self.settings
        return (
            f"{c.generator} beam, n_x={self.ctx.n_x}, {self.model}, "
            f"eps={s.epsilon:g}, omega={s.omega:g}, N0={s.N0}, stages={s.stages}, J={s.J}"
        )

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(config={self.config!r})"

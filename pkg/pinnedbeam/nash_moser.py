"""The staged Galerkin iteration for the range equation and certification of its result.

Stage 0 solves the range equation truncated to N_0 time modes by Picard iteration in the
unperturbed eigenbasis. Each refinement stage raises the truncation to N_{n+1}, recomputes
the spectrum at the current potential, linearizes at w_n and solves
G(w_n + h) = 0 by the chord iteration h <- h - L^{-1} G(w_n + h). The truncations follow
N_n = N_0^(2^n), clamped to a computable cap.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .config import InversionMethod, StagePolicy
from .context import BeamContext
from .eigensolver import Spectrum
from .errors import ContractionFailed, SmallnessViolated, UncertifiedParameters
from .fields import TimeFourierField, mode_weights, sobolev_norm
from .linop import (
    assemble_linop,
    divisor_diagnostics,
    field_from_coordinates,
    kappa_of,
    neumann_coordinates,
    sigma_of,
)
from .lyapunov_schmidt import QSolveState, solve_q
from .reporting import SolveReport, StageRecord
from .sieve import Family, MelnikovCertificate, check_melnikov

logger = logging.getLogger(__name__)

SUPERLINEAR_POWER = 1.2
SUPERLINEAR_ONSET = 1e-3
NOISE_FLOOR_FACTOR = 64.0
FINE_GRID_FACTOR = 4


@dataclass(frozen=True)
class IterationSchedule:
    """
    Truncations N_n = N0^(2^n), the exact integer value of floor(exp(c 2^n)), c = ln N0.

    Values above `N_cap` are clamped. The schedule ends at `n_max` or at the first
    clamped stage that would not raise N.

    Attributes:
        N0 (int): Initial truncation, at least 2.
        n_max (int): Number of refinement stages requested.
        N_cap (int): Largest truncation allowed.
    """

    N0: int
    n_max: int
    N_cap: int = 64
    Ns: tuple[int, ...] = field(init=False)
    clamped: bool = field(init=False)
    stopped_early: bool = field(init=False)

    def __post_init__(self) -> None:
        if self.N0 < 2:
            raise ValueError(f"N0 must be at least 2, got {self.N0}")
        if self.n_max < 0:
            raise ValueError(f"n_max must be non-negative, got {self.n_max}")
        if self.N_cap < self.N0:
            raise ValueError(f"N_cap={self.N_cap} is below N0={self.N0}")
        Ns, raw, clamped, stopped = [self.N0], self.N0, False, False
        for _ in range(self.n_max):
            # squaring stops once past the cap; the clamped value is all that is used
            raw = raw * raw if raw <= self.N_cap else raw
            N = min(raw, self.N_cap)
            clamped = clamped or raw > self.N_cap
            if N <= Ns[-1]:
                stopped = True
                break
            Ns.append(N)
        object.__setattr__(self, "Ns", tuple(Ns))
        object.__setattr__(self, "clamped", clamped)
        object.__setattr__(self, "stopped_early", stopped)

    @property
    def c(self) -> float:
        return math.log(self.N0)

    @property
    def flags(self) -> tuple[str, ...]:
        out = []
        if self.clamped:
            out.append("n_cap_clamp")
        if self.stopped_early:
            out.append(f"schedule_stopped:{len(self.Ns) - 1}")
        return tuple(out)


@dataclass(frozen=True)
class NashMoserState:
    """
    The iterate after some number of stages.

    Attributes:
        epsilon (float): Coupling.
        omega (float): Frequency.
        gamma (float): Non-resonance constant.
        tau (float): Non-resonance exponent.
        s (float): Sobolev index of the reported norms.
        schedule (IterationSchedule): Truncations.
        stages (tuple[StageRecord, ...]): Completed stages.
        q_state (QSolveState | None): Time-mean solution at the latest iterate.
        flags (tuple[str, ...]): Deviations recorded so far.
    """

    epsilon: float
    omega: float
    gamma: float
    tau: float
    s: float
    schedule: IterationSchedule
    stages: tuple[StageRecord, ...] = ()
    q_state: QSolveState | None = field(default=None, repr=False)
    flags: tuple[str, ...] = ()

    @property
    def sigma(self) -> float:
        return sigma_of(self.tau)

    @property
    def kappa(self) -> float:
        return kappa_of(self.tau)

    @property
    def n(self) -> int:
        """Index of the latest completed stage."""
        return len(self.stages) - 1

    @property
    def w(self) -> TimeFourierField:
        if not self.stages:
            raise ValueError("no stage has been solved")
        return self.stages[-1].w

    @property
    def finished(self) -> bool:
        return len(self.stages) == len(self.schedule.Ns)

    @property
    def h_norms(self) -> tuple[float, ...]:
        return tuple(stage.h_norm for stage in self.stages)

    @property
    def residual_norms(self) -> tuple[float, ...]:
        return tuple(stage.residual_norm for stage in self.stages)

    @property
    def divisor_certificates(self) -> tuple[MelnikovCertificate, ...]:
        return tuple(stage.certificate for stage in self.stages)


@dataclass(frozen=True)
class RangeEvaluation:
    """Plain projections <psi_j, (-L_omega w + eps F(v + w))_l>, shape (N, J)."""

    values: np.ndarray
    q_state: QSolveState = field(repr=False)


def range_map(
    ctx: BeamContext,
    spectrum: Spectrum,
    epsilon: float,
    omega: float,
    w: TimeFourierField,
    N: int,
    v_init: np.ndarray | None = None,
) -> RangeEvaluation:
    """
    Evaluate the truncated range equation at w in the eigenbasis of `spectrum`.

    The time mean v is solved for w first, so the result is the reduced map whose
    derivative is the operator `assemble_linop` builds.
    """
    q_state = solve_q(ctx, epsilon, w, v_init)
    F = ctx.compose(q_state.u, 0, n_out=N)
    basis = ctx.basis
    a = basis.analyze(w.pad(max(w.n_time, N)).modes[1 : N + 1])
    l2 = np.arange(1, N + 1, dtype=float)[:, None] ** 2
    linear = omega**2 * l2 * (a @ ctx.mass) - a @ ctx.stiffness
    values = (linear + epsilon * basis.analyze(F.modes[1 : N + 1])) @ spectrum.coefficients
    return RangeEvaluation(values, q_state)


def _residual_norm(values: np.ndarray, s: float) -> float:
    weights = mode_weights(values.shape[0], s)[1:]
    return float(np.sqrt(np.sum(weights * np.sum(np.abs(values) ** 2, axis=1))))


def _window_top(omega: float, gamma: float, N: int) -> float:
    return omega * N + 2.0 * (2.0 * gamma + 1.0)


def _check_smallness(w: TimeFourierField, s: float, sigma: float, n: int) -> float:
    norm = sobolev_norm(w, s + sigma)
    if norm > 1.0:
        raise SmallnessViolated(f"stage {n}: ||w||_(s+sigma) = {norm:.4g} > 1")
    return norm


def _contraction(steps: list[float], tol: float, limit: float, n: int) -> float:
    """Largest ratio of successive step norms; raises once it reaches `limit` above tol."""
    ratios = [b / a for a, b in zip(steps, steps[1:]) if a > 0.0]
    if ratios and ratios[-1] >= limit and steps[-1] > tol:
        raise ContractionFailed(
            f"stage {n}: step ratio {ratios[-1]:.4f} >= {limit} at step norm {steps[-1]:.3e}"
        )
    return max(ratios, default=0.0)


def _record(
    ctx: BeamContext,
    n: int,
    N: int,
    w: TimeFourierField,
    h_norm: float,
    residual: float,
    state: NashMoserState,
    iterations: int,
    contraction: float,
    lambda_shift: float,
    certificate: MelnikovCertificate,
    spectrum: Spectrum,
    started: float,
    **extra: Any,
) -> StageRecord:
    s = state.s
    record = StageRecord(
        n=n,
        N=N,
        w=w,
        h_norm=h_norm,
        residual_norm=residual,
        w_norm_s=sobolev_norm(w, s),
        w_norm_s_sigma=_check_smallness(w, s, state.sigma, n),
        w_norm_s_kappa=sobolev_norm(w, s + state.kappa),
        iterations=iterations,
        contraction=contraction,
        lambda_shift=lambda_shift,
        certificate=certificate,
        spectrum=spectrum,
        elapsed=time.perf_counter() - started,
        **extra,
    )
    logger.info(
        "stage %d N=%d |h|=%.3e residual=%.3e iterations=%d contraction=%.3g",
        n,
        N,
        h_norm,
        residual,
        iterations,
        contraction,
    )
    return record


def solve_stage0(
    ctx: BeamContext,
    epsilon: float,
    omega: float,
    schedule: IterationSchedule | None = None,
) -> NashMoserState:
    """
    Solve the range equation truncated to N_0 modes by Picard iteration.

    Each step maps w to eps L^{-1} P_N0 F(v(w) + w) in the unperturbed eigenbasis,
    where the operator is diagonal.

    Raises:
        UncertifiedParameters: If omega fails the eigen family at level N_0.
        ContractionFailed: If successive steps stop contracting or the iteration limit is
            reached.
    """
    settings = ctx.settings
    schedule = schedule or IterationSchedule(settings.N0, settings.stages, settings.N_cap)
    gamma, tau, s = settings.gamma, settings.tau, settings.s
    N = schedule.Ns[0]
    started = time.perf_counter()

    full = ctx.covering_spectrum(None, _window_top(omega, gamma, N))
    certificate = check_melnikov(epsilon, omega, gamma, tau, N, full, (Family.EIGEN,))
    if not certificate.passed:
        binding = certificate.binding
        raise UncertifiedParameters(
            f"omega={omega} fails at N0={N}: l={binding.l} j={binding.j} "
            f"margin {binding.margin:.3e}"
        )
    spectrum = full.truncated(min(settings.J, full.J))
    l2 = np.arange(1, N + 1, dtype=float)[:, None] ** 2
    divisors = spectrum.lambdas[None, :] - omega**2 * l2

    w = TimeFourierField.zeros(N, ctx.n_x)
    q_state = None
    steps: list[float] = []
    while True:
        if len(steps) >= settings.max_iter_stage:
            raise ContractionFailed(
                f"stage 0: no convergence in {settings.max_iter_stage} iterations"
            )
        q_state = solve_q(ctx, epsilon, w, q_state.v if q_state else None)
        F = ctx.compose(q_state.u, 0, n_out=N)
        d = epsilon * spectrum.project(F.modes[1 : N + 1]) / divisors
        following = field_from_coordinates(spectrum, d, N)
        steps.append(sobolev_norm(following - w, s))
        w = following
        logger.debug("stage 0 picard step %d: %.3e", len(steps), steps[-1])
        contraction = _contraction(steps, settings.tol_stage, settings.contraction_max, 0)
        if steps[-1] <= settings.tol_stage:
            break

    evaluation = range_map(ctx, spectrum, epsilon, omega, w, N, q_state.v)
    state = NashMoserState(
        epsilon=float(epsilon),
        omega=float(omega),
        gamma=gamma,
        tau=tau,
        s=s,
        schedule=schedule,
        q_state=evaluation.q_state,
        flags=schedule.flags,
    )
    record = _record(
        ctx,
        0,
        N,
        w,
        sobolev_norm(w, s),
        _residual_norm(evaluation.values, s),
        state,
        len(steps),
        contraction,
        0.0,
        certificate,
        spectrum,
        started,
    )
    return replace(state, stages=(record,))


def solve_stage(ctx: BeamContext, state: NashMoserState) -> NashMoserState:
    """
    Run refinement stage n + 1.

    The spectrum is recomputed at the potential eps Pi_V f_u(v + w_n) and the certificate
    checked at level N_{n+1} for both the eigen and the integer family. A failed
    certificate is recorded or refused according to the stage policy.

    Raises:
        UncertifiedParameters: On a failed certificate under the refuse policy.
        ContractionFailed: If the chord iteration stops contracting.
        SmallnessViolated: If ||w_{n+1}||_{s+sigma} exceeds 1.
        SingularOperator, NeumannDiverged: Propagated from the operator solve.
    """
    if state.finished:
        raise ValueError("the schedule has no further stage")
    settings = ctx.settings
    epsilon, omega, gamma, tau, s = state.epsilon, state.omega, state.gamma, state.tau, state.s
    n = len(state.stages)
    N = state.schedule.Ns[n]
    previous = state.stages[-1]
    started = time.perf_counter()
    flags = list(state.flags)

    w_n = previous.w.pad(N)
    q_state = solve_q(ctx, epsilon, w_n, state.q_state.v if state.q_state else None)
    potential = epsilon * ctx.compose(q_state.u, 1, n_out=0).mean
    full = ctx.covering_spectrum(potential, _window_top(omega, gamma, N))
    certificate = check_melnikov(epsilon, omega, gamma, tau, N, full)
    if not certificate.passed:
        binding = certificate.binding
        message = (
            f"stage {n}: {binding.family.value} family fails at l={binding.l} "
            f"j={binding.j}, margin {binding.margin:.3e}"
        )
        if StagePolicy(settings.stage_policy) is StagePolicy.REFUSE:
            raise UncertifiedParameters(message)
        logger.warning("%s; continuing uncertified", message)
        flags.append(f"uncertified_stage:{n}")
    spectrum = full.truncated(min(settings.J, full.J))
    common = min(spectrum.J, previous.spectrum.J)
    lambda_shift = float(
        np.max(np.abs(spectrum.lambdas[:common] - previous.spectrum.lambdas[:common]))
    )

    diagnostics = None
    neumann_terms = None
    steps: list[float] = []
    contraction = 0.0
    if epsilon == 0.0:
        h = TimeFourierField.zeros(N, ctx.n_x)
    else:
        op = assemble_linop(ctx, epsilon, omega, w_n, N, spectrum, gamma, tau, q_state)
        diagnostics = divisor_diagnostics(op)
        preconditioned = InversionMethod(settings.inversion) is InversionMethod.PRECONDITIONED
        hd = np.zeros((N, spectrum.J), dtype=complex)
        v = q_state.v
        while True:
            if len(steps) >= settings.max_iter_stage:
                raise ContractionFailed(
                    f"stage {n}: no convergence in {settings.max_iter_stage} iterations"
                )
            evaluation = range_map(ctx, spectrum, epsilon, omega, w_n + op.to_field(hd), N, v)
            v = evaluation.q_state.v
            if preconditioned:
                step, trace = neumann_coordinates(op, evaluation.values, settings.neumann_max_terms)
                neumann_terms = trace.terms_used
                if not trace.converged and f"neumann_incomplete:{n}" not in flags:
                    flags.append(f"neumann_incomplete:{n}")
            else:
                step = op.solve_coordinates(evaluation.values)
            hd = hd - step
            steps.append(sobolev_norm(op.to_field(step), s))
            logger.debug("stage %d chord step %d: %.3e", n, len(steps), steps[-1])
            contraction = _contraction(steps, settings.tol_stage, settings.contraction_max, n)
            if steps[-1] <= settings.tol_stage:
                break
        h = op.to_field(hd)

    w_next = w_n + h
    evaluation = range_map(ctx, spectrum, epsilon, omega, w_next, N, q_state.v)
    record = _record(
        ctx,
        n,
        N,
        w_next,
        sobolev_norm(h, s),
        _residual_norm(evaluation.values, s),
        state,
        len(steps),
        contraction,
        lambda_shift,
        certificate,
        spectrum,
        started,
        diagnostics=diagnostics,
        neumann_terms=neumann_terms,
    )
    return replace(
        state,
        stages=state.stages + (record,),
        q_state=evaluation.q_state,
        flags=tuple(flags),
    )


def iterate(
    ctx: BeamContext,
    epsilon: float,
    omega: float,
    schedule: IterationSchedule | None = None,
) -> NashMoserState:
    """Stage 0 followed by every refinement stage of the schedule."""
    state = solve_stage0(ctx, epsilon, omega, schedule)
    while not state.finished:
        state = solve_stage(ctx, state)
    return state


def _decay_exponent(stages: tuple[StageRecord, ...]) -> float | None:
    usable = [(st.N, st.h_norm) for st in stages[1:] if st.h_norm > 0.0]
    if len(usable) < 2:
        return None
    Ns, norms = np.array(usable).T
    return float(np.polyfit(np.log(Ns), np.log(norms), 1)[0])


def _superlinear(stages: tuple[StageRecord, ...], w_norm: float) -> tuple[bool, bool]:
    """
    Check ||h_{n+1}|| <= ||h_n||^1.2 for consecutive refinement stages.

    Returns:
        tuple[bool, bool]: Whether every pair passes once corrections below the
        round-off floor are accepted, and whether some pair passed only that way.
    """
    floor = NOISE_FLOOR_FACTOR * np.finfo(float).eps * max(1.0, w_norm)
    at_floor = False
    for current, following in zip(stages[1:], stages[2:]):
        if current.h_norm >= SUPERLINEAR_ONSET:
            continue
        if following.h_norm <= current.h_norm**SUPERLINEAR_POWER:
            continue
        if following.h_norm > floor:
            return False, at_floor
        at_floor = True
    return True, at_floor


def _truncation_ok(stages: tuple[StageRecord, ...]) -> bool:
    return all(
        st.w.n_time <= st.N and not np.any(st.w.modes[0]) for st in stages
    )


def _nu_fit(stages: tuple[StageRecord, ...]) -> float | None:
    # stage n is solved in the spectrum at w_{n-1}; w_{n-1} - w_{n-2} = h_{n-1}
    ratios = [
        current.lambda_shift / before.h_norm
        for before, current in zip(stages, stages[1:])
        if before.h_norm > 0.0
    ]
    return max(ratios) if ratios else None


def strong_residual(
    ctx: BeamContext, epsilon: float, omega: float, u: TimeFourierField, n_fine: int
) -> tuple[float, np.ndarray]:
    """
    Residual of omega^2 rho u_tt + (p u_xx)_xx - eps f(t, x, u) on a fine grid.

    Returns:
        tuple[float, np.ndarray]: The L^2 norm over (t, x) and the L^2 norm in x of
        each time mode 0..n_fine.
    """
    u = u.pad(max(u.n_time, n_fine))
    F = ctx.compose(u, 0, n_out=u.n_time)
    l2 = np.arange(u.n_time + 1, dtype=float)[:, None] ** 2
    profile = ctx.profile
    residual = (
        -(omega**2) * l2 * profile.rho * u.modes
        + ctx.basis.apply_stiffness(profile.p, u.modes)
        - epsilon * F.modes
    )
    interior = residual[:, 1:-1]
    per_mode = np.sqrt(ctx.basis.h * np.sum(np.abs(interior) ** 2, axis=1))
    weights = np.full(per_mode.shape, 2.0)
    weights[0] = 1.0
    return float(np.sqrt(2.0 * np.pi * np.sum(weights * per_mode**2))), per_mode


def certify_solution(
    ctx: BeamContext,
    epsilon: float,
    omega: float,
    state: NashMoserState,
    inputs: dict[str, Any] | None = None,
) -> SolveReport:
    """
    Assemble u = v(eps, w) + w and measure how well it solves the beam equation.

    The strong residual is evaluated with FINE_GRID_FACTOR times the final truncation,
    so modes the iteration never saw are included.

    Args:
        ctx: Problem data.
        epsilon: Coupling.
        omega: Frequency.
        state: A finished iteration state.
        inputs: Extra entries for the input echo.

    Returns:
        SolveReport: Residuals, stage table and iteration diagnostics.
    """
    if not state.stages:
        raise ValueError("the state has no solved stage")
    started = time.perf_counter()
    w = state.w
    q_state = solve_q(ctx, epsilon, w, state.q_state.v if state.q_state else None)
    n_fine = FINE_GRID_FACTOR * max(w.n_time, 1)
    residual, per_mode = strong_residual(ctx, epsilon, omega, q_state.u, n_fine)

    flags = list(state.flags)
    stages = state.stages
    decay = _decay_exponent(stages)
    if decay is None:
        flags.append("decay_fit_unavailable")
    nu = _nu_fit(stages)
    w_norm = sobolev_norm(w, state.s)
    superlinear, at_floor = _superlinear(stages, w_norm)
    if at_floor:
        flags.append("superlinear_at_noise_floor")
    echo = {
        "epsilon": float(epsilon),
        "omega": float(omega),
        "gamma": state.gamma,
        "tau": state.tau,
        "s": state.s,
        "N0": state.schedule.N0,
        "Ns": list(state.schedule.Ns),
        "J": ctx.settings.J,
        "n_x": ctx.n_x,
        "model": str(ctx.model.model_name),
        "inversion": ctx.settings.inversion,
        "stage_policy": ctx.settings.stage_policy,
    }
    echo.update(inputs or {})
    timings = {f"stage_{st.n}": st.elapsed for st in stages}
    timings["certify"] = time.perf_counter() - started
    report = SolveReport(
        inputs=echo,
        converged=state.finished,
        u=q_state.u,
        strong_residual=residual,
        mode_residuals=per_mode,
        stages=stages,
        decay_exponent=0.0 if decay is None else decay,
        superlinear=superlinear,
        truncation_ok=_truncation_ok(stages),
        nu_fit=0.0 if nu is None else nu,
        q_margin=q_state.nondegeneracy_margin,
        flags=tuple(flags),
        timings=timings,
    )
    logger.info(
        "certified eps=%.3g omega=%.6g residual %.3e flags %s",
        epsilon,
        omega,
        residual,
        ",".join(report.flags) or "-",
    )
    return report


def solve(
    ctx: BeamContext,
    epsilon: float,
    omega: float,
    schedule: IterationSchedule | None = None,
    inputs: dict[str, Any] | None = None,
) -> tuple[NashMoserState, SolveReport]:
    """Run every stage and certify the result."""
    state = iterate(ctx, epsilon, omega, schedule)
    return state, certify_solution(ctx, epsilon, omega, state, inputs)


@dataclass(frozen=True)
class OracleResult:
    """One-shot Newton on a truncated system: final field, step norms, convergence."""

    w: TimeFourierField
    step_norms: tuple[float, ...]
    converged: bool


def dense_newton_oracle(
    ctx: BeamContext,
    epsilon: float,
    omega: float,
    w_start: TimeFourierField,
    N: int,
    spectrum: Spectrum,
    max_iter: int = 30,
    tol: float | None = None,
) -> OracleResult:
    """
    Full Newton on the system truncated to N time modes in the eigenbasis `spectrum`.

    Every step reassembles the operator at the current iterate. Used to cross-check the
    staged solution; start it from the stage-0 iterate.
    """
    tol = ctx.settings.tol_stage if tol is None else tol
    w = w_start.pad(max(w_start.n_time, N))
    v = None
    steps: list[float] = []
    for _ in range(max_iter):
        evaluation = range_map(ctx, spectrum, epsilon, omega, w, N, v)
        v = evaluation.q_state.v
        op = assemble_linop(ctx, epsilon, omega, w, N, spectrum, q_state=evaluation.q_state)
        correction = op.to_field(op.solve_coordinates(evaluation.values), w.n_time)
        w = w - correction
        steps.append(sobolev_norm(correction, ctx.settings.s))
        logger.debug("oracle newton step %d: %.3e", len(steps), steps[-1])
        if steps[-1] <= tol:
            return OracleResult(w, tuple(steps), True)
    return OracleResult(w, tuple(steps), False)


@dataclass(frozen=True)
class Sensitivity:
    """
    Finite-difference estimates of ||d w / d eps||_s and ||d w / d omega||_s.

    Attributes:
        d_epsilon (float): Norm of the epsilon derivative.
        d_omega (float): Norm of the omega derivative.
        delta (float): Step used for both parameters.
        epsilon_scheme (str): "central", or "forward" when eps - delta < 0.
    """

    d_epsilon: float
    d_omega: float
    delta: float
    epsilon_scheme: str


def parameter_sensitivity(
    ctx: BeamContext,
    epsilon: float,
    omega: float,
    delta: float = 1e-6,
    schedule: IterationSchedule | None = None,
) -> Sensitivity:
    """Differentiate the final iterate in eps and omega by repeated full solves."""
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    s = ctx.settings.s

    def final(eps: float, om: float) -> TimeFourierField:
        return iterate(ctx, eps, om, schedule).w

    def slope(a: TimeFourierField, b: TimeFourierField, width: float) -> float:
        return sobolev_norm(b - a, s) / width

    if epsilon - delta < 0.0:
        scheme = "forward"
        d_eps = slope(final(epsilon, omega), final(epsilon + delta, omega), delta)
    else:
        scheme = "central"
        d_eps = slope(final(epsilon - delta, omega), final(epsilon + delta, omega), 2 * delta)
    d_om = slope(final(epsilon, omega - delta), final(epsilon, omega + delta), 2 * delta)
    logger.info("sensitivity d/deps=%.3e d/domega=%.3e (%s)", d_eps, d_om, scheme)
    return Sensitivity(d_eps, d_om, delta, scheme)

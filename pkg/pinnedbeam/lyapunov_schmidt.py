"""The time-mean (bifurcation) equation (p v'')'' = eps Pi_V F(v + w).

For a given oscillating field w the equation is solved for v by Newton's method in the
spatial basis. The Jacobian K - eps gram(b_0), with b_0 the time mean of f_u(v + w), is
also the operator the chain term of the linearized range equation inverts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, solve, svdvals

from .context import BeamContext
from .discretization import h2_norm_squared
from .errors import DegenerateLinearization, NewtonDiverged
from .fields import TimeFourierField, sobolev_norm

logger = logging.getLogger(__name__)

MAX_INCREASES = 3


@dataclass(frozen=True)
class QSolveState:
    """
    A converged solution of the time-mean equation.

    Attributes:
        v (np.ndarray): Grid samples of v.
        coefficients (np.ndarray): Basis coordinates of v.
        epsilon (float): Coupling.
        w (TimeFourierField): The oscillating field the equation was solved for.
        newton_trace (tuple[float, ...]): Residual norms, starting with the initial guess.
        nondegeneracy_margin (float): Smallest over largest singular value of the
            stiffness-scaled Jacobian at the solution.
        steps (int): Newton steps taken.
        jacobian (np.ndarray): Jacobian K - eps gram(b_0) at the solution.
    """

    v: np.ndarray
    coefficients: np.ndarray
    epsilon: float
    w: TimeFourierField
    newton_trace: tuple[float, ...]
    nondegeneracy_margin: float
    steps: int
    jacobian: np.ndarray = field(repr=False)

    @property
    def residual(self) -> float:
        return self.newton_trace[-1]

    @property
    def u(self) -> TimeFourierField:
        """The full field v + w."""
        return self.w.with_mode0(self.v)


def _mean(ctx: BeamContext, u: TimeFourierField, derivative: int) -> np.ndarray:
    return ctx.compose(u, derivative, n_out=0).mean


def solve_q(
    ctx: BeamContext,
    epsilon: float,
    w: TimeFourierField,
    v_init: np.ndarray | None = None,
) -> QSolveState:
    """
    Solve (p v'')'' = eps Pi_V F(v + w) by Newton's method.

    Args:
        ctx: Problem data; tolerances come from `ctx.settings`.
        epsilon: Coupling, non-negative.
        w: The oscillating field. Its mean is ignored.
        v_init: Initial guess; zero when omitted.

    Returns:
        QSolveState: The converged solution.

    Raises:
        NewtonDiverged: After `max_iter_q` steps or three consecutive residual increases.
        DegenerateLinearization: If the nondegeneracy margin is at most `margin_min`.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    settings = ctx.settings
    basis, stiffness = ctx.basis, ctx.stiffness
    coefficients = np.zeros(basis.size) if v_init is None else basis.analyze(v_init)

    def field_at(a: np.ndarray) -> TimeFourierField:
        return w.with_mode0(basis.synthesize(a))

    def residual(a: np.ndarray) -> np.ndarray:
        return stiffness @ a - epsilon * basis.analyze(_mean(ctx, field_at(a), 0))

    def jacobian(a: np.ndarray) -> np.ndarray:
        return stiffness - epsilon * basis.gram(_mean(ctx, field_at(a), 1))

    r = residual(coefficients)
    trace = [float(np.linalg.norm(r))]
    increases = 0
    while trace[-1] > settings.tol_q:
        if len(trace) > settings.max_iter_q:
            raise NewtonDiverged(
                f"no convergence in {settings.max_iter_q} steps, residual {trace[-1]:.3e}"
            )
        try:
            coefficients = coefficients - solve(jacobian(coefficients), r, assume_a="sym")
        except LinAlgError as exc:
            raise DegenerateLinearization(f"singular Jacobian: {exc}") from exc
        r = residual(coefficients)
        norm = float(np.linalg.norm(r))
        if not np.isfinite(norm):
            raise NewtonDiverged("residual became non-finite")
        increases = increases + 1 if norm > trace[-1] else 0
        trace.append(norm)
        logger.debug("q-newton step %d residual %.3e", len(trace) - 1, norm)
        if increases >= MAX_INCREASES:
            raise NewtonDiverged(f"residual increased on {MAX_INCREASES} consecutive steps")

    final = jacobian(coefficients)
    singular = svdvals(solve(stiffness, final, assume_a="sym"))
    margin = float(singular.min() / singular.max())
    if margin <= settings.margin_min:
        raise DegenerateLinearization(
            f"nondegeneracy margin {margin:.3e} <= {settings.margin_min:.1e}"
        )
    return QSolveState(
        v=basis.synthesize(coefficients),
        coefficients=coefficients,
        epsilon=float(epsilon),
        w=w,
        newton_trace=tuple(trace),
        nondegeneracy_margin=margin,
        steps=len(trace) - 1,
        jacobian=final,
    )


@dataclass(frozen=True)
class LipschitzProbe:
    """
    Ratio ||v(eps, w1) - v(eps, w2)||_{H^2} / ||w1 - w2||_s.

    Attributes:
        ratio (float): The ratio, 0 for a degenerate pair.
        degenerate (bool): True when w1 = w2.
    """

    ratio: float
    degenerate: bool
    numerator: float
    denominator: float


def q_lipschitz_probe(
    ctx: BeamContext,
    epsilon: float,
    w1: TimeFourierField,
    w2: TimeFourierField,
    s: float | None = None,
) -> LipschitzProbe:
    """
    Probe the Lipschitz dependence of the time-mean solution on w.

    Raises:
        NewtonDiverged, DegenerateLinearization: Propagated from `solve_q`.
    """
    s = ctx.settings.s if s is None else s
    denominator = sobolev_norm(w1 - w2, s)
    numerator = float(
        np.sqrt(h2_norm_squared(solve_q(ctx, epsilon, w1).v - solve_q(ctx, epsilon, w2).v))
    )
    if denominator == 0.0:
        return LipschitzProbe(0.0, True, numerator, denominator)
    return LipschitzProbe(numerator / denominator, False, numerator, denominator)

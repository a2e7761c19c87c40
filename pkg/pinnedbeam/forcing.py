"""Composition operators u -> f(t, x, u), f_u(t, x, u), f_uu(t, x, u) on time-Fourier fields.

The polynomial part of the forcing is evaluated by time collocation. The loads
g(x) cos t and s(x) are added to Fourier modes 1 and 0 exactly, so a u-independent
forcing produces no FFT roundoff in any other mode.
"""

from __future__ import annotations

import logging

import numpy as np

from .errors import NonFiniteEvaluation
from .fields import Projection, TimeFourierField, next_pow2, project
from .models import ForcingModel

logger = logging.getLogger(__name__)

OVERSAMPLING = 4
MIN_COLLOCATION = 16


def collocation_size(n_time: int, n_out: int) -> int:
    """Number of time collocation points for inputs of bandwidth `n_time`."""
    return next_pow2(max(OVERSAMPLING * max(n_time, n_out) + 1, MIN_COLLOCATION))


def compose(
    model: ForcingModel,
    u: TimeFourierField,
    derivative: int = 0,
    n_out: int | None = None,
    x: np.ndarray | None = None,
) -> TimeFourierField:
    """
    Evaluate the composition with f or one of its u-derivatives.

    Args:
        model: The forcing model.
        u: The field.
        derivative: 0 for f, 1 for f_u, 2 for f_uu.
        n_out: Truncation of the result. Defaults to u's truncation.
        x: Grid of u's samples. Defaults to the uniform grid of [0, pi].

    Returns:
        TimeFourierField: The composed field, with the norm of discarded modes recorded.

    Raises:
        NonFiniteEvaluation: If the forcing returns non-finite values.
    """
    if derivative not in (0, 1, 2):
        raise ValueError(f"derivative must be 0, 1 or 2, got {derivative}")
    n_out = u.n_time if n_out is None else n_out
    if n_out < 0:
        raise ValueError(f"n_out must be non-negative, got {n_out}")
    x = np.linspace(0.0, np.pi, u.n_x) if x is None else np.asarray(x, dtype=float)

    count = collocation_size(u.n_time, n_out)
    with np.errstate(over="ignore", invalid="ignore"):
        values = model.nonlinearity(u.time_samples(count), derivative)
    if not np.all(np.isfinite(values)):
        raise NonFiniteEvaluation(
            f"{model.model_name} returned non-finite values (derivative {derivative})"
        )
    composed = TimeFourierField.from_samples(values, n_out)
    if derivative == 0:
        modes = composed.modes.copy()
        modes[0] += model.s(x)
        if n_out >= 1:
            modes[1] += 0.5 * model.g(x)
        composed = TimeFourierField(modes, composed.tail_norm)
    logger.debug(
        "compose %s d=%d N=%d->%d M=%d tail=%.3e",
        model.model_name,
        derivative,
        u.n_time,
        n_out,
        count,
        composed.tail_norm,
    )
    return composed


def split_mean(F: TimeFourierField) -> tuple[np.ndarray, TimeFourierField]:
    """
    Split a field into its time mean and the oscillating remainder.

    Returns:
        tuple[np.ndarray, TimeFourierField]: f0 as real samples and fbar = F - f0.
    """
    return F.mean, project(F, Projection.W)

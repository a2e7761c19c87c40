"""Variable beam coefficients built from a pair of generator functions.

The mass density and flexural rigidity are

    rho(x) = exp(4 int_0^x alpha),    p(x) = p(0) exp(4 int_0^x beta),

with alpha + beta vanishing at both ends. p(0) is recalibrated so that the Liouville
length int_0^pi (rho/p)^(1/4) dx equals pi.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson
from scipy.interpolate import PchipInterpolator

from .discretization import MIN_GRID_POINTS, uniform_grid
from .errors import (
    BoundaryConstraintViolated,
    NonPositiveCoefficient,
    ProfileCorrupted,
)

logger = logging.getLogger(__name__)

TOL_BC = 1e-10
TOL_NORM = 1e-8
STENCIL_POINTS = 7

Derivatives = tuple[np.ndarray, np.ndarray, np.ndarray]


@lru_cache(maxsize=64)
def _stencil(offsets: tuple[int, ...], order: int) -> np.ndarray:
    # Taylor matching: sum_m w_m o_m^q / q! = [q == order]
    points = np.asarray(offsets, dtype=float)
    powers = np.arange(len(points))
    factorials = np.cumprod(np.concatenate(([1.0], powers[1:].astype(float))))
    vandermonde = points[None, :] ** powers[:, None] / factorials[:, None]
    rhs = np.zeros(len(points))
    rhs[order] = 1.0
    return np.linalg.solve(vandermonde, rhs)


def finite_difference(values: np.ndarray, h: float, order: int) -> np.ndarray:
    """Derivative of uniform samples by seven-point finite differences.

    Interior points use the centred stencil; the three points nearest each end use
    shifted one-sided stencils of the same width.

    Args:
        values: Samples on a uniform grid.
        h: Grid spacing.
        order: Derivative order, 1 to 3.

    Returns:
        Samples of the derivative.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if not 1 <= order <= 3:
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    if n < STENCIL_POINTS:
        raise ValueError(f"need at least {STENCIL_POINTS} samples, got {n}")
    out = np.empty(n)
    half = STENCIL_POINTS // 2
    centred = _stencil(tuple(range(-half, half + 1)), order)
    windows = np.lib.stride_tricks.sliding_window_view(values, STENCIL_POINTS)
    out[half : n - half] = windows @ centred
    for i in [*range(half), *range(n - half, n)]:
        start = min(max(i - half, 0), n - STENCIL_POINTS)
        offsets = tuple(range(start - i, start - i + STENCIL_POINTS))
        out[i] = _stencil(offsets, order) @ values[start : start + STENCIL_POINTS]
    return out / h**order


@dataclass(frozen=True)
class GeneratorPair:
    """
    Samples of the generators alpha and beta on the uniform grid of [0, pi].

    Attributes:
        alpha (np.ndarray): Samples of alpha.
        beta (np.ndarray): Samples of beta.
        p0 (float): Initial flexural rigidity at x = 0 (recalibrated by `build_profile`).
        alpha_derivatives (Derivatives | None): First three derivatives of alpha, when
            known analytically. Seven-point differences are used otherwise.
        beta_derivatives (Derivatives | None): Same for beta.
        name (str): Name of the generator that produced the samples.
    """

    alpha: np.ndarray
    beta: np.ndarray
    p0: float = 1.0
    alpha_derivatives: Derivatives | None = None
    beta_derivatives: Derivatives | None = None
    name: str = "samples"

    def __post_init__(self) -> None:
        alpha = np.asarray(self.alpha, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        if alpha.ndim != 1 or alpha.shape != beta.shape:
            raise ValueError("alpha and beta must be 1-D arrays of the same length")
        if alpha.size < MIN_GRID_POINTS:
            raise ValueError(f"n_x must be at least {MIN_GRID_POINTS}, got {alpha.size}")
        if not np.isfinite(self.p0) or self.p0 <= 0:
            raise ValueError(f"p0 must be positive, got {self.p0}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def n_x(self) -> int:
        return self.alpha.size

    @property
    def x(self) -> np.ndarray:
        return uniform_grid(self.n_x)

    def derivatives(self) -> tuple[Derivatives, Derivatives]:
        """Return the first three derivatives of alpha and beta."""
        h = np.pi / (self.n_x - 1)
        alpha = self.alpha_derivatives
        if alpha is None:
            alpha = tuple(finite_difference(self.alpha, h, k) for k in (1, 2, 3))
        beta = self.beta_derivatives
        if beta is None:
            beta = tuple(finite_difference(self.beta, h, k) for k in (1, 2, 3))
        return alpha, beta  # type: ignore[return-value]


@dataclass(frozen=True)
class CoefficientProfile:
    """
    Coefficients of the beam and the Liouville auxiliaries on the grid.

    Attributes:
        x (np.ndarray): Uniform grid on [0, pi].
        rho (np.ndarray): Mass density.
        p (np.ndarray): Flexural rigidity.
        zeta (np.ndarray): (rho / p) ** (1/4).
        q (np.ndarray): p ** (1/8) * rho ** (3/8).
        phi (np.ndarray): Liouville variable, the running integral of zeta.
        normalization_residual (float): |int zeta - pi| after calibration.
        p0 (float): Calibrated flexural rigidity at x = 0.
        generators (GeneratorPair): The generators the profile was built from.
    """

    x: np.ndarray
    rho: np.ndarray
    p: np.ndarray
    zeta: np.ndarray
    q: np.ndarray
    phi: np.ndarray
    normalization_residual: float
    p0: float
    generators: GeneratorPair = field(repr=False)

    @property
    def n_x(self) -> int:
        return self.x.size

    def to_rows(self) -> list[tuple[float, ...]]:
        """Rows (x, rho, p, zeta, q, phi) for CSV export."""
        columns = (self.x, self.rho, self.p, self.zeta, self.q, self.phi)
        return [tuple(float(v) for v in row) for row in zip(*columns)]


def build_profile(
    gen: GeneratorPair, tol_bc: float = TOL_BC, tol_norm: float = TOL_NORM
) -> CoefficientProfile:
    """
    Build the coefficient profile from a generator pair.

    Args:
        gen: Generator samples.
        tol_bc: Tolerance on alpha + beta at both ends.
        tol_norm: Tolerance on the normalization of the Liouville length.

    Returns:
        CoefficientProfile: The calibrated profile.

    Raises:
        BoundaryConstraintViolated: If alpha + beta does not vanish at an end.
        NonPositiveCoefficient: If the quadrature produces non-finite or non-positive
            coefficients, or the calibration misses the normalization.
    """
    for end, index in (("0", 0), ("pi", -1)):
        mismatch = abs(gen.alpha[index] + gen.beta[index])
        if mismatch > tol_bc:
            raise BoundaryConstraintViolated(
                f"|alpha({end}) + beta({end})| = {mismatch:.3e} exceeds {tol_bc:.1e}"
            )

    x = gen.x
    with np.errstate(over="ignore", invalid="ignore"):
        rho = np.exp(4.0 * cumulative_trapezoid(gen.alpha, x, initial=0.0))
        shape = np.exp(4.0 * cumulative_trapezoid(gen.beta, x, initial=0.0))
        ratio = (rho / shape) ** 0.25
    for name, values in (("rho", rho), ("p", shape), ("(rho/p)^(1/4)", ratio)):
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise NonPositiveCoefficient(f"{name} is not finite and positive on the grid")

    # zeta scales as p0 ** (-1/4), so this choice makes its integral exactly pi
    p0 = float((simpson(ratio, x=x) / np.pi) ** 4)
    p = p0 * shape
    zeta = (rho / p) ** 0.25
    q = p**0.125 * rho**0.375
    phi = cumulative_trapezoid(zeta, x, initial=0.0)
    residual = float(abs(simpson(zeta, x=x) - np.pi))
    if residual > tol_norm:
        raise NonPositiveCoefficient(
            f"normalization residual {residual:.3e} exceeds {tol_norm:.1e}"
        )
    logger.debug(
        "built %s profile on %d points: p0=%.12g residual=%.2e",
        gen.name,
        gen.n_x,
        p0,
        residual,
    )
    return CoefficientProfile(
        x=x,
        rho=rho,
        p=p,
        zeta=zeta,
        q=q,
        phi=phi,
        normalization_residual=residual,
        p0=p0,
        generators=gen,
    )


def inverse_liouville(profile: CoefficientProfile, xi: np.ndarray) -> np.ndarray:
    """Evaluate psi = phi^(-1) at `xi` by monotone cubic interpolation.

    Raises:
        ProfileCorrupted: If phi is not strictly increasing.
    """
    if np.any(np.diff(profile.phi) <= 0):
        raise ProfileCorrupted("phi is not strictly increasing")
    return PchipInterpolator(profile.phi, profile.x)(xi)


def barcilon_gottlieb_transform(
    profile: CoefficientProfile, u: np.ndarray
) -> np.ndarray:
    """
    Transform samples u(x) to y(xi) = q(psi(xi)) u(psi(xi)) on a uniform xi-grid.

    Args:
        profile: The coefficient profile.
        u: Samples of u on the profile's x-grid.

    Returns:
        np.ndarray: Samples of y on the uniform grid of [0, pi] with n_x points.

    Raises:
        ProfileCorrupted: If phi is not strictly increasing.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != profile.x.shape:
        raise ValueError("u must be sampled on the profile grid")
    psi = inverse_liouville(profile, uniform_grid(profile.n_x))
    q_at = PchipInterpolator(profile.x, profile.q)(psi)
    u_at = PchipInterpolator(profile.x, u)(psi)
    return q_at * u_at

"""Spatial discretization of pinned-pinned fields on [0, pi].

Two discretizations share one interface. The sine Galerkin basis works in the first
`n_modes` sine modes with trapezoid inner products. The finite-difference basis uses the
nested three-point stencil with a diagonal mass. Both express the operators
y -> (p y'')'' and y -> w y in coefficient space, where `analyze` and `synthesize`
convert between grid samples and coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from scipy import fft as sp_fft
from scipy import sparse

MIN_GRID_POINTS = 64
MAX_SINE_MODES = 128


class Discretization(Enum):
    """Enumeration of the supported spatial discretizations."""

    SINE_GALERKIN = "sine_galerkin"
    FINITE_DIFFERENCE = "finite_difference"


def uniform_grid(n_x: int) -> np.ndarray:
    """Return the uniform grid of `n_x` points on [0, pi], endpoints included."""
    return np.linspace(0.0, np.pi, n_x)


def _dst1(values: np.ndarray) -> np.ndarray:
    # scipy's real-to-real transforms take real input only
    if np.iscomplexobj(values):
        return _dst1(values.real) + 1j * _dst1(values.imag)
    return sp_fft.dst(values, type=1, axis=-1)


def sine_coefficients(values: np.ndarray) -> np.ndarray:
    """Sine coefficients b_k, k = 1..n_x-2, of grid samples vanishing at both ends.

    The samples are y(x_i) = sum_k b_k sin(k x_i) exactly at the interior nodes.

    Args:
        values: Samples of shape (..., n_x).

    Returns:
        Coefficients of shape (..., n_x - 2).
    """
    values = np.asarray(values)
    return _dst1(values[..., 1:-1]) / (values.shape[-1] - 1)


def from_sine_coefficients(coefficients: np.ndarray) -> np.ndarray:
    """Inverse of `sine_coefficients`, returning samples with zero endpoints."""
    coefficients = np.asarray(coefficients)
    interior = _dst1(coefficients) / 2.0
    pad = [(0, 0)] * (interior.ndim - 1) + [(1, 1)]
    return np.pad(interior, pad)


def h2_norm_squared(values: np.ndarray) -> np.ndarray:
    """Squared H^2 norm of pinned grid samples along the last axis.

    The norm is the integral of y^2 + y'^2 + y''^2 over [0, pi] evaluated on the sine
    expansion of the interior samples, which gives (pi/2) sum (1 + k^2 + k^4) |b_k|^2.
    """
    b = sine_coefficients(values)
    k = np.arange(1, b.shape[-1] + 1, dtype=float)
    weights = 0.5 * np.pi * (1.0 + k**2 + k**4)
    return np.sum(weights * np.abs(b) ** 2, axis=-1)


def spectral_second_derivative(values: np.ndarray) -> np.ndarray:
    """Second derivative of pinned samples through the full-resolution sine expansion."""
    b = sine_coefficients(values)
    k = np.arange(1, b.shape[-1] + 1, dtype=float)
    return from_sine_coefficients(-(k**2) * b)


@dataclass(frozen=True)
class SpatialBasis:
    """
    Coefficient space for pinned fields on a uniform grid.

    Attributes:
        n_x (int): Number of grid points, endpoints included.
        discretization (Discretization): Galerkin sine modes or finite differences.
        n_modes (int | None): Number of sine modes. Defaults to min(n_x // 8, 128).
            Ignored by the finite-difference basis, whose size is n_x - 2.
    """

    n_x: int
    discretization: Discretization = Discretization.SINE_GALERKIN
    n_modes: int | None = None

    def __post_init__(self) -> None:
        if self.n_x < MIN_GRID_POINTS:
            raise ValueError(f"n_x must be at least {MIN_GRID_POINTS}, got {self.n_x}")
        if not isinstance(self.discretization, Discretization):
            object.__setattr__(
                self, "discretization", Discretization(self.discretization)
            )
        if self.discretization is Discretization.SINE_GALERKIN:
            modes = self.n_modes
            if modes is None:
                modes = min(self.n_x // 8, MAX_SINE_MODES)
            if not 1 <= modes <= self.n_x - 2:
                raise ValueError(f"n_modes must lie in [1, {self.n_x - 2}], got {modes}")
            object.__setattr__(self, "n_modes", int(modes))

    @cached_property
    def x(self) -> np.ndarray:
        return uniform_grid(self.n_x)

    @property
    def h(self) -> float:
        return np.pi / (self.n_x - 1)

    @property
    def size(self) -> int:
        """Dimension of the coefficient space."""
        if self.discretization is Discretization.SINE_GALERKIN:
            return int(self.n_modes)  # type: ignore[arg-type]
        return self.n_x - 2

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(1, self.size + 1, dtype=float)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Synthesis matrix of shape (n_x, size); boundary rows are exactly zero.

        The columns are orthonormal for the trapezoid inner product: h * M.T @ M = I.
        """
        if self.discretization is Discretization.SINE_GALERKIN:
            phi = np.sqrt(2.0 / np.pi) * np.sin(np.outer(self.x, self.wavenumbers))
        else:
            phi = np.zeros((self.n_x, self.size))
            phi[1:-1, :] = np.eye(self.size) / np.sqrt(self.h)
        phi[0, :] = 0.0
        phi[-1, :] = 0.0
        return phi

    @cached_property
    def curvature(self) -> np.ndarray:
        """Matrix L with stiffness(p) = L.T @ gram(p) @ L (second derivative up to sign)."""
        if self.discretization is Discretization.SINE_GALERKIN:
            return np.diag(self.wavenumbers**2)
        n = self.size
        stencil = sparse.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n))
        return stencil.toarray() / self.h**2

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """Project grid samples (..., n_x) onto the basis: h * values @ M."""
        return self.h * (np.asarray(values) @ self.matrix)

    def synthesize(self, coefficients: np.ndarray) -> np.ndarray:
        """Map coefficients (..., size) back to grid samples (..., n_x)."""
        return np.asarray(coefficients) @ self.matrix.T

    def gram(self, weight: np.ndarray) -> np.ndarray:
        """Matrix of y -> weight * y in coefficient space: h * M.T diag(weight) M."""
        weight = np.asarray(weight, dtype=float)
        phi = self.matrix
        return self.h * (phi.T * weight) @ phi

    def stiffness(self, p: np.ndarray) -> np.ndarray:
        """Matrix of y -> (p y'')'' in coefficient space, pinned ends eliminated."""
        if self.discretization is Discretization.SINE_GALERKIN:
            k2 = self.wavenumbers**2
            return self.gram(p) * np.outer(k2, k2)
        curvature = self.curvature
        return curvature.T @ self.gram(p) @ curvature

    def energy(self, p: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
        """Bending energy c.T stiffness(p) c per column, evaluated in factored form."""
        bent = self.curvature @ coefficients
        return np.sum(bent * (self.gram(p) @ bent), axis=0)

    def second_derivative(self, values: np.ndarray) -> np.ndarray:
        """Grid second derivative consistent with the discretization."""
        if self.discretization is Discretization.SINE_GALERKIN:
            return spectral_second_derivative(values)
        values = np.asarray(values)
        out = np.zeros_like(values)
        padded = values.copy()
        padded[..., 0] = 0.0
        padded[..., -1] = 0.0
        out[..., 1:-1] = (
            padded[..., :-2] - 2.0 * padded[..., 1:-1] + padded[..., 2:]
        ) / self.h**2
        return out

    def resolve(self, values: np.ndarray) -> np.ndarray:
        """Orthogonal projection of grid samples onto the span of the basis."""
        return self.synthesize(self.analyze(values))

    def apply_stiffness(self, p: np.ndarray, values: np.ndarray) -> np.ndarray:
        """
        Grid samples of (p y'')'' for pinned samples y.

        The samples are projected onto the basis first, so only the resolved sine
        modes are differentiated.
        """
        values = self.resolve(values)
        return self.second_derivative(np.asarray(p) * self.second_derivative(values))

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial as _Poly

from pinnedbeam.generators.base_generator import BaseGenerator, GeneratorName


def _default_alpha() -> list[float]:
    # 0.05 x (pi - x), which vanishes at both ends
    return [0.0, 0.05 * np.pi, -0.05]


@dataclass
class Polynomial(BaseGenerator):
    """
    Generators alpha and beta given as polynomials in x.

    Coefficients are listed in increasing degree. The caller is responsible for
    alpha + beta vanishing at 0 and pi; `build_profile` rejects pairs that do not.

    Default: `alpha = 0.05 x (pi - x)`, `beta = 0`
    """

    generator_name: str = GeneratorName.POLYNOMIAL.value
    _alpha_coefficients: list[float] = field(default_factory=_default_alpha)
    _beta_coefficients: list[float] = field(default_factory=lambda: [0.0])

    def alpha_coefficients(self, coefficients: list[float]) -> Polynomial:
        """
        Set the coefficients of alpha in increasing degree.

        Args:
            coefficients: Polynomial coefficients.

        Returns:
            The `Polynomial` instance for method chaining.
        """
        self._alpha_coefficients = [float(c) for c in coefficients]
        return self

    def beta_coefficients(self, coefficients: list[float]) -> Polynomial:
        """
        Set the coefficients of beta in increasing degree.

        Args:
            coefficients: Polynomial coefficients.

        Returns:
            The `Polynomial` instance for method chaining.
        """
        self._beta_coefficients = [float(c) for c in coefficients]
        return self

    def scaled(self, amplitude: float) -> Polynomial:
        """
        Use `amplitude * x (pi - x)` for alpha and zero for beta.

        Returns:
            The `Polynomial` instance for method chaining.
        """
        self._alpha_coefficients = [0.0, amplitude * np.pi, -amplitude]
        self._beta_coefficients = [0.0]
        return self

    def alpha(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        return _Poly(self._alpha_coefficients).deriv(order)(np.asarray(x, dtype=float))

    def beta(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        return _Poly(self._beta_coefficients).deriv(order)(np.asarray(x, dtype=float))

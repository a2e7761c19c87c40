from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.polynomial import polynomial as P


class ModelName(Enum):
    """Enumeration of the built-in forcing models.

    The values are the names accepted by the `[forcing] model` config key.
    """

    # f = g(x) cos t
    LINEAR_FORCING = "linear_forcing"

    # f = u^3 + g(x) cos t
    CUBIC = "cubic"

    # f = u^2 + g(x) cos t
    QUADRATIC = "quadratic"

    # f = u
    IDENTITY = "identity"


class LoadShape(Enum):
    """Spatial shape of a load term, accepted by `[forcing] g` and `[forcing] static`."""

    SINE = "sine"
    CONSTANT = "constant"
    NONE = "none"


def load_profile(shape: LoadShape | str, amplitude: float, x: np.ndarray) -> np.ndarray:
    """Samples of `amplitude * shape(x)` on the grid `x`."""
    shape = LoadShape(shape)
    x = np.asarray(x, dtype=float)
    match shape:
        case LoadShape.SINE:
            return amplitude * np.sin(x)
        case LoadShape.CONSTANT:
            return np.full_like(x, float(amplitude))
        case LoadShape.NONE:
            return np.zeros_like(x)


@dataclass
class ForcingModel:
    """Base class for forcings f(t, x, u) = P(u) + g(x) cos t + s(x).

    P is a polynomial in u with coefficients in increasing degree. The periodic load g
    and the static load s are set with `load` and `static_load`. Subclasses fix the name
    and the default polynomial.

    Attributes:
        model_name (str): The name of the model.
        smoothness_k (int): Declared order of differentiability in u.
    """

    model_name: str
    _coefficients: tuple[float, ...] = (0.0,)
    _load_shape: LoadShape = LoadShape.SINE
    _load_amplitude: float = 1.0
    _static_shape: LoadShape = LoadShape.NONE
    _static_amplitude: float = 0.0
    smoothness_k: int = field(default=8)

    def load(self, shape: LoadShape | str, amplitude: float = 1.0) -> ForcingModel:
        """
        Set the periodic load g(x) cos t.

        Args:
            shape: Spatial shape of g.
            amplitude: Amplitude of g.

        Returns:
            The model instance for method chaining.
        """
        self._load_shape = LoadShape(shape)
        self._load_amplitude = float(amplitude)
        return self

    def static_load(self, shape: LoadShape | str, amplitude: float = 1.0) -> ForcingModel:
        """
        Set the time-independent load s(x).

        Returns:
            The model instance for method chaining.
        """
        self._static_shape = LoadShape(shape)
        self._static_amplitude = float(amplitude)
        return self

    @property
    def coefficients(self) -> tuple[float, ...]:
        return self._coefficients

    @property
    def is_linear(self) -> bool:
        """True when P is affine in u, so f'' vanishes identically."""
        return len(np.trim_zeros(np.asarray(self._coefficients), "b")) <= 2

    def polynomial(self, derivative: int = 0) -> np.ndarray:
        """Coefficients of the `derivative`-th u-derivative of P."""
        if derivative < 0:
            raise ValueError(f"derivative must be non-negative, got {derivative}")
        coefficients = np.asarray(self._coefficients, dtype=float)
        return P.polyder(coefficients, derivative) if derivative else coefficients

    def nonlinearity(self, u: np.ndarray, derivative: int = 0) -> np.ndarray:
        """Evaluate the `derivative`-th u-derivative of P at `u`."""
        u = np.asarray(u, dtype=float)
        return P.polyval(u, self.polynomial(derivative)) + np.zeros_like(u)

    def g(self, x: np.ndarray) -> np.ndarray:
        """Spatial profile of the periodic load."""
        return load_profile(self._load_shape, self._load_amplitude, x)

    def s(self, x: np.ndarray) -> np.ndarray:
        """Spatial profile of the static load."""
        return load_profile(self._static_shape, self._static_amplitude, x)

    def evaluate(
        self, t: np.ndarray, x: np.ndarray, u: np.ndarray, derivative: int = 0
    ) -> np.ndarray:
        """Pointwise value of the `derivative`-th u-derivative of f."""
        values = self.nonlinearity(u, derivative)
        if derivative == 0:
            values = values + self.g(x) * np.cos(t) + self.s(x)
        return values

    def f(self, t: np.ndarray, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return self.evaluate(t, x, u, 0)

    def fu(self, t: np.ndarray, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return self.evaluate(t, x, u, 1)

    def fuu(self, t: np.ndarray, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return self.evaluate(t, x, u, 2)

    def __str__(self) -> str:
        return (
            f"{self.model_name}(P={list(self._coefficients)}, "
            f"g={self._load_shape.value}:{self._load_amplitude:g}, "
            f"s={self._static_shape.value}:{self._static_amplitude:g})"
        )

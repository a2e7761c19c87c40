from __future__ import annotations

from abc import abstractmethod
from dataclasses import dataclass
from enum import Enum

import numpy as np

from pinnedbeam.coefficients import GeneratorPair
from pinnedbeam.discretization import uniform_grid


class GeneratorName(Enum):
    """Enumeration of the built-in coefficient generators.

    The values are the names accepted by the `[coefficients] generator` config key.
    """

    # alpha = beta = 0, the constant beam
    ZERO = "zero"

    # alpha = a sin x, beta = -a sin x
    SINE_PAIR = "sine_pair"

    # alpha, beta polynomials in x
    POLYNOMIAL = "polynomial"

    # alpha, beta given as samples on the grid
    SAMPLES = "samples"


@dataclass
class BaseGenerator:
    """Abstract base class for generator functions alpha and beta.

    Subclasses implement `alpha` and `beta`, returning the function or one of its first
    three derivatives at the requested points.

    Attributes:
        generator_name (str): The name of the generator.
    """

    generator_name: str

    @abstractmethod
    def alpha(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        """Return the `order`-th derivative of alpha at `x`."""
        ...

    @abstractmethod
    def beta(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        """Return the `order`-th derivative of beta at `x`."""
        ...

    def pair(self, n_x: int, p0: float = 1.0) -> GeneratorPair:
        """Sample the generator and its derivatives on the uniform grid.

        Args:
            n_x: Number of grid points.
            p0: Initial flexural rigidity at x = 0.

        Returns:
            GeneratorPair: Samples with analytic derivatives attached.
        """
        x = uniform_grid(n_x)
        return GeneratorPair(
            alpha=self.alpha(x),
            beta=self.beta(x),
            p0=p0,
            alpha_derivatives=tuple(self.alpha(x, k) for k in (1, 2, 3)),  # type: ignore[arg-type]
            beta_derivatives=tuple(self.beta(x, k) for k in (1, 2, 3)),  # type: ignore[arg-type]
            name=self.generator_name,
        )

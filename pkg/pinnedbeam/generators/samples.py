from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from pinnedbeam.coefficients import GeneratorPair, finite_difference
from pinnedbeam.generators.base_generator import BaseGenerator, GeneratorName


@dataclass
class Samples(BaseGenerator):
    """
    Generators alpha and beta given as samples on the uniform grid of [0, pi].

    Derivatives come from seven-point finite differences of the samples, so the
    samples must be smooth enough for third differences to be meaningful.
    """

    generator_name: str = GeneratorName.SAMPLES.value
    _alpha: np.ndarray = field(default_factory=lambda: np.zeros(0))
    _beta: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def values(self, alpha: np.ndarray, beta: np.ndarray) -> Samples:
        """
        Set the samples.

        Args:
            alpha: Samples of alpha.
            beta: Samples of beta, same length.

        Returns:
            The `Samples` instance for method chaining.
        """
        alpha = np.asarray(alpha, dtype=float)
        beta = np.asarray(beta, dtype=float)
        if alpha.shape != beta.shape or alpha.ndim != 1:
            raise ValueError("alpha and beta samples must be 1-D and of equal length")
        self._alpha = alpha
        self._beta = beta
        return self

    def from_csv(self, path: str | Path) -> Samples:
        """
        Read samples from a CSV file with `alpha` and `beta` header columns.

        Returns:
            The `Samples` instance for method chaining.
        """
        table = np.genfromtxt(path, delimiter=",", names=True)
        return self.values(table["alpha"], table["beta"])

    def _derivative(self, values: np.ndarray, x: np.ndarray, order: int) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.size != values.size:
            raise ValueError(
                f"samples have {values.size} points but {x.size} were requested"
            )
        if order == 0:
            return values.copy()
        return finite_difference(values, np.pi / (values.size - 1), order)

    def alpha(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        return self._derivative(self._alpha, x, order)

    def beta(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        return self._derivative(self._beta, x, order)

    def pair(self, n_x: int | None = None, p0: float = 1.0) -> GeneratorPair:
        """Wrap the samples, leaving derivatives to finite differences."""
        if n_x is not None and n_x != self._alpha.size:
            raise ValueError(f"samples have {self._alpha.size} points, not {n_x}")
        return GeneratorPair(
            alpha=self._alpha, beta=self._beta, p0=p0, name=self.generator_name
        )

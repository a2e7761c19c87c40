from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pinnedbeam.generators.base_generator import BaseGenerator, GeneratorName

# d^k/dx^k sin x = sign * trig(x)
_SINE_DERIVATIVES = (
    (1.0, np.sin),
    (1.0, np.cos),
    (-1.0, np.sin),
    (-1.0, np.cos),
)


@dataclass
class SinePair(BaseGenerator):
    """
    Generator alpha = a sin x, beta = -a sin x.

    The pair satisfies the boundary constraint for every amplitude and gives
    rho(x) = exp(4a(1 - cos x)) and p(x) = p0 exp(-4a(1 - cos x)).

    Default amplitude: `0.05`
    """

    generator_name: str = GeneratorName.SINE_PAIR.value
    _amplitude: float = 0.05

    def amplitude(self, value: float) -> SinePair:
        """
        Set the amplitude a.

        Args:
            value: The amplitude.

        Returns:
            The `SinePair` instance for method chaining.
        """
        self._amplitude = float(value)
        return self

    def _sine(self, x: np.ndarray, order: int) -> np.ndarray:
        sign, trig = _SINE_DERIVATIVES[order % 4]
        return sign * self._amplitude * trig(np.asarray(x, dtype=float))

    def alpha(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        return self._sine(x, order)

    def beta(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        return -self._sine(x, order)

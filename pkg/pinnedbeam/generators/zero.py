from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pinnedbeam.generators.base_generator import BaseGenerator, GeneratorName


@dataclass
class Zero(BaseGenerator):
    """
    Generator alpha = beta = 0, which yields the constant beam rho = p = 1.

    Default profile: `rho = 1`, `p = 1`, `zeta = 1`, `phi(x) = x`.
    """

    generator_name: str = GeneratorName.ZERO.value

    def alpha(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=float))

    def beta(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=float))

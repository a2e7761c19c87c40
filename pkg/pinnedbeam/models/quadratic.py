from __future__ import annotations

from dataclasses import dataclass

from pinnedbeam.models.base_model import ForcingModel, ModelName


@dataclass
class QuadraticForcing(ForcingModel):
    """
    Forcing f = u^2 + g(x) cos t.

    Default load: `sin x`
    """

    model_name: str = ModelName.QUADRATIC.value
    _coefficients: tuple[float, ...] = (0.0, 0.0, 1.0)

from __future__ import annotations

from dataclasses import dataclass

from pinnedbeam.models.base_model import ForcingModel, ModelName


@dataclass
class CubicForcing(ForcingModel):
    """
    Forcing f = u^3 + g(x) cos t.

    Default load: `sin x`

    Example:
        model = CubicForcing().load("sine", 2.0)
        model.f(0.0, x, u)  # u**3 + 2 sin x
    """

    model_name: str = ModelName.CUBIC.value
    _coefficients: tuple[float, ...] = (0.0, 0.0, 0.0, 1.0)

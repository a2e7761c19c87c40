from __future__ import annotations

from dataclasses import dataclass

from pinnedbeam.models.base_model import ForcingModel, LoadShape, ModelName


@dataclass
class IdentityForcing(ForcingModel):
    """
    The forcing f = u, unloaded unless `load` is called.
    """

    model_name: str = ModelName.IDENTITY.value
    _coefficients: tuple[float, ...] = (0.0, 1.0)
    _load_shape: LoadShape = LoadShape.NONE
    _load_amplitude: float = 0.0

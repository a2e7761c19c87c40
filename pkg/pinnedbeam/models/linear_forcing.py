from __future__ import annotations

from dataclasses import dataclass

from pinnedbeam.models.base_model import ForcingModel, ModelName


@dataclass
class LinearForcing(ForcingModel):
    """
    The u-independent forcing f = g(x) cos t.

    Default load: `sin x`
    """

    model_name: str = ModelName.LINEAR_FORCING.value

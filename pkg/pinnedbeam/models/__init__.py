from .base_model import ForcingModel, LoadShape, ModelName, load_profile
from .cubic import CubicForcing
from .identity import IdentityForcing
from .linear_forcing import LinearForcing
from .quadratic import QuadraticForcing

__all__ = [
    "CubicForcing",
    "ForcingModel",
    "IdentityForcing",
    "LinearForcing",
    "LoadShape",
    "ModelName",
    "QuadraticForcing",
    "load_profile",
]

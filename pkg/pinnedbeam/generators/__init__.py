from .base_generator import BaseGenerator, GeneratorName
from .polynomial import Polynomial
from .samples import Samples
from .sine_pair import SinePair
from .zero import Zero

__all__ = [
    "BaseGenerator",
    "GeneratorName",
    "Polynomial",
    "Samples",
    "SinePair",
    "Zero",
]

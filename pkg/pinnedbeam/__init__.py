import logging

from pinnedbeam.beam import PeriodicBeam, Preset

from .coefficients import CoefficientProfile, GeneratorPair, build_profile
from .config import InversionMethod, RunConfig, StagePolicy
from .context import BeamContext
from .discretization import Discretization, SpatialBasis
from .eigensolver import Spectrum
from .errors import BeamError, ConfigError
from .fields import TimeFourierField, sobolev_norm
from .generators import Polynomial, Samples, SinePair, Zero
from .models import CubicForcing, IdentityForcing, LinearForcing, QuadraticForcing
from .nash_moser import IterationSchedule, NashMoserState
from .reporting import SolveReport, StageRecord
from .sieve import Family, MeasureReport, MelnikovCertificate, check_melnikov

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "BeamContext",
    "BeamError",
    "CoefficientProfile",
    "ConfigError",
    "CubicForcing",
    "Discretization",
    "Family",
    "GeneratorPair",
    "IdentityForcing",
    "InversionMethod",
    "IterationSchedule",
    "LinearForcing",
    "MeasureReport",
    "MelnikovCertificate",
    "NashMoserState",
    "PeriodicBeam",
    "Polynomial",
    "Preset",
    "QuadraticForcing",
    "RunConfig",
    "Samples",
    "SinePair",
    "SolveReport",
    "SpatialBasis",
    "Spectrum",
    "StagePolicy",
    "StageRecord",
    "TimeFourierField",
    "Zero",
    "build_profile",
    "check_melnikov",
    "sobolev_norm",
]

"""Exception hierarchy for pinnedbeam.

Every failure the numerics can detect is a subclass of `BeamError`. The command line
maps `BeamError` to exit code 2 and `ConfigError` to exit code 1.
"""


class BeamError(Exception):
    """Base class for all domain errors raised by pinnedbeam."""


class ConfigError(BeamError, ValueError):
    """Raised when a configuration file or mapping is invalid."""


# Coefficients


class BoundaryConstraintViolated(BeamError):
    """Raised when alpha + beta does not vanish at both ends of the beam."""


class NonPositiveCoefficient(BeamError):
    """Raised when rho or p is non-finite or not strictly positive."""


class ProfileCorrupted(BeamError):
    """Raised when the Liouville variable phi is not strictly increasing."""


class InsufficientSmoothness(BeamError):
    """Raised when third derivatives of the generators are dominated by noise."""


# Eigensolver


class SingularMass(BeamError):
    """Raised when the mass density has a non-positive sample."""


class ResolutionExceeded(BeamError):
    """Raised when more eigenpairs are requested than the grid resolves."""


class EigenSolverFailure(BeamError):
    """Raised when the eigensolver fails or its output violates an invariant."""


class IndexOutOfRange(BeamError, IndexError):
    """Raised when an eigenvalue index lies outside the computed range."""


# Forcing and bifurcation equation


class NonFiniteEvaluation(BeamError):
    """Raised when a forcing model returns non-finite values."""


class NewtonDiverged(BeamError):
    """Raised when the bifurcation-equation Newton iteration fails to converge."""


class DegenerateLinearization(BeamError):
    """Raised when the bifurcation-equation linearization is numerically singular."""


# Linearized operator


class SingularOperator(BeamError):
    """Raised when the linearized operator has a zero pivot."""


class NeumannDiverged(BeamError):
    """Raised when the preconditioned Neumann series stops decreasing."""


# Iteration and sieve


class ContractionFailed(BeamError):
    """Raised when a fixed-point iteration does not contract."""


class SmallnessViolated(BeamError):
    """Raised when an iterate leaves the unit ball of the high Sobolev norm."""


class UncertifiedParameters(BeamError):
    """Raised when (epsilon, omega) fails the non-resonance certificate."""


class WindowUnderflow(BeamError):
    """Raised when the spectrum does not cover the window a certificate needs."""

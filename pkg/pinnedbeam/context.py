"""Shared, immutable problem data for the solvers: profile, basis, forcing and tolerances."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .coefficients import CoefficientProfile
from .config import SolverSettings
from .discretization import SpatialBasis
from .eigensolver import EigenProblem, Spectrum, solve_spectrum
from .errors import ResolutionExceeded
from .fields import TimeFourierField
from .forcing import compose
from .models import ForcingModel

logger = logging.getLogger(__name__)

SPECTRUM_CACHE_SIZE = 16


@dataclass
class BeamContext:
    """
    Problem data shared by the bifurcation, operator and iteration solvers.

    Attributes:
        profile (CoefficientProfile): Beam coefficients.
        basis (SpatialBasis): Spatial discretization on the profile grid.
        model (ForcingModel): The forcing.
        settings (SolverSettings): Tolerances and iteration limits.
    """

    profile: CoefficientProfile
    basis: SpatialBasis
    model: ForcingModel
    settings: SolverSettings = field(default_factory=SolverSettings)
    _spectra: dict[tuple[str, int], Spectrum] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.basis.n_x != self.profile.n_x:
            raise ValueError("basis and profile grids differ")

    @property
    def x(self) -> np.ndarray:
        return self.profile.x

    @property
    def n_x(self) -> int:
        return self.profile.n_x

    @cached_property
    def stiffness(self) -> np.ndarray:
        """Basis matrix of y -> (p y'')''."""
        return self.basis.stiffness(self.profile.p)

    @cached_property
    def mass(self) -> np.ndarray:
        """Basis matrix of y -> rho y."""
        return self.basis.gram(self.profile.rho)

    @property
    def max_modes(self) -> int:
        """Largest number of eigenpairs the grid resolves."""
        return min(self.n_x // 8, self.basis.size)

    def problem(self, potential: np.ndarray | None = None) -> EigenProblem:
        g = np.zeros_like(self.x) if potential is None else np.asarray(potential, dtype=float)
        return EigenProblem(profile=self.profile, potential_g=g, basis=self.basis)

    def spectrum(self, potential: np.ndarray | None = None, J: int | None = None) -> Spectrum:
        """
        The J smallest eigenpairs at the potential g, memoized on the potential's bytes.

        Args:
            potential: Samples of g; zero when omitted.
            J: Number of eigenpairs; `settings.J` when omitted.
        """
        problem = self.problem(potential)
        J = J or self.settings.J
        key = (hashlib.sha1(problem.potential_g.tobytes()).hexdigest(), J)
        cached = self._spectra.get(key)
        if cached is None:
            cached = solve_spectrum(problem, J, self.settings.tol_eig)
            if len(self._spectra) >= SPECTRUM_CACHE_SIZE:
                self._spectra.pop(next(iter(self._spectra)))
            self._spectra[key] = cached
        return cached

    def covering_spectrum(
        self, potential: np.ndarray | None, top: float, J: int | None = None
    ) -> Spectrum:
        """
        A spectrum whose largest real mu reaches `top`, doubling J from `J` as needed.

        The result holds at least `J` eigenpairs. It may fall short of `top` when the grid
        resolves no more modes; callers check coverage.
        """
        J = min(J or self.settings.J, self.max_modes)
        while True:
            spectrum = self.spectrum(potential, J)
            real = spectrum.mus.real[np.isreal(spectrum.mus)]
            if (real.size and real.max() >= top) or J >= self.max_modes:
                return spectrum
            J = min(2 * J, self.max_modes)

    def compose(
        self, u: TimeFourierField, derivative: int = 0, n_out: int | None = None
    ) -> TimeFourierField:
        return compose(self.model, u, derivative, n_out, self.x)

    def check_resolution(self, J: int) -> None:
        if J > self.max_modes:
            raise ResolutionExceeded(f"J={J} exceeds the resolved range {self.max_modes}")

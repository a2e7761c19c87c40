"""Pinned-pinned fourth-order eigenproblem (p y'')'' - g y = lambda rho y.

The problem is discretized by a `SpatialBasis` into a symmetric pencil
(stiffness, mass) and solved for its smallest eigenpairs. Eigenvalues are refined by
Rayleigh quotients evaluated in factored form, which keeps their roundoff proportional
to lambda_j instead of the largest stiffness entry.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import LinAlgError, eig_banded, eigh

from .coefficients import CoefficientProfile
from .discretization import Discretization, SpatialBasis
from .errors import (
    EigenSolverFailure,
    IndexOutOfRange,
    InsufficientSmoothness,
    ResolutionExceeded,
    SingularMass,
)

logger = logging.getLogger(__name__)

TOL_EIG = 1e-8
SMOOTHNESS_RATIO = 1e3
RESOLUTION_FRACTION = 8
ASYMPTOTIC_VALIDITY_FRACTION = 32


@dataclass(frozen=True)
class EigenProblem:
    """
    The operator y -> (p y'')'' - g y with weight rho and pinned ends.

    Attributes:
        profile (CoefficientProfile): Coefficients rho and p.
        potential_g (np.ndarray): Samples of the zeroth-order coefficient g.
        basis (SpatialBasis): Discretization on the profile grid.
    """

    profile: CoefficientProfile
    potential_g: np.ndarray
    basis: SpatialBasis

    def __post_init__(self) -> None:
        g = np.asarray(self.potential_g, dtype=float)
        if g.shape != self.profile.x.shape:
            raise ValueError("potential_g must be sampled on the profile grid")
        if self.basis.n_x != self.profile.n_x:
            raise ValueError("basis and profile grids differ")
        object.__setattr__(self, "potential_g", g)

    @classmethod
    def unperturbed(
        cls, profile: CoefficientProfile, basis: SpatialBasis | None = None
    ) -> EigenProblem:
        """The problem with g = 0."""
        return cls(
            profile=profile,
            potential_g=np.zeros_like(profile.x),
            basis=basis or SpatialBasis(profile.n_x),
        )

    @property
    def n_x(self) -> int:
        return self.profile.n_x


def mus_from_lambdas(lambdas: np.ndarray) -> np.ndarray:
    """mu = sqrt(lambda) for lambda >= 0 and i sqrt(-lambda) otherwise."""
    lambdas = np.asarray(lambdas, dtype=float)
    root = np.sqrt(np.abs(lambdas))
    return np.where(lambdas >= 0, root, 1j * root).astype(complex)


@dataclass(frozen=True)
class Spectrum:
    """
    The smallest J eigenpairs of an `EigenProblem`.

    Attributes:
        lambdas (np.ndarray): Increasing eigenvalues.
        mus (np.ndarray): Complex square roots of the eigenvalues.
        eigenfunctions (np.ndarray): Grid samples, shape (J, n_x), rho-orthonormal.
        coefficients (np.ndarray): Eigenvectors in basis coordinates, shape (size, J).
        potential (np.ndarray): The potential g the spectrum was computed for.
        gap (float): Minimum of |mu_{j+1} - mu_j|.
        nu0 (float): Minimum of |lambda_j|.
        shift_M (float): max(0, -lambda_1) + 1.
        residuals (np.ndarray): Backward errors of the eigenpairs.
    """

    lambdas: np.ndarray
    mus: np.ndarray
    eigenfunctions: np.ndarray
    coefficients: np.ndarray
    potential: np.ndarray
    gap: float
    nu0: float
    shift_M: float
    residuals: np.ndarray
    basis: SpatialBasis = field(repr=False)
    rho: np.ndarray = field(repr=False)

    @property
    def J(self) -> int:
        return self.lambdas.size

    def project(self, values: np.ndarray) -> np.ndarray:
        """Plain inner products <psi_j, y>, shape (..., J)."""
        return self.basis.analyze(values) @ self.coefficients

    def expand(self, values: np.ndarray) -> np.ndarray:
        """Expansion coefficients <psi_j, y>_rho, shape (..., J)."""
        return self.project(np.asarray(values) * self.rho)

    def synthesize(self, coordinates: np.ndarray) -> np.ndarray:
        """Grid samples of sum_j c_j psi_j, shape (..., n_x)."""
        return np.asarray(coordinates) @ self.eigenfunctions

    def truncated(self, J: int) -> Spectrum:
        """The first `J` eigenpairs."""
        if not 1 <= J <= self.J:
            raise IndexOutOfRange(f"cannot truncate {self.J} eigenpairs to {J}")
        lambdas = self.lambdas[:J]
        mus = self.mus[:J]
        return Spectrum(
            lambdas=lambdas,
            mus=mus,
            eigenfunctions=self.eigenfunctions[:J],
            coefficients=self.coefficients[:, :J],
            potential=self.potential,
            gap=_gap(mus),
            nu0=float(np.min(np.abs(lambdas))),
            shift_M=self.shift_M,
            residuals=self.residuals[:J],
            basis=self.basis,
            rho=self.rho,
        )


def _gap(mus: np.ndarray) -> float:
    if mus.size < 2:
        return float("inf")
    return float(np.min(np.abs(np.diff(mus))))


def assemble(problem: EigenProblem) -> tuple[np.ndarray, np.ndarray]:
    """
    Discretize the eigenproblem in basis coordinates.

    Args:
        problem: The eigenproblem.

    Returns:
        tuple[np.ndarray, np.ndarray]: The symmetric stiffness of
        y -> (p y'')'' - g y and the symmetric positive mass of y -> rho y.

    Raises:
        SingularMass: If some sample of rho is not positive.
    """
    rho = problem.profile.rho
    if np.any(rho <= 0) or not np.all(np.isfinite(rho)):
        raise SingularMass("rho must be positive at every grid point")
    basis = problem.basis
    stiffness = basis.stiffness(problem.profile.p) - basis.gram(problem.potential_g)
    mass = basis.gram(rho)
    return 0.5 * (stiffness + stiffness.T), 0.5 * (mass + mass.T)


def _to_upper_band(matrix: np.ndarray, bandwidth: int) -> np.ndarray:
    n = matrix.shape[0]
    band = np.zeros((bandwidth + 1, n))
    for offset in range(bandwidth + 1):
        band[bandwidth - offset, offset:] = np.diagonal(matrix, offset=offset)
    return band


def _banded_pairs(
    stiffness: np.ndarray, mass: np.ndarray, J: int
) -> tuple[np.ndarray, np.ndarray]:
    # diagonal mass: reduce to a standard pentadiagonal problem
    scale = 1.0 / np.sqrt(np.diag(mass))
    reduced = stiffness * np.outer(scale, scale)
    values, vectors = eig_banded(
        _to_upper_band(reduced, 2), lower=False, select="i", select_range=(0, J - 1)
    )
    return values, vectors * scale[:, None]


def solve_spectrum(problem: EigenProblem, J: int, tol_eig: float = TOL_EIG) -> Spectrum:
    """
    Compute the J smallest eigenpairs.

    Args:
        problem: The eigenproblem.
        J: Number of eigenpairs.
        tol_eig: Bound on the backward error of every eigenpair.

    Returns:
        Spectrum: Ordered, rho-orthonormal eigenpairs.

    Raises:
        ResolutionExceeded: If J exceeds n_x / 8 or the basis dimension.
        EigenSolverFailure: If the solver fails or an invariant does not hold.
    """
    if J < 1:
        raise ValueError(f"J must be positive, got {J}")
    basis = problem.basis
    if J > problem.n_x // RESOLUTION_FRACTION or J > basis.size:
        raise ResolutionExceeded(
            f"J={J} exceeds the resolved range (n_x/{RESOLUTION_FRACTION}="
            f"{problem.n_x // RESOLUTION_FRACTION}, basis size {basis.size})"
        )
    stiffness, mass = assemble(problem)
    try:
        if basis.discretization is Discretization.FINITE_DIFFERENCE:
            _, vectors = _banded_pairs(stiffness, mass, J)
        else:
            _, vectors = eigh(stiffness, mass, subset_by_index=[0, J - 1])
    except (LinAlgError, ValueError) as exc:
        raise EigenSolverFailure(f"eigensolver failed: {exc}") from exc

    norms = np.sum(vectors * (mass @ vectors), axis=0)
    vectors = vectors / np.sqrt(norms)
    potential_energy = np.sum(vectors * (basis.gram(problem.potential_g) @ vectors), axis=0)
    lambdas = basis.energy(problem.profile.p, vectors) - potential_energy
    order = np.argsort(lambdas)
    lambdas, vectors = lambdas[order], vectors[:, order]
    if not np.all(np.isfinite(lambdas)) or np.any(np.diff(lambdas) <= 0):
        raise EigenSolverFailure("eigenvalues are not finite and strictly increasing")

    scale = np.linalg.norm(stiffness, np.inf) + np.abs(lambdas) * np.linalg.norm(
        mass, np.inf
    )
    defect = stiffness @ vectors - (mass @ vectors) * lambdas
    residuals = np.linalg.norm(defect, axis=0) / (scale * np.linalg.norm(vectors, axis=0))
    if np.any(residuals > tol_eig):
        worst = int(np.argmax(residuals))
        raise EigenSolverFailure(
            f"eigenpair {worst + 1} has backward error {residuals[worst]:.2e} > {tol_eig:.1e}"
        )

    mus = mus_from_lambdas(lambdas)
    spectrum = Spectrum(
        lambdas=lambdas,
        mus=mus,
        eigenfunctions=basis.synthesize(vectors.T),
        coefficients=vectors,
        potential=problem.potential_g,
        gap=_gap(mus),
        nu0=float(np.min(np.abs(lambdas))),
        shift_M=float(max(0.0, -lambdas[0]) + 1.0),
        residuals=residuals,
        basis=basis,
        rho=problem.profile.rho,
    )
    logger.debug(
        "spectrum J=%d lambda_1=%.12g lambda_J=%.12g gap=%.6g",
        J,
        lambdas[0],
        lambdas[-1],
        spectrum.gap,
    )
    return spectrum


def eigenvalue_derivative(
    problem: EigenProblem, spectrum: Spectrum, j: int, h: np.ndarray
) -> float:
    """
    Directional derivative of lambda_j under g -> g + t h at t = 0.

    Equals -int psi_j^2 h dx, which is the exact derivative of the discrete eigenvalue.

    Raises:
        IndexOutOfRange: If j is not in 1..J.
    """
    if not 1 <= j <= spectrum.J:
        raise IndexOutOfRange(f"j={j} outside 1..{spectrum.J}")
    h = np.asarray(h, dtype=float)
    if h.shape != problem.profile.x.shape:
        raise ValueError("h must be sampled on the profile grid")
    psi = spectrum.eigenfunctions[j - 1]
    return float(-problem.basis.h * np.sum(psi**2 * h))


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """
    Coefficients of the large-j expansion
    lambda_j = j^4 + 2 j^2 upsilon0 + upsilon1 - varrho_j + o(1/j).

    Attributes:
        upsilon0 (float): Coefficient of 2 j^2.
        upsilon1 (float): Constant term.
        varrho (np.ndarray): Oscillatory terms for j = 1..J.
        varrho0 (float): The j = 0 evaluation of the profile part of varrho.
        intermediates (dict[str, np.ndarray]): Auxiliary functions on the grid, keyed
            `d`, `chi`, `e`, `g`, `z`, `eta_plus`, `eta_minus`.
        remainder (float): M with |r_j| <= M / j on the computed spectrum; 0 until
            `fit_remainder` sets it.
    """

    upsilon0: float
    upsilon1: float
    varrho: np.ndarray
    varrho0: float
    intermediates: dict[str, np.ndarray] = field(repr=False)
    remainder: float = 0.0

    def predicted(self, j: np.ndarray) -> np.ndarray:
        """Asymptotic eigenvalues j^4 + 2 j^2 upsilon0 + upsilon1 - varrho_j."""
        j = np.asarray(j)
        return self.smooth(j) - self.varrho[j - 1]

    def smooth(self, j: np.ndarray | int) -> np.ndarray:
        """The non-oscillatory part j^4 + 2 j^2 upsilon0 + upsilon1."""
        j = np.asarray(j, dtype=float)
        return j**4 + 2.0 * j**2 * self.upsilon0 + self.upsilon1

    def lambda_slack(self, j: np.ndarray | int) -> np.ndarray:
        """
        Bound |varrho_j| + M / j on |lambda_j - smooth(j)|.

        Beyond the computed terms |varrho_j| is bounded by C / j, C = max_j j |varrho_j|.
        """
        j = np.asarray(j)
        size = self.varrho.size
        if size == 0:
            return self.remainder / j
        magnitude = np.abs(self.varrho)
        decay = float(np.max(np.arange(1, size + 1) * magnitude))
        oscillation = np.where(j <= size, magnitude[np.clip(j, 1, size) - 1], decay / j)
        return oscillation + self.remainder / j


def asymptotic_coefficients(
    profile: CoefficientProfile, g: np.ndarray, J: int
) -> AsymptoticCoefficients:
    """
    Evaluate the asymptotic coefficients of the spectrum by quadrature.

    Args:
        profile: The coefficient profile, with its generator pair.
        g: Samples of the potential.
        J: Number of oscillatory terms.

    Returns:
        AsymptoticCoefficients: upsilon0, upsilon1, varrho_1..varrho_J.

    Raises:
        InsufficientSmoothness: If third derivatives of the generators exceed
            1e3 times their maximum.
    """
    gen = profile.generators
    (a1, a2, a3), (b1, b2, b3) = gen.derivatives()
    a, b = gen.alpha, gen.beta
    third = max(np.max(np.abs(a3)), np.max(np.abs(b3)))
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    if third > SMOOTHNESS_RATIO * scale:
        raise InsufficientSmoothness(
            f"third derivative {third:.3e} exceeds {SMOOTHNESS_RATIO:g} x {scale:.3e}"
        )
    g = np.asarray(g, dtype=float)
    x, zeta, phi = profile.x, profile.zeta, profile.phi

    d = (3.0 * a + 5.0 * b) / (2.0 * zeta)
    chi = (5.0 * a**2 + 5.0 * b**2 + 6.0 * a * b) / 4.0
    z = (a + 3.0 * b) / 2.0
    z1 = (a1 + 3.0 * b1) / 2.0
    eta_plus, eta_minus = b + a, b - a
    eta = eta_plus * eta_minus
    eta_plus1, eta_minus1, eta_minus2 = b1 + a1, b1 - a1, b2 - a2
    e = (
        2.0 * z**3 / 3.0
        - eta_minus**3 / 2.0
        - 2.0 * eta * eta_plus
        - (z - eta_minus) * eta_minus * z
        + (z1 - eta_minus1) * z
        - (a1 * eta_minus + a * eta_minus1)
        - eta_minus2 / 4.0
    ) / zeta**3
    g_frak = (
        (eta_minus1 - eta_minus**2 - 2.0 * chi) ** 2 - 8.0 * (eta_plus1 - 2.0 * eta) ** 2
    ) / (8.0 * zeta**4)

    profile_part = (a3 - b3) / (4.0 * zeta**3)
    varrho0 = float(simpson(profile_part, x=x) / np.pi)
    j = np.arange(1, J + 1)
    oscillation = np.cos(2.0 * j[:, None] * phi[None, :])
    varrho = simpson((profile_part - g * zeta) * oscillation, x=x, axis=-1) / np.pi

    upsilon0 = float(d[-1] - d[0] - simpson(chi / zeta, x=x) / np.pi)
    upsilon1 = float(
        e[-1]
        - e[0]
        + simpson(g_frak * zeta, x=x) / np.pi
        + varrho0**2 / 2.0
        - simpson(g * zeta, x=x) / np.pi
    )
    return AsymptoticCoefficients(
        upsilon0=upsilon0,
        upsilon1=upsilon1,
        varrho=np.asarray(varrho),
        varrho0=varrho0,
        intermediates={
            "d": d,
            "chi": chi,
            "e": e,
            "g": g_frak,
            "z": z,
            "eta_plus": eta_plus,
            "eta_minus": eta_minus,
        },
    )


@dataclass(frozen=True)
class AsymptoticsReport:
    """
    Residuals of the spectrum against its asymptotic expansion.

    Attributes:
        js (np.ndarray): Indices checked.
        residuals (np.ndarray): r_j = lambda_j - j^4 - 2 j^2 upsilon0 - upsilon1 + varrho_j.
        slope (float): Least-squares slope of log |r_j| against log j.
        discretization_dominated (bool): True when some j exceeds n_x / 32.
        mu_deviation (float): max_j j^2 |mu_j - (j^2 + upsilon0)| over real mu_j.
    """

    js: np.ndarray
    residuals: np.ndarray
    slope: float
    discretization_dominated: bool
    mu_deviation: float


def verify_asymptotics(
    spectrum: Spectrum,
    asym: AsymptoticCoefficients,
    j_range: tuple[int, int],
    n_x: int | None = None,
) -> AsymptoticsReport:
    """
    Compare computed eigenvalues with their asymptotic expansion.

    Args:
        spectrum: Computed spectrum.
        asym: Asymptotic coefficients for the same profile and potential.
        j_range: Inclusive range (j_lo, j_hi) of indices.
        n_x: Grid size the spectrum was computed on; defaults to the spectrum's grid.

    Returns:
        AsymptoticsReport: Residuals, fitted decay slope and the regime flag.
    """
    j_lo, j_hi = j_range
    if not 1 <= j_lo <= j_hi <= min(spectrum.J, asym.varrho.size):
        raise ValueError(f"j_range {j_range} outside the computed range")
    n_x = n_x or spectrum.basis.n_x
    js = np.arange(j_lo, j_hi + 1)
    residuals = spectrum.lambdas[js - 1] - asym.predicted(js)
    magnitudes = np.abs(residuals)
    if np.all(magnitudes == 0):
        slope = float("nan")
    else:
        floor = np.finfo(float).tiny
        slope = float(np.polyfit(np.log(js), np.log(np.maximum(magnitudes, floor)), 1)[0])
    real = np.isreal(spectrum.mus[js - 1])
    deviation = js**2 * np.abs(spectrum.mus[js - 1].real - (js**2 + asym.upsilon0))
    dominated = bool(j_hi > n_x / ASYMPTOTIC_VALIDITY_FRACTION)
    if dominated:
        logger.warning(
            "j up to %d exceeds n_x/%d=%g: residuals are discretization dominated",
            j_hi,
            ASYMPTOTIC_VALIDITY_FRACTION,
            n_x / ASYMPTOTIC_VALIDITY_FRACTION,
        )
    return AsymptoticsReport(
        js=js,
        residuals=residuals,
        slope=slope,
        discretization_dominated=dominated,
        mu_deviation=float(np.max(deviation[real])) if np.any(real) else float("nan"),
    )


def fit_remainder(
    spectrum: Spectrum, asym: AsymptoticCoefficients, n_x: int | None = None
) -> AsymptoticCoefficients:
    """
    Fit M = max_j j |r_j| over the computed indices where the expansion holds.

    Indices above n_x / 32 are discretization dominated and left out; the first index is
    always used.

    Returns:
        AsymptoticCoefficients: `asym` with `remainder` set to M.
    """
    n_x = n_x or spectrum.basis.n_x
    j_hi = min(spectrum.J, asym.varrho.size, max(1, n_x // ASYMPTOTIC_VALIDITY_FRACTION))
    if j_hi < 1:
        raise ValueError("no computed index to fit the remainder on")
    js = np.arange(1, j_hi + 1)
    residuals = spectrum.lambdas[js - 1] - asym.predicted(js)
    return replace(asym, remainder=float(np.max(js * np.abs(residuals))))

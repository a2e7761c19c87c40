"""The truncated linearized range operator in (time mode, eigenmode) coordinates.

An oscillating field h with modes 1 <= l <= N is represented by coordinates d[l-1, j-1]
with h_l = sum_j d_{l,j} psi_j. The operator returns the plain projections
<psi_j, (-L_omega h + eps P_N Pi_W D F[h])_l>. Since it involves both d and conj(d) it
is real-linear; the dense form acts on [Re d, Im d].
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve, solve, svdvals

from .context import BeamContext
from .eigensolver import Spectrum
from .errors import NeumannDiverged, SingularOperator
from .fields import TimeFourierField
from .lyapunov_schmidt import QSolveState, solve_q

logger = logging.getLogger(__name__)

NEUMANN_TOL = 1e-12
NEUMANN_STALL = 3
RESONANCE_TOL = 1e-12
MAX_DENSE_SIZE = 20000


def sigma_of(tau: float) -> float:
    """Loss of regularity tau (tau - 1) / (2 - tau)."""
    return tau * (tau - 1.0) / (2.0 - tau)


def kappa_of(tau: float) -> float:
    """Regularity margin 6 tau + 4 sigma + 2."""
    return 6.0 * tau + 4.0 * sigma_of(tau) + 2.0


@dataclass(frozen=True)
class LinearizedOperator:
    """
    The linearized operator at (epsilon, omega, w) truncated to N time modes and J
    eigenmodes.

    The action on coordinates d of shape (N, J) is A d + Bc conj(d), flattened row-major.

    Attributes:
        N (int): Time truncation.
        J (int): Eigenmode truncation.
        diag (np.ndarray): Small divisors omega^2 l^2 - lambda_j, shape (N, J).
        offdiag_b (np.ndarray): Time modes b_0..b_{2N} of f_u(v + w), shape (2N + 1, n_x).
        A (np.ndarray): Complex-linear part, shape (NJ, NJ).
        Bc (np.ndarray): Conjugate-linear part, shape (NJ, NJ).
        coupling_Lv (tuple[np.ndarray, np.ndarray]): The chain-term contributions to
            A and Bc through the time-mean solution.
    """

    N: int
    J: int
    epsilon: float
    omega: float
    gamma: float
    tau: float
    diag: np.ndarray
    offdiag_b: np.ndarray = field(repr=False)
    A: np.ndarray = field(repr=False)
    Bc: np.ndarray = field(repr=False)
    coupling_Lv: tuple[np.ndarray, np.ndarray] = field(repr=False)
    spectrum: Spectrum = field(repr=False)

    @property
    def size(self) -> int:
        return self.N * self.J

    @cached_property
    def real_matrix(self) -> np.ndarray:
        """Dense real form acting on [Re d.ravel(), Im d.ravel()]."""
        Ar, Ai, Br, Bi = self.A.real, self.A.imag, self.Bc.real, self.Bc.imag
        return np.block([[Ar + Br, Bi - Ai], [Ai + Bi, Ar - Br]])

    @cached_property
    def _lu(self) -> tuple[np.ndarray, np.ndarray]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinAlgWarning)
            lu, piv = lu_factor(self.real_matrix, check_finite=False)
        pivots = np.diag(lu)
        if not np.all(np.isfinite(pivots)) or np.any(pivots == 0.0):
            raise SingularOperator("factorization produced a zero or non-finite pivot")
        return lu, piv

    def apply(self, d: np.ndarray) -> np.ndarray:
        flat = np.asarray(d, dtype=complex).reshape(self.size)
        return (self.A @ flat + self.Bc @ np.conj(flat)).reshape(self.N, self.J)

    def apply_offdiag(self, d: np.ndarray) -> np.ndarray:
        """Everything but the small divisors."""
        return self.apply(d) - self.diag * np.asarray(d, dtype=complex).reshape(self.N, self.J)

    def solve_coordinates(self, y: np.ndarray) -> np.ndarray:
        """Solve the dense real system for coordinates d with apply(d) = y."""
        flat = np.asarray(y, dtype=complex).reshape(self.size)
        z = lu_solve(self._lu, np.concatenate([flat.real, flat.imag]), check_finite=False)
        return (z[: self.size] + 1j * z[self.size :]).reshape(self.N, self.J)

    def to_coordinates(self, u: TimeFourierField) -> np.ndarray:
        """rho-weighted eigen expansion of modes 1..N of `u`."""
        return self.spectrum.expand(u.pad(max(u.n_time, self.N)).modes[1 : self.N + 1])

    def projections(self, r: TimeFourierField) -> np.ndarray:
        """Plain projections <psi_j, r_l> of modes 1..N of `r`."""
        return self.spectrum.project(r.pad(max(r.n_time, self.N)).modes[1 : self.N + 1])

    def to_field(self, d: np.ndarray, n_time: int | None = None) -> TimeFourierField:
        """The field sum_{l,j} d_{l,j} psi_j e^{ilt} + c.c."""
        return field_from_coordinates(self.spectrum, d, n_time or self.N)

    def apply_field(self, h: TimeFourierField) -> TimeFourierField:
        """The operator on fields; the output is represented as sum_j y_j rho psi_j."""
        y = self.apply(self.to_coordinates(h))
        modes = np.zeros((self.N + 1, self.spectrum.basis.n_x), dtype=complex)
        modes[1:] = self.spectrum.rho * self.spectrum.synthesize(y)
        return TimeFourierField(modes)


def field_from_coordinates(
    spectrum: Spectrum, d: np.ndarray, n_time: int
) -> TimeFourierField:
    """Field with modes 1..N given by eigen coordinates d of shape (N, J)."""
    d = np.asarray(d, dtype=complex)
    if d.shape[0] > n_time:
        raise ValueError(f"{d.shape[0]} modes do not fit n_time={n_time}")
    modes = np.zeros((n_time + 1, spectrum.basis.n_x), dtype=complex)
    modes[1 : d.shape[0] + 1] = spectrum.synthesize(d)
    return TimeFourierField(modes)


def assemble_linop(
    ctx: BeamContext,
    epsilon: float,
    omega: float,
    w: TimeFourierField,
    N: int,
    spectrum: Spectrum,
    gamma: float | None = None,
    tau: float | None = None,
    q_state: QSolveState | None = None,
) -> LinearizedOperator:
    """
    Assemble the linearized operator at (epsilon, omega, w).

    The l = m blocks carry eps B_0 - G_ref, with G_ref the potential the spectrum was
    computed for, so the result is the exact linearization in any eigenbasis.

    Args:
        ctx: Problem data.
        epsilon: Coupling.
        omega: Frequency.
        w: The oscillating field.
        N: Time truncation.
        spectrum: Eigenbasis; its size fixes J.
        gamma: Non-resonance constant recorded for diagnostics.
        tau: Non-resonance exponent recorded for diagnostics.
        q_state: Time-mean solution at (epsilon, w); solved when omitted.

    Returns:
        LinearizedOperator: The assembled operator.
    """
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    settings = ctx.settings
    q_state = q_state or solve_q(ctx, epsilon, w)
    b = ctx.compose(q_state.u, 1, n_out=2 * N).modes
    psi, h = spectrum.eigenfunctions, spectrum.basis.h
    J = spectrum.J

    coupling = h * np.einsum("jx,kx,ix->kji", psi, b, psi)
    reference = h * (psi * spectrum.potential) @ psi.T
    l = np.arange(1, N + 1)
    diag = omega**2 * l[:, None] ** 2 - spectrum.lambdas[None, :]

    A = np.zeros((N, J, N, J), dtype=complex)
    Bc = np.zeros((N, J, N, J), dtype=complex)
    for row in range(N):
        for col in range(N):
            k = row - col
            block = coupling[k] if k >= 0 else np.conj(coupling[-k])
            A[row, :, col, :] = epsilon * block
            Bc[row, :, col, :] = epsilon * coupling[row + col + 2]
        A[row, :, row, :] += np.diag(diag[row]) - reference
    A = A.reshape(N * J, N * J)
    Bc = Bc.reshape(N * J, N * J)

    chain_A = np.zeros_like(A)
    chain_B = np.zeros_like(Bc)
    if epsilon != 0.0:
        # one Q-linearization solve per column, batched
        P = h * np.einsum("jx,lx,xs->ljs", psi, b[1 : N + 1], spectrum.basis.matrix)
        P = P.reshape(N * J, -1)
        jacobian = q_state.jacobian
        chain_A = epsilon**2 * P @ solve(jacobian, np.conj(P).T, assume_a="sym")
        chain_B = epsilon**2 * P @ solve(jacobian, P.T, assume_a="sym")
        A = A + chain_A
        Bc = Bc + chain_B

    logger.debug(
        "assembled operator N=%d J=%d min|divisor|=%.3e", N, J, float(np.min(np.abs(diag)))
    )
    return LinearizedOperator(
        N=N,
        J=J,
        epsilon=float(epsilon),
        omega=float(omega),
        gamma=settings.gamma if gamma is None else float(gamma),
        tau=settings.tau if tau is None else float(tau),
        diag=diag,
        offdiag_b=b,
        A=A,
        Bc=Bc,
        coupling_Lv=(chain_A, chain_B),
        spectrum=spectrum,
    )


def invert_direct(op: LinearizedOperator, rhs: TimeFourierField) -> TimeFourierField:
    """
    Solve op h = rhs by dense LU factorization.

    Raises:
        ValueError: If the dense real system 2 N J exceeds MAX_DENSE_SIZE.
        SingularOperator: If the factorization meets a zero or non-finite pivot.
    """
    if 2 * op.size > MAX_DENSE_SIZE:
        raise ValueError(
            f"dense system of size 2 N J = {2 * op.size} exceeds {MAX_DENSE_SIZE}; "
            "use the preconditioned inversion"
        )
    y = op.projections(rhs)
    d = op.solve_coordinates(y)
    scale = np.linalg.norm(y)
    if scale > 0:
        logger.debug(
            "direct inverse relative residual %.3e", np.linalg.norm(op.apply(d) - y) / scale
        )
    return op.to_field(d)


@dataclass(frozen=True)
class NeumannTrace:
    """
    Term norms of the preconditioned Neumann series.

    Attributes:
        term_norms (tuple[float, ...]): Norm of each term, starting with the preconditioned
            right-hand side.
        terms_used (int): Number of terms summed after the first.
        converged (bool): True when the last term fell below tolerance.
    """

    term_norms: tuple[float, ...]
    terms_used: int
    converged: bool

    @property
    def ratio(self) -> float:
        """Median ratio of successive term norms; nan with fewer than two positive terms."""
        norms = np.asarray(self.term_norms)
        positive = norms[norms > 0]
        if positive.size < 2:
            return float("nan")
        return float(np.median(positive[1:] / positive[:-1]))


def neumann_coordinates(
    op: LinearizedOperator, y: np.ndarray, max_terms: int = 200
) -> tuple[np.ndarray, NeumannTrace]:
    """
    Solve op d = y by the series |D|^{-1/2} sum_n R^n sign(D) |D|^{-1/2} y.

    D is the diagonal of small divisors and R = -sign(D) |D|^{-1/2} E |D|^{-1/2} with E
    the off-diagonal part.

    Raises:
        SingularOperator: If some divisor is exactly zero.
        NeumannDiverged: If term norms fail to decrease three times in a row.
    """
    divisors = op.diag
    if np.any(divisors == 0.0):
        raise SingularOperator("a small divisor is exactly zero")
    root = np.sqrt(np.abs(divisors))
    sign = np.sign(divisors)

    def R(z: np.ndarray) -> np.ndarray:
        return -sign * op.apply_offdiag(z / root) / root

    term = sign * np.asarray(y, dtype=complex).reshape(op.N, op.J) / root
    total = term.copy()
    norms = [float(np.linalg.norm(term))]
    threshold = NEUMANN_TOL * norms[0]
    stalls = 0
    converged = norms[0] <= threshold
    while not converged and len(norms) <= max_terms:
        term = R(term)
        norm = float(np.linalg.norm(term))
        stalls = stalls + 1 if norm >= norms[-1] else 0
        norms.append(norm)
        if stalls >= NEUMANN_STALL:
            raise NeumannDiverged(
                f"term norms did not decrease for {NEUMANN_STALL} terms (last {norm:.3e})"
            )
        total += term
        converged = norm <= threshold
    if not converged:
        logger.warning("Neumann series stopped at %d terms before tolerance", max_terms)
    return total / root, NeumannTrace(tuple(norms), len(norms) - 1, converged)


def invert_preconditioned(
    op: LinearizedOperator, rhs: TimeFourierField, max_terms: int = 200
) -> tuple[TimeFourierField, NeumannTrace]:
    """
    Solve op h = rhs through the diagonally preconditioned Neumann series.

    Returns:
        tuple[TimeFourierField, NeumannTrace]: The solution and per-term norms.
    """
    d, trace = neumann_coordinates(op, op.projections(rhs), max_terms)
    logger.debug("Neumann series: %d terms, ratio %.3e", trace.terms_used, trace.ratio)
    return op.to_field(d), trace


@dataclass(frozen=True)
class DivisorReport:
    """
    Small-divisor diagnostics of a linearized operator.

    Attributes:
        sigma (float): Loss of regularity from tau.
        kappa (float): Regularity margin from tau.
        omega_l (np.ndarray): min_j |omega^2 l^2 - lambda_j| for l = 1..N.
        first_order_ratio (float): min_l omega_l l^{tau-1} / (gamma omega); inf when vacuous.
        pair_ratio (float): min over l != k of omega_l omega_k |l-k|^{2 sigma} /
            (gamma^6 omega^2); inf when vacuous or N = 1.
        resonant (tuple[tuple[int, int, float], ...]): (l, j, divisor) with a divisor at
            roundoff level.
        vacuous (bool): True for gamma = 0.
        window_covered (bool): Whether the spectrum reaches omega N + 2 gamma + 1.
        inverse_norm (float | None): Measured 2-norm of the inverse, when requested.
        inverse_bound_constant (float | None): inverse_norm gamma omega / N^{tau-1}.
    """

    sigma: float
    kappa: float
    omega_l: np.ndarray
    first_order_ratio: float
    pair_ratio: float
    resonant: tuple[tuple[int, int, float], ...]
    vacuous: bool
    window_covered: bool
    inverse_norm: float | None = None
    inverse_bound_constant: float | None = None


def divisor_diagnostics(op: LinearizedOperator, inverse_norm: bool = False) -> DivisorReport:
    """
    Report the small divisors of `op` against the non-resonance scales.

    Args:
        op: The operator.
        inverse_norm: Also measure the norm of the inverse by a singular value
            decomposition of the dense form.
    """
    gamma, omega, tau, N = op.gamma, op.omega, op.tau, op.N
    sigma = sigma_of(tau)
    l = np.arange(1, N + 1, dtype=float)
    omega_l = np.min(np.abs(op.diag), axis=1)
    lambdas = op.spectrum.lambdas
    threshold = RESONANCE_TOL * np.maximum(1.0, np.abs(lambdas))
    resonant = tuple(
        (int(row) + 1, int(col) + 1, float(op.diag[row, col]))
        for row, col in zip(*np.nonzero(np.abs(op.diag) <= threshold[None, :]))
    )
    vacuous = gamma == 0.0
    if vacuous:
        first, pair = float("inf"), float("inf")
    else:
        first = float(np.min(omega_l * l ** (tau - 1.0)) / (gamma * omega))
        gaps = np.abs(l[:, None] - l[None, :])
        products = np.outer(omega_l, omega_l) * gaps ** (2.0 * sigma) / (gamma**6 * omega**2)
        off = ~np.eye(N, dtype=bool)
        pair = float(np.min(products[off])) if N > 1 else float("inf")

    mus = op.spectrum.mus
    real = mus.real[np.isreal(mus)]
    covered = bool(real.size and real.max() >= omega * N + 2.0 * gamma + 1.0)

    norm = bound = None
    if inverse_norm:
        smallest = float(svdvals(op.real_matrix, check_finite=False).min())
        norm = float("inf") if smallest == 0.0 else 1.0 / smallest
        bound = norm * gamma * omega / N ** (tau - 1.0)
    if resonant:
        logger.warning("resonant divisors at (l, j): %s", [(r[0], r[1]) for r in resonant])
    return DivisorReport(
        sigma=sigma,
        kappa=kappa_of(tau),
        omega_l=omega_l,
        first_order_ratio=first,
        pair_ratio=pair,
        resonant=resonant,
        vacuous=vacuous,
        window_covered=covered,
        inverse_norm=norm,
        inverse_bound_constant=bound,
    )

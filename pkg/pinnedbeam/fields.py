"""Time-periodic fields u(t, x) = sum_l u_l(x) e^{ilt} stored as truncated Fourier series.

Only the modes l >= 0 are stored; u_{-l} is the conjugate of u_l, so every field is
real-valued. Spatial parts are samples on the uniform grid of [0, pi].
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import fft as sp_fft

from .discretization import h2_norm_squared
from .eigensolver import Spectrum

logger = logging.getLogger(__name__)


class Projection(Enum):
    """Projectors on time modes."""

    # l = 0
    V = "V"

    # l != 0
    W = "W"

    # 1 <= |l| <= N
    P_N = "P_N"

    # |l| > N
    P_N_PERP = "P_N_perp"


def next_pow2(n: int) -> int:
    """Smallest power of two that is at least `n`."""
    return 1 << max(int(n) - 1, 0).bit_length()


def mode_weights(n_time: int, s: float) -> np.ndarray:
    """Weights of ||u_l||^2_{H^2} in ||u||_s^2 for l = 0..n_time.

    Modes l >= 1 carry 2 (1 + l^{2s}), counting l and -l. Mode 0 carries 1 + 0^{2s}
    with 0^{2s} = 0 for every s, 0^0 included, so the weight is 1 and every weight is
    non-decreasing in s.
    """
    if s < 0:
        raise ValueError(f"s must be non-negative, got {s}")
    l = np.arange(n_time + 1, dtype=float)
    weights = 2.0 * (1.0 + l ** (2.0 * s))
    weights[0] = 1.0
    return weights


@dataclass(frozen=True)
class TimeFourierField:
    """
    A real time-periodic field.

    Attributes:
        modes (np.ndarray): Complex spatial parts u_0..u_N, shape (N + 1, n_x). The
            imaginary part of u_0 is zero.
        tail_norm (float): Norm of the modes discarded when the field was truncated.
    """

    modes: np.ndarray
    tail_norm: float = 0.0

    def __post_init__(self) -> None:
        modes = np.array(self.modes, dtype=complex)
        if modes.ndim != 2 or modes.shape[0] < 1:
            raise ValueError("modes must have shape (n_time + 1, n_x)")
        modes[0] = modes[0].real
        modes.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "tail_norm", float(self.tail_norm))

    @classmethod
    def zeros(cls, n_time: int, n_x: int) -> TimeFourierField:
        if n_time < 0:
            raise ValueError(f"n_time must be non-negative, got {n_time}")
        return cls(np.zeros((n_time + 1, n_x), dtype=complex))

    @classmethod
    def from_modes(
        cls, modes: Mapping[int, np.ndarray], n_time: int, n_x: int | None = None
    ) -> TimeFourierField:
        """
        Build a field from a mapping l -> u_l.

        Negative l are stored through conjugation. A pair l, -l must be consistent.

        Args:
            modes: Spatial parts by time mode.
            n_time: Truncation.
            n_x: Grid size, inferred from the first mode when omitted.

        Returns:
            TimeFourierField: The field.
        """
        if n_x is None:
            if not modes:
                raise ValueError("n_x is required for an empty mapping")
            n_x = np.asarray(next(iter(modes.values()))).shape[-1]
        out = np.zeros((n_time + 1, n_x), dtype=complex)
        seen: dict[int, np.ndarray] = {}
        for l, values in modes.items():
            if abs(l) > n_time:
                raise ValueError(f"mode {l} exceeds n_time={n_time}")
            values = np.asarray(values, dtype=complex)
            stored = values if l >= 0 else np.conj(values)
            if abs(l) in seen and not np.allclose(seen[abs(l)], stored):
                raise ValueError(f"modes {l} and {-l} are not conjugate")
            if l == 0 and np.any(np.abs(values.imag) > 0):
                raise ValueError("mode 0 must be real")
            seen[abs(l)] = stored
            out[abs(l)] = stored
        return cls(out)

    @classmethod
    def from_samples(cls, samples: np.ndarray, n_time: int) -> TimeFourierField:
        """
        Transform real samples at t_k = 2 pi k / M, shape (M, n_x), to a field.

        Modes above `n_time` are discarded and their norm recorded in `tail_norm`.
        """
        samples = np.asarray(samples, dtype=float)
        count = samples.shape[0]
        spectrum = sp_fft.rfft(samples, axis=0) / count
        kept = spectrum[: n_time + 1]
        if kept.shape[0] < n_time + 1:
            kept = np.pad(kept, ((0, n_time + 1 - kept.shape[0]), (0, 0)))
        # the Nyquist bin of an even-length transform is real and counted once
        dropped = spectrum[n_time + 1 : (count + 1) // 2]
        tail = 2.0 * np.sum(h2_norm_squared(dropped)) if dropped.size else 0.0
        if count % 2 == 0 and count // 2 > n_time:
            tail += float(h2_norm_squared(spectrum[count // 2]))
        return cls(kept, np.sqrt(tail))

    @property
    def n_time(self) -> int:
        return self.modes.shape[0] - 1

    @property
    def n_x(self) -> int:
        return self.modes.shape[1]

    def mode(self, l: int) -> np.ndarray:
        """Spatial part u_l for any integer l; zero beyond the truncation."""
        if abs(l) > self.n_time:
            return np.zeros(self.n_x, dtype=complex)
        values = self.modes[abs(l)]
        return values.copy() if l >= 0 else np.conj(values)

    @property
    def mean(self) -> np.ndarray:
        """The time mean u_0 as real samples."""
        return self.modes[0].real.copy()

    def time_samples(self, count: int | None = None) -> np.ndarray:
        """
        Real samples at t_k = 2 pi k / count, shape (count, n_x).

        Args:
            count: Number of time samples, at least 2 n_time + 1. Defaults to the
                smallest admissible power of two.
        """
        count = count or next_pow2(2 * self.n_time + 1)
        if count < 2 * self.n_time + 1:
            raise ValueError(f"need at least {2 * self.n_time + 1} time samples, got {count}")
        padded = np.zeros((count // 2 + 1, self.n_x), dtype=complex)
        padded[: self.n_time + 1] = self.modes
        return count * sp_fft.irfft(padded, n=count, axis=0)

    def pad(self, n_time: int) -> TimeFourierField:
        """The same field with truncation raised to `n_time`."""
        if n_time < self.n_time:
            raise ValueError(f"cannot pad n_time={self.n_time} down to {n_time}")
        extra = np.zeros((n_time - self.n_time, self.n_x), dtype=complex)
        return TimeFourierField(np.vstack([self.modes, extra]), self.tail_norm)

    def truncate(self, n_time: int) -> TimeFourierField:
        """Drop modes above `n_time`, accumulating their norm into `tail_norm`."""
        if n_time >= self.n_time:
            return self.pad(n_time)
        if n_time < 0:
            raise ValueError(f"n_time must be non-negative, got {n_time}")
        dropped = 2.0 * np.sum(h2_norm_squared(self.modes[n_time + 1 :]))
        tail = np.sqrt(self.tail_norm**2 + dropped)
        return TimeFourierField(self.modes[: n_time + 1], tail)

    def with_mode0(self, values: np.ndarray) -> TimeFourierField:
        """The field with its time mean replaced by real samples `values`."""
        modes = self.modes.copy()
        modes[0] = np.asarray(values, dtype=float)
        return TimeFourierField(modes, self.tail_norm)

    def _aligned(self, other: TimeFourierField) -> tuple[np.ndarray, np.ndarray]:
        if self.n_x != other.n_x:
            raise ValueError("fields live on different grids")
        n_time = max(self.n_time, other.n_time)
        return self.pad(n_time).modes, other.pad(n_time).modes

    def __add__(self, other: TimeFourierField) -> TimeFourierField:
        left, right = self._aligned(other)
        return TimeFourierField(left + right, np.hypot(self.tail_norm, other.tail_norm))

    def __sub__(self, other: TimeFourierField) -> TimeFourierField:
        left, right = self._aligned(other)
        return TimeFourierField(left - right, np.hypot(self.tail_norm, other.tail_norm))

    def __mul__(self, scalar: float) -> TimeFourierField:
        scalar = float(scalar)
        return TimeFourierField(self.modes * scalar, abs(scalar) * self.tail_norm)

    __rmul__ = __mul__

    def __neg__(self) -> TimeFourierField:
        return self * -1.0

    def to_rows(self) -> list[tuple[str, int, int, float]]:
        """Rows (part, l, x_index, value) for CSV export, l = 0..n_time."""
        rows: list[tuple[str, int, int, float]] = []
        for l, values in enumerate(self.modes):
            for part, component in (("real", values.real), ("imag", values.imag)):
                rows.extend((part, l, i, float(v)) for i, v in enumerate(component))
        return rows


def sobolev_norm(u: TimeFourierField, s: float) -> float:
    """
    The norm ||u||_s = (sum_l ||u_l||^2_{H^2} (1 + l^{2s}))^{1/2}.

    Args:
        u: The field.
        s: Sobolev index, non-negative.

    Returns:
        float: The norm.
    """
    weights = mode_weights(u.n_time, s)
    return float(np.sqrt(np.sum(weights * h2_norm_squared(u.modes))))


def project(u: TimeFourierField, which: Projection | str, N: int | None = None) -> TimeFourierField:
    """
    Apply a projector on time modes.

    Args:
        u: The field.
        which: `V`, `W`, `P_N` or `P_N_perp`.
        N: Cut-off for `P_N` and `P_N_perp`, 0 <= N <= n_time.

    Returns:
        TimeFourierField: The projected field, with the same truncation.
    """
    which = Projection(which)
    keep = np.zeros(u.n_time + 1, dtype=bool)
    match which:
        case Projection.V:
            keep[0] = True
        case Projection.W:
            keep[1:] = True
        case Projection.P_N | Projection.P_N_PERP:
            if N is None or not 0 <= N <= u.n_time:
                raise ValueError(f"N must lie in [0, {u.n_time}], got {N}")
            keep[1 : N + 1] = True
            if which is Projection.P_N_PERP:
                keep[1:] = ~keep[1:]
    return TimeFourierField(np.where(keep[:, None], u.modes, 0.0))


def field_product(
    u: TimeFourierField, v: TimeFourierField, n_time: int | None = None
) -> TimeFourierField:
    """
    Pointwise product by alias-free collocation.

    Args:
        u: First factor.
        v: Second factor.
        n_time: Truncation of the result. Defaults to the product's bandwidth.

    Returns:
        TimeFourierField: The product, with the norm of any discarded modes recorded.
    """
    if u.n_x != v.n_x:
        raise ValueError("fields live on different grids")
    bandwidth = u.n_time + v.n_time
    count = next_pow2(2 * bandwidth + 1)
    samples = u.time_samples(count) * v.time_samples(count)
    return TimeFourierField.from_samples(samples, bandwidth if n_time is None else n_time)


class NormMachinery:
    """
    The grid Sobolev norms and the equivalent eigen-coordinate norm.

    The eigen norm of a spatial function y is (sum_j (lambda_j + M) |<psi_j, y>_rho|^2)^{1/2}
    with M the spectrum's shift, which makes every weight at least 1.

    Args:
        spectrum: Spectrum defining the eigen norm. Only the grid norms are available
            without one.
        s: Default Sobolev index.
    """

    def __init__(self, spectrum: Spectrum | None = None, s: float = 1.0) -> None:
        if s < 0:
            raise ValueError(f"s must be non-negative, got {s}")
        self.spectrum = spectrum
        self.s = s

    def _spectrum(self) -> Spectrum:
        if self.spectrum is None:
            raise ValueError("the eigen norm needs a spectrum")
        return self.spectrum

    @property
    def eigen_weights(self) -> np.ndarray:
        spectrum = self._spectrum()
        return spectrum.lambdas + spectrum.shift_M

    def h2_norm(self, y: np.ndarray) -> np.ndarray:
        return np.sqrt(h2_norm_squared(y))

    def field_norm(self, u: TimeFourierField, s: float | None = None) -> float:
        return sobolev_norm(u, self.s if s is None else s)

    def rho_product(self, y: np.ndarray, z: np.ndarray) -> complex:
        """The weighted inner product (y, z)_rho = int rho y conj(z)."""
        spectrum = self._spectrum()
        return complex(spectrum.basis.h * np.sum(spectrum.rho * y * np.conj(z)))

    def eigen_product(self, y: np.ndarray, z: np.ndarray) -> complex:
        """The inner product sum_j (lambda_j + M) y_j conj(z_j) in eigen coordinates."""
        spectrum = self._spectrum()
        return complex(
            np.sum(self.eigen_weights * spectrum.expand(y) * np.conj(spectrum.expand(z)))
        )

    def eigen_norm(self, y: np.ndarray) -> np.ndarray:
        """Eigen norm of spatial samples along the last axis."""
        coordinates = self._spectrum().expand(y)
        return np.sqrt(np.sum(self.eigen_weights * np.abs(coordinates) ** 2, axis=-1))

    def eigen_field_norm(self, u: TimeFourierField, s: float | None = None) -> float:
        """The s-norm of a field with the eigen norm in place of the H^2 norm."""
        weights = mode_weights(u.n_time, self.s if s is None else s)
        return float(np.sqrt(np.sum(weights * self.eigen_norm(u.modes) ** 2)))

    def equivalence_constants(self, samples: Iterable[np.ndarray]) -> tuple[float, float]:
        """
        Measured constants L1 <= ||y||_eigen / ||y||_{H^2} <= L2 over `samples`.

        Returns:
            tuple[float, float]: The smallest and largest observed ratio.
        """
        ratios = np.array(
            [float(self.eigen_norm(y) / self.h2_norm(y)) for y in samples], dtype=float
        )
        if ratios.size == 0:
            raise ValueError("no samples")
        lower, upper = float(ratios.min()), float(ratios.max())
        logger.debug("norm equivalence over %d samples: [%.6g, %.6g]", ratios.size, lower, upper)
        return lower, upper

"""Non-resonance certificates and measure estimates of the admissible frequency set.

A frequency omega passes at level N when |omega l - mu_j| > gamma / l^tau and
|omega l - j| > gamma / l^tau for 1 <= l <= N and all j. For each l only the j with
mu_j within 2 gamma + 1 of omega l can fail, which makes the check finite. The measure
estimate removes the closed intervals |omega - c / l| <= 2 gamma / l^(tau+1) around
every centre c and sums the merged complement exactly.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .eigensolver import AsymptoticCoefficients, Spectrum
from .errors import WindowUnderflow

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-12
L_CAP = 256


class Family(Enum):
    """Exclusion families."""

    # |omega l - mu_j(eps)|
    EIGEN = "eigen"

    # |omega l - mu_j(0)|
    UNPERTURBED = "unperturbed"

    # |omega l - j|
    INTEGER = "integer"

    # eps / omega > smallness gamma^5
    SMALLNESS = "smallness"


@dataclass(frozen=True)
class Centres:
    """
    Real mu values, each with an absolute error bound.

    Computed values carry no slack. Asymptotic values carry the distance from
    sqrt(smooth(j)) to the ends of sqrt(smooth(j) -+ lambda_slack(j)).

    Attributes:
        values (np.ndarray): Increasing mu values.
        slack (np.ndarray): Error bound per value.
        resolved (int): Number of leading values that were computed.
    """

    values: np.ndarray
    slack: np.ndarray
    resolved: int

    @property
    def tail_used(self) -> bool:
        return self.values.size > self.resolved


MuSource = Spectrum | Centres | Sequence[float] | np.ndarray


def real_mus(source: MuSource) -> np.ndarray:
    """Sorted real mu values; imaginary ones (negative lambda) never resonate."""
    if isinstance(source, Centres):
        return np.sort(source.values)
    mus = source.mus if isinstance(source, Spectrum) else np.asarray(source, dtype=complex)
    return np.sort(mus.real[np.isreal(mus)])


def _with_slack(source: MuSource) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(source, Centres):
        order = np.argsort(source.values, kind="stable")
        return source.values[order], source.slack[order]
    values = real_mus(source)
    return values, np.zeros_like(values)


def extend_with_tail(mus: MuSource, asym: AsymptoticCoefficients, top: float) -> Centres:
    """
    Append asymptotic values sqrt(j^4 + 2 j^2 upsilon0 + upsilon1) with their slack
    until every value within its slack of `top` is present.
    """
    head, head_slack = _with_slack(mus)
    if isinstance(mus, Spectrum):
        j = mus.J
    elif isinstance(mus, Centres):
        j = mus.values.size
    else:
        j = head.size
    resolved = mus.resolved if isinstance(mus, Centres) else head.size
    values, slack = list(head), list(head_slack)
    while not values or values[-1] - slack[-1] < top:
        j += 1
        lam = float(asym.smooth(j))
        spread = float(asym.lambda_slack(j))
        mu = np.sqrt(max(lam, 0.0))
        below = mu - np.sqrt(max(lam - spread, 0.0))
        above = np.sqrt(max(lam + spread, 0.0)) - mu
        values.append(mu)
        slack.append(max(below, above))
    return Centres(np.asarray(values), np.asarray(slack), resolved)


@dataclass(frozen=True)
class MelnikovCheck:
    """One enumerated constraint (family, l, j, divisor omega l - c, margin)."""

    family: Family
    l: int
    j: int
    divisor: float
    margin: float


@dataclass(frozen=True)
class MelnikovCertificate:
    """
    Outcome of the non-resonance check at one parameter point.

    Attributes:
        passed (bool): True iff every family's worst margin exceeds 1.
        worst_margin (float): Smallest |omega l - c| l^tau / gamma over all constraints.
        checks (tuple[MelnikovCheck, ...]): Every constraint in the coverage windows.
        family_margins (dict[str, float]): Worst margin per family.
        vacuous (bool): True for gamma = 0.
        boundary (bool): True when the worst margin is within 1e-12 of 1.
        tail_used (bool): True when asymptotic eigenvalues extended the spectrum.
    """

    epsilon: float
    omega: float
    gamma: float
    tau: float
    N: int
    passed: bool
    worst_margin: float
    checks: tuple[MelnikovCheck, ...] = field(repr=False)
    family_margins: dict[str, float] = field(default_factory=dict)
    vacuous: bool = False
    boundary: bool = False
    tail_used: bool = False

    @property
    def binding(self) -> MelnikovCheck | None:
        """The constraint with the smallest margin."""
        return min(self.checks, key=lambda check: check.margin, default=None)

    def failures(self, family: Family | None = None) -> list[MelnikovCheck]:
        return [
            check
            for check in self.checks
            if check.margin <= 1.0 and (family is None or check.family is family)
        ]


def _window_checks(
    family: Family,
    omega: float,
    gamma: float,
    tau: float,
    N: int,
    values: np.ndarray,
    width: float,
    slack: np.ndarray | None = None,
) -> list[MelnikovCheck]:
    # a value with slack e counts at its worst position, |divisor| - e
    checks = []
    for l in range(1, N + 1):
        centre = omega * l
        if family is Family.INTEGER:
            js = np.arange(max(1, int(np.ceil(centre - width))), int(np.floor(centre + width)) + 1)
            candidates, spread = js.astype(float), np.zeros(js.size)
        else:
            pad = width if slack is None else width + slack
            inside = np.nonzero(np.abs(values - centre) <= pad)[0]
            js, candidates = inside + 1, values[inside]
            spread = np.zeros(inside.size) if slack is None else slack[inside]
        for j, c, e in zip(js, candidates, spread):
            divisor = float(centre - c)
            distance = max(abs(divisor) - float(e), 0.0)
            checks.append(MelnikovCheck(family, l, int(j), divisor, distance * l**tau / gamma))
    return checks


def check_melnikov(
    epsilon: float,
    omega: float,
    gamma: float,
    tau: float,
    N: int,
    spectrum: MuSource,
    families: Sequence[Family] = (Family.EIGEN, Family.INTEGER),
    tail: AsymptoticCoefficients | None = None,
) -> MelnikovCertificate:
    """
    Check the non-resonance conditions for 1 <= l <= N.

    Args:
        epsilon: Coupling, recorded.
        omega: Frequency.
        gamma: Non-resonance constant; 0 makes the check vacuous.
        tau: Non-resonance exponent.
        N: Level.
        spectrum: mu values for the eigen family; `Centres` values count with their slack.
        families: Families to check, among EIGEN and INTEGER.
        tail: Asymptotic coefficients that extend the spectrum beyond its last value.

    Returns:
        MelnikovCertificate: Outcome and enumerated constraints.

    Raises:
        WindowUnderflow: If the spectrum stops below omega N + 2 gamma + 1 and no tail is
            given.
    """
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    if gamma == 0.0:
        return MelnikovCertificate(
            epsilon, omega, gamma, tau, N, True, float("inf"), (), vacuous=True
        )
    width = 2.0 * gamma + 1.0
    top = omega * N + 2.0 * width
    values, slack = _with_slack(spectrum)
    tail_used = isinstance(spectrum, Centres) and spectrum.tail_used
    covered = values.size > 0 and values[-1] - slack[-1] >= omega * N + width
    if Family.EIGEN in families and not covered:
        if tail is None:
            raise WindowUnderflow(
                f"spectrum ends at mu={values[-1] if values.size else float('nan'):.4g}, "
                f"below omega N + 2 gamma + 1 = {omega * N + width:.4g}"
            )
        extended = extend_with_tail(spectrum, tail, top)
        values, slack, tail_used = extended.values, extended.slack, True

    checks: list[MelnikovCheck] = []
    margins: dict[str, float] = {}
    for family in families:
        found = _window_checks(family, omega, gamma, tau, N, values, width, slack)
        checks.extend(found)
        worst = min((c.margin for c in found), default=float("inf"))
        margins[family.value] = worst
        # every constraint outside the window has margin above 1; a wider window agrees
        if values.size and values[-1] >= omega * N + 2.0 * width or family is Family.INTEGER:
            doubled = _window_checks(family, omega, gamma, tau, N, values, 2.0 * width, slack)
            if (min((c.margin for c in doubled), default=float("inf")) > 1.0) != (worst > 1.0):
                raise WindowUnderflow(f"{family.value} outcome changed with a doubled window")

    worst_margin = min(margins.values(), default=float("inf"))
    passed = worst_margin > 1.0
    certificate = MelnikovCertificate(
        epsilon=float(epsilon),
        omega=float(omega),
        gamma=float(gamma),
        tau=float(tau),
        N=N,
        passed=passed,
        worst_margin=worst_margin,
        checks=tuple(checks),
        family_margins=margins,
        boundary=abs(worst_margin - 1.0) <= BOUNDARY_TOL,
        tail_used=tail_used,
    )
    if not passed:
        binding = certificate.binding
        logger.info(
            "omega=%.6g fails at N=%d: %s l=%d j=%d margin %.3e",
            omega,
            N,
            binding.family.value,
            binding.l,
            binding.j,
            binding.margin,
        )
    return certificate


@dataclass(frozen=True)
class ExcludedInterval:
    """A merged closed interval of excluded frequencies with its causes (family, l, j)."""

    low: float
    high: float
    causes: tuple[tuple[str, int, int], ...]

    @property
    def centre(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def halfwidth(self) -> float:
        return 0.5 * (self.high - self.low)


@dataclass(frozen=True)
class MeasureReport:
    """
    Exact measure of the admissible frequencies in an interval.

    Attributes:
        passed_fraction (float): Measure of the admissible set over the interval length.
        excluded_intervals (tuple[ExcludedInterval, ...]): Merged, sorted, disjoint.
        excluded_length (float): Total length of the excluded intervals.
        l_cap (int): Largest l enumerated.
        tail_bound (float): Upper bound on the measure excluded by all l > l_cap.
        grid_resolution (int): Number of sampling points the oracle would use.
    """

    epsilon: float
    omega_interval: tuple[float, float]
    gamma: float
    tau: float
    passed_fraction: float
    excluded_intervals: tuple[ExcludedInterval, ...] = field(repr=False)
    excluded_length: float
    l_cap: int
    tail_bound: float
    grid_resolution: int = 0
    smallness: float | None = None

    def to_rows(self) -> list[tuple[float, float, str, int, int, int]]:
        """Rows (low, high, family, l, j, causes) for CSV export."""
        rows = []
        for interval in self.excluded_intervals:
            family, l, j = interval.causes[0]
            rows.append((interval.low, interval.high, family, l, j, len(interval.causes)))
        return rows


def _family_centres(
    epsilon: float,
    mus: MuSource,
    unperturbed: MuSource | None,
    include_integer: bool,
    top: float,
) -> list[tuple[Family, np.ndarray, np.ndarray]]:
    families = [(Family.EIGEN, *_with_slack(mus))]
    if epsilon != 0.0 and unperturbed is not None:
        families.append((Family.UNPERTURBED, *_with_slack(unperturbed)))
    if include_integer:
        integers = np.arange(1.0, np.floor(top) + 2.0)
        families.append((Family.INTEGER, integers, np.zeros_like(integers)))
    return families


def _tail_bound(
    length: float, gamma: float, tau: float, l_cap: int, spacing: float, families: int
) -> float:
    # each family has at most l length / spacing + 1 centres per l in the interval
    density = 1.0 / min(spacing, 1.0)
    return float(
        families
        * 4.0
        * gamma
        * (density * length * l_cap ** (1.0 - tau) / (tau - 1.0) + l_cap ** (-tau) / tau)
    )


def measure_estimate(
    epsilon: float,
    omega_interval: tuple[float, float],
    gamma: float,
    tau: float,
    mus: MuSource,
    unperturbed: MuSource | None = None,
    l_cap: int = L_CAP,
    smallness: float | None = None,
    tail: AsymptoticCoefficients | None = None,
) -> MeasureReport:
    """
    Measure the admissible frequencies by exact interval arithmetic.

    Args:
        epsilon: Coupling; the unperturbed family is used only when it is non-zero.
        omega_interval: (omega', omega'') with omega' > 2 gamma and length >= 0.1.
        gamma: Non-resonance constant.
        tau: Non-resonance exponent.
        mus: mu values of the perturbed spectrum.
        unperturbed: mu values at epsilon = 0.
        l_cap: Largest l enumerated.
        smallness: When set with epsilon > 0, also exclude omega < epsilon / (smallness gamma^5).
        tail: Asymptotic coefficients extending `mus` up to l_cap omega''.

    Returns:
        MeasureReport: Merged excluded intervals and the passed fraction.

    Raises:
        WindowUnderflow: If `mus` stops below l_cap omega'' and no tail is given.
    """
    low, high = map(float, omega_interval)
    if low <= 2.0 * gamma:
        raise ValueError(f"omega' must exceed 2 gamma, got {low} <= {2.0 * gamma}")
    if high - low < 0.1:
        raise ValueError(f"omega interval must have length >= 0.1, got {high - low}")
    length = high - low
    top = l_cap * high + 1.0
    values, slack = _with_slack(mus)
    if values.size == 0 or values[-1] - slack[-1] < top:
        if tail is None:
            raise WindowUnderflow(f"mu values must reach l_cap omega'' = {top:.4g}")
        mus = extend_with_tail(mus, tail, top)
    families = _family_centres(epsilon, mus, unperturbed, True, top)

    intervals: list[tuple[float, float, tuple[str, int, int]]] = []
    if gamma > 0.0:
        for l in range(1, l_cap + 1):
            half = 2.0 * gamma / l ** (tau + 1.0)
            for family, centres, spread in families:
                scaled = centres / l
                radius = half + spread / l
                inside = np.nonzero((scaled >= low - radius) & (scaled <= high + radius))[0]
                for index in inside:
                    c, r = scaled[index], radius[index]
                    a, b = max(c - r, low), min(c + r, high)
                    if b > a:
                        intervals.append((a, b, (family.value, l, int(index) + 1)))
    if smallness is not None and epsilon > 0.0 and gamma > 0.0:
        edge = min(epsilon / (smallness * gamma**5), high)
        if edge > low:
            intervals.append((low, edge, (Family.SMALLNESS.value, 0, 0)))

    merged: list[ExcludedInterval] = []
    for a, b, cause in sorted(intervals):
        if merged and a <= merged[-1].high:
            last = merged[-1]
            merged[-1] = ExcludedInterval(last.low, max(last.high, b), last.causes + (cause,))
        else:
            merged.append(ExcludedInterval(a, b, (cause,)))
    excluded = float(sum(iv.high - iv.low for iv in merged))

    spacing = min(
        (float(np.min(np.diff(c))) for _, c, _ in families if c.size > 1), default=1.0
    )
    tail_bound = (
        0.0 if gamma == 0.0 else _tail_bound(length, gamma, tau, l_cap, spacing, len(families))
    )
    report = MeasureReport(
        epsilon=float(epsilon),
        omega_interval=(low, high),
        gamma=float(gamma),
        tau=float(tau),
        passed_fraction=1.0 - excluded / length,
        excluded_intervals=tuple(merged),
        excluded_length=excluded,
        l_cap=l_cap,
        tail_bound=tail_bound,
        smallness=smallness,
    )
    logger.info(
        "measure gamma=%.4g: passed %.6f of (%.4g, %.4g), %d intervals, tail <= %.2e",
        gamma,
        report.passed_fraction,
        low,
        high,
        len(merged),
        tail_bound,
    )
    return report


def _covered(points: np.ndarray, lows: np.ndarray, highs: np.ndarray) -> np.ndarray:
    """True where a point lies in some closed interval [lows_i, highs_i]."""
    covered = np.zeros(points.shape, dtype=bool)
    if lows.size == 0:
        return covered
    order = np.argsort(lows, kind="stable")
    lows, reach = lows[order], np.maximum.accumulate(highs[order])
    index = np.searchsorted(lows, points, side="right") - 1
    inside = index >= 0
    covered[inside] = reach[index[inside]] >= points[inside]
    return covered


def excluded_mask(
    omegas: np.ndarray,
    gamma: float,
    tau: float,
    mus: MuSource,
    unperturbed: MuSource | None = None,
    epsilon: float = 0.0,
    l_cap: int = L_CAP,
    smallness: float | None = None,
) -> np.ndarray:
    """
    Pointwise membership in the excluded set, the sampling counterpart of
    `measure_estimate`.

    Returns:
        np.ndarray: Boolean mask, True where omega is excluded.
    """
    omegas = np.asarray(omegas, dtype=float)
    mask = np.zeros(omegas.shape, dtype=bool)
    if gamma == 0.0:
        return mask
    top = l_cap * float(np.max(omegas)) + 1.0
    families = _family_centres(epsilon, mus, unperturbed, False, top)
    for l in range(1, l_cap + 1):
        half = 2.0 * gamma / l ** (tau + 1.0)
        for _, centres, spread in families:
            radius = half + spread / l
            mask |= _covered(omegas, centres / l - radius, centres / l + radius)
        nearest_integer = np.maximum(np.rint(omegas * l), 1.0)
        mask |= np.abs(omegas - nearest_integer / l) <= half
    if smallness is not None and epsilon > 0.0:
        mask |= omegas < epsilon / (smallness * gamma**5)
    return mask


@dataclass(frozen=True)
class LadderReport:
    """
    Measure estimates over a ladder of gamma values.

    Attributes:
        gammas (np.ndarray): The ladder.
        deficits (np.ndarray): 1 - passed_fraction per gamma.
        fitted_Q (float): Least-squares slope of deficit against gamma through the origin.
        exponent (float): Log-log slope of deficit against gamma.
    """

    gammas: np.ndarray
    deficits: np.ndarray
    fitted_Q: float
    exponent: float
    reports: tuple[MeasureReport, ...] = field(repr=False)


def measure_ladder(
    epsilon: float,
    omega_interval: tuple[float, float],
    gammas: Sequence[float],
    tau: float,
    mus: MuSource,
    **kwargs,
) -> LadderReport:
    """Run `measure_estimate` over `gammas` and fit the deficit's dependence on gamma."""
    reports = tuple(
        measure_estimate(epsilon, omega_interval, g, tau, mus, **kwargs) for g in gammas
    )
    g = np.asarray(gammas, dtype=float)
    deficits = np.array([1.0 - r.passed_fraction for r in reports])
    fitted_Q = float(np.dot(g, deficits) / np.dot(g, g))
    positive = deficits > 0
    exponent = (
        float(np.polyfit(np.log(g[positive]), np.log(deficits[positive]), 1)[0])
        if positive.sum() >= 2
        else float("nan")
    )
    return LadderReport(g, deficits, fitted_Q, exponent, reports)


def measure_rectangle(
    epsilon_grid: Sequence[float],
    omega_interval: tuple[float, float],
    gamma: float,
    tau: float,
    mus_for: Callable[[float], MuSource],
    unperturbed: MuSource | None = None,
    **kwargs,
) -> float:
    """Average passed fraction over an epsilon grid, with mu values from `mus_for(eps)`."""
    fractions = [
        measure_estimate(
            eps, omega_interval, gamma, tau, mus_for(eps), unperturbed, **kwargs
        ).passed_fraction
        for eps in epsilon_grid
    ]
    return float(np.mean(fractions))


@dataclass(frozen=True)
class StageChain:
    """Certificates of the nested parameter sets at one point, stage by stage."""

    certificates: tuple[MelnikovCertificate, ...]
    first_failure: int | None

    @property
    def passed(self) -> bool:
        return self.first_failure is None


def stagewise_membership(
    epsilon: float,
    omega: float,
    gamma: float,
    tau: float,
    Ns: Sequence[int],
    spectra: Sequence[MuSource],
) -> StageChain:
    """
    Evaluate the chain of certificates stage by stage.

    Stage 0 checks the eigen family of the unperturbed spectrum; stage n >= 1 checks both
    families with the spectrum stage n was solved in.

    Args:
        Ns: Truncation per stage.
        spectra: mu values per stage, aligned with `Ns`.
    """
    if len(Ns) != len(spectra):
        raise ValueError("Ns and spectra must have the same length")
    certificates = []
    first_failure = None
    for n, (N, spectrum) in enumerate(zip(Ns, spectra)):
        families = (Family.EIGEN,) if n == 0 else (Family.EIGEN, Family.INTEGER)
        certificate = check_melnikov(epsilon, omega, gamma, tau, N, spectrum, families)
        certificates.append(certificate)
        if not certificate.passed and first_failure is None:
            first_failure = n
    return StageChain(tuple(certificates), first_failure)

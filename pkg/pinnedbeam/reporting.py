"""Report records and atomic CSV, JSON and JSON-lines writers.

CSV output never contains timings, so identical runs produce identical bytes. Every
writer renders the whole file in memory, writes it next to the target, fsyncs and
renames, and returns the SHA-256 of the bytes written.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .eigensolver import Spectrum
from .fields import TimeFourierField
from .linop import DivisorReport
from .sieve import MelnikovCertificate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StageRecord:
    """
    Measured quantities of one iteration stage.

    Attributes:
        n (int): Stage index.
        N (int): Time truncation.
        w (TimeFourierField): Iterate after the stage.
        h_norm (float): s-norm of the stage correction (of w itself at stage 0).
        residual_norm (float): s-norm of the range-equation residual at the iterate.
        w_norm_s (float): s-norm of the iterate.
        w_norm_s_sigma (float): (s + sigma)-norm of the iterate.
        w_norm_s_kappa (float): (s + kappa)-norm of the iterate.
        iterations (int): Fixed-point iterations.
        contraction (float): Largest observed ratio of successive step norms.
        lambda_shift (float): Largest change of an eigenvalue against the previous
            stage's spectrum; 0 at stage 0.
        certificate (MelnikovCertificate): Non-resonance check of the stage.
        spectrum (Spectrum): Eigenbasis the stage was solved in.
        elapsed (float): Wall-clock seconds.
        diagnostics (DivisorReport | None): Small divisors of the stage's operator.
        neumann_terms (int | None): Neumann terms used by the last solve, if any.
    """

    n: int
    N: int
    w: TimeFourierField = field(repr=False)
    h_norm: float
    residual_norm: float
    w_norm_s: float
    w_norm_s_sigma: float
    w_norm_s_kappa: float
    iterations: int
    contraction: float
    lambda_shift: float
    certificate: MelnikovCertificate = field(repr=False)
    spectrum: Spectrum = field(repr=False)
    elapsed: float = 0.0
    diagnostics: DivisorReport | None = field(default=None, repr=False)
    neumann_terms: int | None = None


STAGE_COLUMNS = (
    "stage",
    "N",
    "h_norm",
    "residual_norm",
    "w_norm_s",
    "w_norm_s_sigma",
    "w_norm_s_kappa",
    "iterations",
    "contraction",
    "lambda_shift",
    "certified",
    "worst_margin",
)


@dataclass(frozen=True)
class SolveReport:
    """
    Certification of a computed periodic solution.

    Attributes:
        inputs (dict[str, Any]): Echo of the parameters.
        converged (bool): True when every stage converged.
        u (TimeFourierField): The solution v + w.
        strong_residual (float): L^2 norm in (t, x) of the PDE residual on the fine grid.
        mode_residuals (np.ndarray): L^2 norm in x of the residual per time mode.
        stages (tuple[StageRecord, ...]): Stage table.
        decay_exponent (float): Log-log slope of ||h_n||_s against N_n over stages >= 1;
            0 with a `decay_fit_unavailable` flag when fewer than two stages qualify.
        superlinear (bool): Whether successive corrections decay superlinearly. A pass
            that relies on round-off sized corrections adds `superlinear_at_noise_floor`.
        truncation_ok (bool): Whether every iterate is zero outside 1 <= l <= N_n.
        nu_fit (float): Largest lambda_shift of stage n over ||h_{n-1}||_s; 0 when no
            stage pair is available.
        q_margin (float): Nondegeneracy margin of the final time-mean solve.
        flags (tuple[str, ...]): Deviations from the nominal schedule or certificates.
        timings (dict[str, float]): Wall-clock seconds; JSON only.
    """

    inputs: dict[str, Any]
    converged: bool
    u: TimeFourierField = field(repr=False)
    strong_residual: float
    mode_residuals: np.ndarray = field(repr=False)
    stages: tuple[StageRecord, ...] = field(repr=False)
    decay_exponent: float
    superlinear: bool
    truncation_ok: bool
    nu_fit: float
    q_margin: float
    flags: tuple[str, ...] = ()
    timings: dict[str, float] = field(default_factory=dict)

    def stage_rows(self) -> list[tuple[Any, ...]]:
        return [
            (
                s.n,
                s.N,
                s.h_norm,
                s.residual_norm,
                s.w_norm_s,
                s.w_norm_s_sigma,
                s.w_norm_s_kappa,
                s.iterations,
                s.contraction,
                s.lambda_shift,
                int(s.certificate.passed),
                s.certificate.worst_margin,
            )
            for s in self.stages
        ]

    def mode_rows(self) -> list[tuple[int, float]]:
        return [(l, float(r)) for l, r in enumerate(self.mode_residuals)]

    def summary(self) -> dict[str, Any]:
        """JSON-safe summary, timings included."""
        last = self.stages[-1] if self.stages else None
        diagnostics = last.diagnostics if last else None
        return {
            "inputs": self.inputs,
            "converged": self.converged,
            "strong_residual": self.strong_residual,
            "decay_exponent": self.decay_exponent,
            "superlinear": self.superlinear,
            "truncation_ok": self.truncation_ok,
            "nu_fit": self.nu_fit,
            "q_margin": self.q_margin,
            "Ns": [s.N for s in self.stages],
            "flags": list(self.flags),
            "first_order_ratio": diagnostics.first_order_ratio if diagnostics else None,
            "timings": self.timings,
        }

    def __str__(self) -> str:
        lines = [
            f"converged        {self.converged}",
            f"strong residual  {self.strong_residual:.3e}",
            f"stages           {[s.N for s in self.stages]}",
            f"decay exponent   {self.decay_exponent:.3f}",
            f"superlinear      {self.superlinear}",
            f"flags            {', '.join(self.flags) or '-'}",
        ]
        return "\n".join(lines)


def _format(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _clean(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # JSON has no inf or nan
        return value if math.isfinite(value) else str(value)
    return value


def atomic_write(path: str | os.PathLike[str], data: bytes) -> str:
    """
    Write `data` to `path` through a temporary file in the same directory.

    Returns:
        str: SHA-256 of `data`.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_name(target.name + ".tmp")
    with tmp.open("wb") as handle:
        handle.write(data)
        handle.flush()
        os.fsync(handle.fileno())
    os.replace(tmp, target)
    digest = hashlib.sha256(data).hexdigest()
    logger.info("wrote %s (sha256 %s)", target, digest[:16])
    return digest


def write_csv(
    path: str | os.PathLike[str], columns: Sequence[str], rows: Iterable[Sequence[Any]]
) -> str:
    """Write a CSV table with a header row; floats use 17 significant digits."""
    buffer = io.StringIO(newline="")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(value) for value in row])
    return atomic_write(path, buffer.getvalue().encode("utf-8"))


def write_json(path: str | os.PathLike[str], payload: dict[str, Any]) -> str:
    text = json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"
    return atomic_write(path, text.encode("utf-8"))


def write_jsonl(path: str | os.PathLike[str], events: Iterable[dict[str, Any]]) -> str:
    lines = [json.dumps(_clean(event), sort_keys=True) for event in events]
    return atomic_write(path, ("\n".join(lines) + "\n" if lines else "").encode("utf-8"))


def write_field(path: str | os.PathLike[str], u: TimeFourierField) -> str:
    """Serialize a field as rows (part, l, x_index, value)."""
    return write_csv(path, ("part", "l", "x_index", "value"), u.to_rows())

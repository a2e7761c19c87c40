"""Command-line front end.

Subcommands: eig, qsolve, linop-check, solve, sweep, sieve. Exit codes: 0 on success,
1 on usage and configuration errors, 2 on domain errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
import time
from collections.abc import Sequence
from dataclasses import replace
from functools import lru_cache
from multiprocessing import Pool
from pathlib import Path
from typing import Any, NoReturn

import numpy as np
import scipy

from . import __version__
from .beam import PeriodicBeam
from .config import RunConfig, worker_count
from .errors import BeamError, ConfigError
from .linop import divisor_diagnostics, neumann_coordinates
from .reporting import STAGE_COLUMNS, write_csv, write_field, write_json, write_jsonl
from .sieve import measure_ladder

logger = logging.getLogger("pinnedbeam.cli")


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _pair(text: str) -> tuple[float, float]:
    try:
        low, high = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two numbers 'a,b', got {text!r}") from None
    return low, high


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers 'a,b,...', got {text!r}") from None


def _int_pair(text: str) -> tuple[int, int]:
    low, high = _pair(text)
    return int(low), int(high)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML run configuration.")
    common.add_argument("--output", type=Path, help="Report directory (overrides [output]).")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level.")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Log warnings only.")

    parser = _Parser(
        prog="pinnedbeam",
        description="Time-periodic solutions of the forced pinned-pinned beam.",
    )
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    eig = sub.add_parser("eig", parents=[common], help="Spectrum and its asymptotics.")
    eig.add_argument("--J", type=int, help="Number of eigenpairs.")
    eig.add_argument("--n-x", type=int, help="Grid points.")
    eig.add_argument("--generator", help="Coefficient generator name.")
    eig.add_argument("--amplitude", type=float, help="Generator amplitude.")
    eig.add_argument(
        "--profile", type=Path, metavar="CONFIG", help="TOML file whose [coefficients] is used."
    )
    eig.add_argument(
        "--check-asymptotics",
        action="store_true",
        help="Fill r_j and fit its decay slope over j = 1..J.",
    )
    eig.add_argument(
        "--j-range", type=_int_pair, help="Asymptotics range 'lo,hi'; implies --check-asymptotics."
    )

    qsolve = sub.add_parser("qsolve", parents=[common], help="Time-mean equation at w = 0.")
    qsolve.add_argument("--epsilon", type=float)
    qsolve.add_argument(
        "--forcing", type=Path, metavar="CONFIG", help="TOML file whose [forcing] is used."
    )

    linop = sub.add_parser("linop-check", parents=[common], help="Linearized operator checks.")
    linop.add_argument("--epsilon", type=float)
    linop.add_argument("--omega", type=float)
    linop.add_argument("--N", type=int, help="Time truncation (default: N0).")
    linop.add_argument("--J", type=int, help="Number of eigenpairs.")
    linop.add_argument("--gamma", type=float)
    linop.add_argument("--tau", type=float)
    linop.add_argument("--inverse-norm", action="store_true", help="Measure ||L^-1|| by SVD.")

    solve = sub.add_parser("solve", parents=[common], help="Staged solve and certification.")
    _solver_flags(solve)

    sweep = sub.add_parser("sweep", parents=[common], help="Solve over an (epsilon, omega) grid.")
    sweep.add_argument("--epsilon-range", type=_pair, required=True)
    sweep.add_argument("--epsilon-steps", type=int, default=5)
    sweep.add_argument("--omega-range", type=_pair, required=True)
    sweep.add_argument("--omega-steps", type=int, default=5)
    sweep.add_argument(
        "--workers", type=int, help="Worker processes (default: $PINNEDBEAM_WORKERS or 1)."
    )
    _solver_flags(sweep, with_point=False)

    sieve = sub.add_parser("sieve", parents=[common], help="Measure of admissible frequencies.")
    sieve.add_argument("--omega-range", type=_pair)
    gammas = sieve.add_mutually_exclusive_group()
    gammas.add_argument("--gamma", type=float, help="Single gamma.")
    gammas.add_argument(
        "--gamma-ladder", type=_floats, help="Comma-separated gammas (default: [sieve])."
    )
    sieve.add_argument("--tau", type=float)
    sieve.add_argument("--epsilon", type=float, default=0.0)
    sieve.add_argument("--l-cap", type=int)
    sieve.add_argument("--sample-check", type=int, metavar="POINTS", help="Compare with sampling.")
    return parser


def _solver_flags(parser: argparse.ArgumentParser, with_point: bool = True) -> None:
    if with_point:
        parser.add_argument("--epsilon", type=float)
        parser.add_argument("--omega", type=float)
    parser.add_argument("--N0", type=int)
    parser.add_argument("--stages", type=int)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--tau", type=float)
    parser.add_argument("--inversion", choices=["direct", "preconditioned"])


def _version() -> str:
    return (
        f"pinnedbeam {__version__} (python {platform.python_version()}, "
        f"numpy {np.__version__}, scipy {scipy.__version__})"
    )


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _load_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_toml(args.config) if args.config else RunConfig()
    for flag, section in (("profile", "coefficients"), ("forcing", "forcing")):
        donor = getattr(args, flag, None)
        if donor is not None:
            config = replace(config, **{section: getattr(RunConfig.from_toml(donor), section)})
    config = config.with_overrides(
        "solver",
        epsilon=getattr(args, "epsilon", None) if args.command != "sieve" else None,
        omega=getattr(args, "omega", None),
        N0=getattr(args, "N0", None),
        stages=getattr(args, "stages", None),
        gamma=getattr(args, "gamma", None) if args.command != "sieve" else None,
        tau=getattr(args, "tau", None),
        J=getattr(args, "J", None),
        inversion=getattr(args, "inversion", None),
    )
    config = config.with_overrides(
        "coefficients",
        n_x=getattr(args, "n_x", None),
        generator=getattr(args, "generator", None),
        amplitude=getattr(args, "amplitude", None),
    )
    config = config.with_overrides(
        "sieve",
        omega_range=getattr(args, "omega_range", None) if args.command == "sieve" else None,
        l_cap=getattr(args, "l_cap", None),
        gamma_ladder=getattr(args, "gamma_ladder", None),
    )
    if args.output is not None:
        config = config.with_overrides("output", directory=str(args.output))
    return config


def _emit(lines: Sequence[str]) -> None:
    sys.stdout.write("\n".join(lines) + "\n")


def cmd_eig(beam: PeriodicBeam, out: Path, args: argparse.Namespace) -> None:
    spectrum = beam.spectrum()
    check_range = args.j_range or ((1, spectrum.J) if args.check_asymptotics else None)
    residuals: dict[int, float] = {}
    if check_range is not None:
        asym, check = beam.asymptotics(check_range)
        residuals = dict(zip(check.js.tolist(), check.residuals.tolist()))
    rows = [
        (j, lam, mu.real if mu.imag == 0.0 else complex(mu), residuals.get(j, ""))
        for j, (lam, mu) in enumerate(zip(spectrum.lambdas, spectrum.mus), start=1)
    ]
    write_csv(out / "eigenvalues.csv", ("j", "lambda", "mu", "r_j"), rows)
    write_csv(out / "profile.csv", ("x", "rho", "p", "zeta", "q", "phi"), beam.profile.to_rows())
    lines = [f"{'j':>4} {'lambda':>22} {'mu':>22}"]
    lines += [f"{j:>4} {lam:>22.14g} {mu:>22.14g}" for j, lam, mu, _ in rows]
    lines += [
        f"gap          {spectrum.gap:.6g}",
        f"nu0          {spectrum.nu0:.6g}",
        f"p0           {beam.profile.p0:.12g}",
    ]
    if check_range is not None:
        low, high = check_range
        lines += [
            f"upsilon0     {asym.upsilon0:.12g}",
            f"upsilon1     {asym.upsilon1:.12g}",
            f"mu deviation {check.mu_deviation:.4g}",
            f"slope        {check.slope:.4g} over j={low}..{high}"
            + (" (discretization dominated)" if check.discretization_dominated else ""),
        ]
    _emit(lines)


def cmd_qsolve(beam: PeriodicBeam, out: Path, args: argparse.Namespace) -> None:
    state = beam.solve_q()
    write_csv(out / "qsolve.csv", ("x", "v"), zip(beam.ctx.x.tolist(), state.v.tolist()))
    write_csv(out / "newton_trace.csv", ("step", "residual"), enumerate(state.newton_trace))
    _emit(
        [
            f"steps        {state.steps}",
            f"residual     {state.residual:.3e}",
            f"margin       {state.nondegeneracy_margin:.6g}",
            f"max |v|      {float(np.max(np.abs(state.v))):.6e}",
        ]
    )


def cmd_linop_check(beam: PeriodicBeam, out: Path, args: argparse.Namespace) -> None:
    settings = beam.settings
    op = beam.linearize(N=args.N)
    report = divisor_diagnostics(op, inverse_norm=args.inverse_norm)
    rng = np.random.default_rng(beam.config.output.seed)
    y = rng.standard_normal((op.N, op.J)) + 1j * rng.standard_normal((op.N, op.J))
    direct = op.solve_coordinates(y)
    series, trace = neumann_coordinates(op, y, settings.neumann_max_terms)
    agreement = float(np.linalg.norm(series - direct) / np.linalg.norm(direct))
    summary = {
        "epsilon": settings.epsilon,
        "omega": settings.omega,
        "N": op.N,
        "J": op.J,
        "first_order_ratio": report.first_order_ratio,
        "pair_ratio": report.pair_ratio,
        "resonant": [list(r) for r in report.resonant],
        "window_covered": report.window_covered,
        "inverse_norm": report.inverse_norm,
        "inverse_bound_constant": report.inverse_bound_constant,
        "neumann_terms": trace.terms_used,
        "neumann_ratio": trace.ratio,
        "neumann_converged": trace.converged,
        "direct_vs_preconditioned": agreement,
    }
    write_json(out / "linop_check.json", summary)
    write_csv(out / "divisors.csv", ("l", "omega_l"), enumerate(report.omega_l.tolist(), start=1))
    _emit([f"{key:<26} {value}" for key, value in summary.items()])


def cmd_solve(beam: PeriodicBeam, out: Path, args: argparse.Namespace) -> None:
    _, report = beam.solve()
    write_csv(out / "stages.csv", STAGE_COLUMNS, report.stage_rows())
    write_csv(out / "mode_residuals.csv", ("l", "residual"), report.mode_rows())
    write_field(out / "solution.csv", report.u)
    write_json(out / "summary.json", report.summary())
    _emit([str(report), f"reports      {out}"])


@lru_cache(maxsize=4)
def _cached_beam(canonical: str) -> PeriodicBeam:
    return PeriodicBeam.from_config(RunConfig.from_mapping(json.loads(canonical)))


def _sweep_point(job: tuple[int, str, float, float]) -> dict[str, Any]:
    """Solve one grid point; domain failures are results, not exceptions."""
    index, canonical, epsilon, omega = job
    started = time.perf_counter()
    event: dict[str, Any] = {"index": index, "epsilon": epsilon, "omega": omega}
    try:
        _, report = _cached_beam(canonical).solve(epsilon, omega)
    except BeamError as exc:
        event.update(status=type(exc).__name__, residual=float("nan"), flags="", message=str(exc))
    else:
        event.update(
            status="converged",
            residual=report.strong_residual,
            flags=";".join(report.flags),
            message="",
        )
    event["elapsed"] = time.perf_counter() - started
    return event


def cmd_sweep(beam: PeriodicBeam, out: Path, args: argparse.Namespace) -> None:
    canonical = json.dumps(beam.config.to_mapping(), sort_keys=True)
    epsilons = np.linspace(*args.epsilon_range, args.epsilon_steps)
    omegas = np.linspace(*args.omega_range, args.omega_steps)
    jobs = [
        (index, canonical, float(eps), float(om))
        for index, (om, eps) in enumerate((om, eps) for om in omegas for eps in epsilons)
    ]
    workers = args.workers or worker_count()
    logger.info("sweeping %d points on %d worker(s)", len(jobs), workers)
    if workers > 1:
        with Pool(workers) as pool:
            events = pool.map(_sweep_point, jobs)
    else:
        events = [_sweep_point(job) for job in jobs]
    events.sort(key=lambda event: event["index"])

    columns = ("index", "epsilon", "omega", "status", "residual", "flags")
    write_csv(out / "sweep.csv", columns, [tuple(e[c] for c in columns) for e in events])
    write_jsonl(out / "sweep_events.jsonl", events)
    frontier = []
    for om in omegas:
        converged = [
            e["epsilon"] for e in events if e["omega"] == float(om) and e["status"] == "converged"
        ]
        frontier.append((float(om), max(converged) if converged else float("nan")))
    write_csv(out / "frontier.csv", ("omega", "largest_converged_epsilon"), frontier)
    done = sum(e["status"] == "converged" for e in events)
    _emit([f"converged    {done}/{len(events)}", f"reports      {out}"])


def cmd_sieve(beam: PeriodicBeam, out: Path, args: argparse.Namespace) -> None:
    sieve = beam.sieve_settings
    gammas = (args.gamma,) if args.gamma is not None else sieve.gamma_ladder
    low, high = sieve.omega_range
    top = sieve.l_cap * high + 1.0
    ladder = measure_ladder(
        args.epsilon,
        (low, high),
        gammas,
        beam.settings.tau,
        beam.perturbed_centres(args.epsilon, top),
        unperturbed=beam.resonance_centres(top) if args.epsilon else None,
        l_cap=sieve.l_cap,
        smallness=sieve.smallness,
    )
    lines = []
    for gamma, report in zip(gammas, ladder.reports):
        write_csv(
            out / f"excluded_gamma_{gamma:g}.csv",
            ("low", "high", "family", "l", "j", "causes"),
            report.to_rows(),
        )
        lines.append(
            f"gamma={gamma:g} passed {report.passed_fraction:.6f} "
            f"intervals {len(report.excluded_intervals)} tail <= {report.tail_bound:.2e}"
        )
        if args.sample_check:
            omegas = np.linspace(low, high, args.sample_check)
            sampled = 1.0 - float(np.mean(beam.sample_excluded(omegas, args.epsilon, gamma)))
            lines.append(
                f"  sampled {sampled:.6f} difference {abs(sampled - report.passed_fraction):.2e}"
            )
    rows = zip(ladder.gammas.tolist(), ladder.deficits.tolist())
    write_csv(out / "ladder.csv", ("gamma", "deficit"), rows)
    if len(gammas) > 1:
        lines.append(f"fitted Q {ladder.fitted_Q:.6g} exponent {ladder.exponent:.4g}")
    if sieve.epsilon_grid != (0.0,):
        average = beam.measure_rectangle(gammas[-1])
        lines.append(f"eps-grid average at gamma={gammas[-1]:g}: {average:.6f}")
    _emit(lines)


COMMANDS = {
    "eig": cmd_eig,
    "qsolve": cmd_qsolve,
    "linop-check": cmd_linop_check,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "sieve": cmd_sieve,
}


def run(argv: Sequence[str] | None = None) -> int:
    """
    Execute one subcommand.

    Returns:
        int: 0 on success, 1 on usage or configuration errors, 2 on domain errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _configure_logging(args)
    try:
        config = _load_config(args)
        beam = PeriodicBeam.from_config(config)
        out = Path(config.output.directory)
        logger.info("%s: %s (config %s)", args.command, beam, config.digest[:12])
        COMMANDS[args.command](beam, out, args)
    except ConfigError as exc:
        logger.error("configuration error: %s", exc)
        return 1
    except BeamError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return 2
    return 0


def main() -> NoReturn:
    sys.exit(run())

"""Command line entry point: ``henon-morse <command> [options]``."""

from __future__ import annotations

import argparse
from collections.abc import Callable, Sequence
from dataclasses import replace
import logging
from pathlib import Path
import sys
from typing import Any, NoReturn

from .config import CONF_DEFAULT, RunConfig, build_run_config
from .const import (
    DEFAULT_JACOBIAN_POINTS,
    DEFAULT_SUITE_DIR,
    ENV_THREADS,
    EXIT_OK,
    EXIT_SOLVER_FAILED,
    EXIT_USAGE,
    EXIT_VERIFICATION_FAILED,
    FORMAT_CSV,
    FORMAT_JSON,
    METHOD_RESCALE,
    METHOD_SCALING,
    REPORT_FORMATS,
    SOLVE_METHODS,
    SUITE_REPORT,
)
from .errors import (
    DiscretizationAlarm,
    DomainError,
    GridError,
    HenonMorseError,
    ReportError,
    UsageError,
)
from .log import setup_logging
from .models import RadialProfile
from .nonlinearity import Nonlinearity
from .radial import henon_rescale_trick, henon_scaling_solve, shoot_nodal_solution
from .report import (
    emit_plot_data,
    emit_report,
    format_table,
    load_profile,
    pretty_bundle,
    pretty_morse,
    pretty_spectra,
    profile_summary,
    read_header,
    render_csv,
    render_json,
    write_text,
)
from .spectral import (
    ModeProblem,
    ModeSpectrum,
    collect_mode_spectra,
    morse_index,
    solve_modes,
)
from .transform import kappa_for_alpha
from .verify import (
    PROP31_ALPHAS,
    BundleOutcome,
    acceptance_cases,
    bessel_benchmark,
    even_alpha_cases,
    prop31_checks,
    run_bundles,
    transform_checks,
    verify_theorems,
)

_LOGGER = logging.getLogger(__name__)

PROG = "henon-morse"

_CLI_ONLY = frozenset({"command", "action", "suite", "verbose", "quiet", "config"})


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises :class:`UsageError` instead of exiting."""

    def error(self, message: str) -> NoReturn:
        """Raise the parse error."""
        raise UsageError(message)


def _common_options() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    common.add_argument("-q", "--quiet", action="store_true", help="log warnings only")
    common.add_argument("--config", type=Path, help="YAML file with henon_morse: defaults")
    common.add_argument("--alpha", type=float, help="weight exponent α ≥ 0")
    common.add_argument("--p", type=float, help="power p > 1 of f(u) = |u|^(p-1) u")
    common.add_argument("--nodal", type=int, help="number of nodal sets n ≥ 1")
    common.add_argument("--domain", help="ball, ball:R or annulus:RIN:ROUT")
    common.add_argument("--grid", type=int, help="grid points M ≥ 16")
    common.add_argument("--kappa", type=float, nargs="+", help="transform exponents κ")
    common.add_argument("--method", choices=SOLVE_METHODS, help="radial solver")
    common.add_argument("--modes", type=int, help="angular modes k = 0 .. K-1")
    weighting = common.add_mutually_exclusive_group()
    weighting.add_argument("--weighted", dest="weighted", action="store_const", const=True)
    weighting.add_argument("--unweighted", dest="weighted", action="store_const", const=False)
    common.add_argument("--ode-tolerance", dest="ode_tolerance", type=float)
    common.add_argument("--eigen-tolerance", dest="eigen_tolerance", type=float)
    common.add_argument("--identity-tolerance", dest="identity_tolerance", type=float)
    common.add_argument("--blowup-bound", dest="blowup_bound", type=float)
    common.add_argument("--max-bisections", dest="max_bisections", type=int)
    common.add_argument("--seed", type=int, help="seed for random trials")
    common.add_argument("--samples", type=int, help="random trials per α")
    common.add_argument("--threads", type=int, help=f"workers; overrides {ENV_THREADS}")
    common.add_argument("--profile", type=Path, help="profile CSV written by solve")
    common.add_argument("--out", type=Path, help="output file, or directory for the suite")
    common.add_argument("--emit-plots", dest="emit_plots", type=Path, metavar="DIR")
    common.add_argument("--format", choices=REPORT_FORMATS)
    common.add_argument("--pretty", action="store_const", const=True, help="plain-text tables")
    return common


def build_parser() -> ArgumentParser:
    """Return the parser for every subcommand."""
    common = _common_options()
    parser = ArgumentParser(prog=PROG, description="Hénon equation Morse index lab")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("solve", parents=[common], help="solve for a nodal radial profile")
    transform = commands.add_parser("transform", help="transform identity checks")
    actions = transform.add_subparsers(dest="action", required=True)
    actions.add_parser("check", parents=[common], help="check the T_κ identities")
    commands.add_parser("spectrum", parents=[common], help="per-mode eigenvalues")
    commands.add_parser("morse", parents=[common], help="Morse index report")
    verify = commands.add_parser("verify", parents=[common], help="verification bundles")
    verify.add_argument("suite", nargs="?", choices=["suite"], help="run the acceptance suite")
    verify.add_argument("--all-even-upto", dest="all_even_upto", type=int, metavar="A_MAX")
    return parser


def _log_level(args: argparse.Namespace) -> str | None:
    if args.verbose:
        return "debug"
    if args.quiet:
        return "warning"
    return None


def parse_cli(argv: Sequence[str] | None = None) -> RunConfig:
    """Parse the command line into a validated :class:`RunConfig`."""
    args = build_parser().parse_args(argv)
    command = " ".join(
        part
        for part in (args.command, getattr(args, "action", None), getattr(args, "suite", None))
        if part
    )
    flags = {key: value for key, value in vars(args).items() if key not in _CLI_ONLY}
    config = build_run_config(command, flags, args.config)
    if (level := _log_level(args)) is not None:
        config = replace(config, log_levels={**config.log_levels, CONF_DEFAULT: level})
    return config


def _stem(alpha: float, p: float, nodal: int) -> str:
    return f"a{alpha:g}_p{p:g}_n{nodal}"


def solve_profile(config: RunConfig) -> RadialProfile:
    """Return the radial profile with the configured solver."""
    shooting = config.shooting()
    if config.method == METHOD_SCALING:
        return henon_scaling_solve(
            config.alpha, config.p, config.domain, config.nodal, config=shooting
        )
    if config.method == METHOD_RESCALE:
        return henon_rescale_trick(
            config.alpha, config.p, config.nodal, domain=config.domain, config=shooting
        )
    return shoot_nodal_solution(
        Nonlinearity.henon(config.p), config.alpha, config.domain, config.nodal, config=shooting
    )


def _profile_and_nonlinearity(config: RunConfig) -> tuple[RadialProfile, Nonlinearity]:
    """Load ``--profile`` or solve; header values in a profile file win over flags."""
    if config.profile is None:
        return solve_profile(config), Nonlinearity.henon(config.p)
    header = read_header(config.profile)
    nonlinearity = Nonlinearity.henon(float(header.get("p", config.p)))
    alpha = float(header.get("alpha", config.alpha))
    domain = config.domain if "domain" not in header else None
    profile = load_profile(
        config.profile,
        nonlinearity,
        alpha,
        domain=domain,
        residual_tolerance=config.shooting().residual_tolerance,
    )
    _LOGGER.debug(
        "Loaded %s: alpha=%s, %s nodal sets, residual %.3g",
        config.profile,
        alpha,
        profile.nodal_sets,
        profile.residual,
    )
    return profile, nonlinearity


def _write(text: str, config: RunConfig) -> None:
    write_text(text, config.out)


def _solve(config: RunConfig) -> int:
    profile = solve_profile(config)
    if config.emit_plots is not None:
        emit_plot_data(
            config.emit_plots,
            _stem(config.alpha, config.p, config.nodal),
            profile=profile,
            config=config,
        )
    if config.pretty:
        summary = profile_summary(profile)
        _write(format_table(("field", "value"), sorted(summary.items())), config)
    elif (config.format or FORMAT_CSV) == FORMAT_CSV:
        _write(render_csv(profile, config), config)
    else:
        _write(render_json(profile_summary(profile), config), config)
    if not profile.is_verified or profile.nodal_sets != config.nodal:
        _LOGGER.error(
            "Profile has %s nodal sets and residual %.3g", profile.nodal_sets, profile.residual
        )
        return EXIT_SOLVER_FAILED
    return EXIT_OK


def _transform_check(config: RunConfig) -> int:
    kappas = tuple(dict.fromkeys((*config.kappa, kappa_for_alpha(config.alpha))))
    reports = transform_checks(
        kappas=kappas,
        seed=config.seed,
        samples=DEFAULT_JACOBIAN_POINTS,
        identity_tolerance=config.identity_tolerance,
        points=config.grid,
    )
    if config.pretty:
        _write(
            format_table(
                ("check", "kappa", "rel_error", "tolerance", "pass"),
                (
                    (r.name, r.details.get("kappa", ""), r.rel_error, r.tolerance, r.passed)
                    for r in reports
                ),
            ),
            config,
        )
    else:
        emit_report(reports, FORMAT_JSON, config.out, config=config)
    return EXIT_OK if all(report.passed for report in reports) else EXIT_VERIFICATION_FAILED


def _spectrum(config: RunConfig) -> int:
    profile, nonlinearity = _profile_and_nonlinearity(config)
    if not profile.is_verified:
        _LOGGER.warning("Profile residual %.3g exceeds tolerance", profile.residual)
    options = config.spectral_options()
    q = max(profile.nodal_sets + 2, options.min_eigenvalues)
    base = ModeProblem.linearized(profile, nonlinearity, 0, weighted=options.weighted)
    spectra: list[ModeSpectrum]
    if config.modes is None:
        spectra = collect_mode_spectra(base, q=q, options=options)
    else:
        spectra = solve_modes(base, range(config.modes), q=q, options=options)
    if config.emit_plots is not None:
        emit_plot_data(
            config.emit_plots,
            _stem(profile.alpha, nonlinearity.henon_power or config.p, profile.nodal_sets),
            spectra=spectra,
            config=config,
        )
    if config.pretty:
        _write(pretty_spectra(spectra), config)
    else:
        emit_report(spectra, config.format or FORMAT_CSV, config.out, config=config)
    return EXIT_OK


def _morse(config: RunConfig) -> int:
    profile, nonlinearity = _profile_and_nonlinearity(config)
    report = morse_index(profile, nonlinearity, config.spectral_options())
    if config.emit_plots is not None:
        emit_plot_data(
            config.emit_plots,
            _stem(profile.alpha, nonlinearity.henon_power or config.p, profile.nodal_sets),
            profile=profile,
            spectra=report.per_mode,
            config=config,
        )
    if config.pretty:
        _write(pretty_morse(report), config)
    else:
        emit_report(report, config.format or FORMAT_JSON, config.out, config=config)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


def _outcomes_exit(outcomes: Sequence[BundleOutcome]) -> int:
    if any(outcome.error is not None for outcome in outcomes):
        return EXIT_SOLVER_FAILED
    if all(outcome.passed for outcome in outcomes):
        return EXIT_OK
    return EXIT_VERIFICATION_FAILED


def _pretty_outcomes(outcomes: Sequence[BundleOutcome]) -> str:
    blocks = []
    for outcome in outcomes:
        if outcome.bundle is not None:
            blocks.append(pretty_bundle(outcome.bundle))
        else:
            blocks.append(
                f"alpha={outcome.alpha:g} p={outcome.p:g} n={outcome.nodal}"
                f" {outcome.domain}: error: {outcome.error}\n"
            )
    return "\n".join(blocks)


def _verify(config: RunConfig) -> int:
    if config.all_even_upto is not None:
        outcomes = run_bundles(
            even_alpha_cases(config.all_even_upto, config.p, config.nodal),
            config.domain,
            shooting=config.shooting(),
            options=config.spectral_options(),
            identity_tolerance=config.identity_tolerance,
            threads=config.threads,
        )
        if config.pretty:
            _write(_pretty_outcomes(outcomes), config)
        else:
            emit_report(outcomes, FORMAT_JSON, config.out, config=config)
        return _outcomes_exit(outcomes)
    bundle = verify_theorems(
        config.alpha,
        config.p,
        config.nodal,
        config.domain,
        shooting=config.shooting(),
        options=config.spectral_options(),
        identity_tolerance=config.identity_tolerance,
    )
    if config.emit_plots is not None and bundle.morse is not None:
        emit_plot_data(
            config.emit_plots,
            _stem(config.alpha, config.p, config.nodal),
            spectra=bundle.morse.per_mode,
            config=config,
        )
    if config.pretty:
        _write(pretty_bundle(bundle), config)
    else:
        emit_report(
            {"status": bundle.status, "bundle": bundle}, FORMAT_JSON, config.out, config=config
        )
    return EXIT_OK if bundle.passed else EXIT_VERIFICATION_FAILED


def _verify_suite(config: RunConfig) -> int:
    out = config.out or Path(DEFAULT_SUITE_DIR)
    shooting = config.shooting()
    _LOGGER.info("Running the acceptance suite into %s", out)
    bessel = bessel_benchmark(config.grid)
    identities = transform_checks(
        kappas=config.kappa,
        seed=config.seed,
        identity_tolerance=config.identity_tolerance,
        points=config.grid,
    )
    forms = [
        prop31_checks(alpha, seed=config.seed, count=config.samples, shooting=shooting)
        for alpha in PROP31_ALPHAS
    ]
    outcomes = run_bundles(
        acceptance_cases(),
        config.domain,
        shooting=shooting,
        options=config.spectral_options(),
        identity_tolerance=config.identity_tolerance,
        threads=config.threads,
    )
    for outcome in outcomes:
        if outcome.bundle is None or outcome.bundle.morse is None:
            continue
        path = out / f"spectra_{_stem(outcome.alpha, outcome.p, outcome.nodal)}.csv"
        write_text(render_csv(outcome.bundle.morse, config), path)
    checks_passed = all(item.passed for item in (*bessel, *identities, *forms))
    document = {
        "bessel": bessel,
        "transform": identities,
        "prop31": forms,
        "bundles": outcomes,
        "pass": checks_passed and all(outcome.passed for outcome in outcomes),
    }
    write_text(render_json(document, config), out / SUITE_REPORT)
    if config.pretty:
        sys.stdout.write(_pretty_outcomes(outcomes))
    _LOGGER.info("Wrote %s", out / SUITE_REPORT)
    code = _outcomes_exit(outcomes)
    if code == EXIT_OK and not checks_passed:
        return EXIT_VERIFICATION_FAILED
    return code


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "solve": _solve,
    "transform check": _transform_check,
    "spectrum": _spectrum,
    "morse": _morse,
    "verify": _verify,
    "verify suite": _verify_suite,
}


def _report_error(err: BaseException) -> None:
    sys.stderr.write(f"{PROG}: error: {err}\n")


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code."""
    try:
        config = parse_cli(argv)
    except UsageError as err:
        _report_error(err)
        return EXIT_USAGE
    levels: dict[str, Any] = dict(config.log_levels)
    setup_logging(levels.pop(CONF_DEFAULT, "info"), levels)
    _LOGGER.debug("Running %s with %s", config.command, config.as_record())
    try:
        return COMMANDS[config.command](config)
    except (UsageError, ReportError, DomainError, GridError) as err:
        _report_error(err)
        return EXIT_USAGE
    except DiscretizationAlarm as err:
        _report_error(err)
        return EXIT_VERIFICATION_FAILED
    except HenonMorseError as err:
        _report_error(err)
        return EXIT_SOLVER_FAILED


def run() -> NoReturn:
    """Console script entry point."""
    raise SystemExit(main())

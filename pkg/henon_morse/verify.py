"""Theorem-level verification bundles and acceptance sweeps."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import StrEnum
from functools import partial
from itertools import pairwise
import logging
import math
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy.special import jn_zeros

from .concurrency import resolve_threads, run_calls
from .const import (
    DEFAULT_CORRESPONDENCE_TOLERANCE,
    DEFAULT_IDENTITY_TOLERANCE,
    DEFAULT_JACOBIAN_POINTS,
    DEFAULT_SEED,
    DEFAULT_TRIAL_COUNT,
    DEFAULT_TRIAL_MAX_MODE,
    PROP31_SLACK,
    RADIAL_EQUALITY_TOLERANCE,
)
from .errors import DiscretizationAlarm, HenonMorseError
from .grid import spectral_grid
from .models import AngularFourierFunction, Domain, RadialProfile
from .nonlinearity import Nonlinearity
from .quadform import check_prop31, region_form_values
from .radial import (
    DEFAULT_SHOOTING,
    ShootingConfig,
    auxiliary_z,
    henon_scaling_solve,
    shoot_nodal_solution,
)
from .sectors import build_sector_directions
from .spectral import (
    DEFAULT_SPECTRAL,
    ModeProblem,
    MorseReport,
    SpectralOptions,
    eigenpairs,
    is_positive_even,
    mode_spectrum,
    morse_index,
    radial_nondegeneracy,
    reduced_problem,
    reduced_profile,
    transport_radial_eigenpair,
)
from .transform import (
    IdentityReport,
    KappaTransform,
    jacobian_fd_check,
    kappa_for_alpha,
    map_domain,
    verify_composition_identity,
    verify_group_law,
    verify_h1_identities,
    verify_lr_identity,
)
from .trials import normalized_trials, random_points, random_polar_trials

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

_LOGGER = logging.getLogger(__name__)

_TRANSPORT_TOLERANCE = 1e-5
_HOPF_RATIO = 0.1
_BESSEL_TOLERANCE = 5e-4
_MIN_ORDER = 1.8

ACCEPTANCE_ALPHAS = (0, 1, 2, 3, 4)
ACCEPTANCE_POWERS = (2.0, 3.0, 5.0)
ACCEPTANCE_NODAL = (1, 2, 3)
SECTOR_ALPHAS = (2, 4, 6)
NONDEGENERACY_ALPHAS = (0, 1, 2, 4)
PROP31_ALPHAS = (1, 2, 3)
TRANSFORM_KAPPAS = (1 / 3, 1 / 2, 2.0, 3.0)


class VerdictStatus(StrEnum):
    """Outcome of one check."""

    PASSED = "pass"
    FAILED = "fail"
    SKIPPED = "skipped"
    ALARM = "alarm"


@dataclass(frozen=True, slots=True, kw_only=True)
class Verdict:
    """One named check with its numerical margin."""

    name: str
    status: VerdictStatus
    margin: float = math.nan
    detail: str = ""
    values: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def check(cls, name: str, ok: bool, margin: float, detail: str, **values: Any) -> Verdict:
        """Return a pass/fail verdict."""
        status = VerdictStatus.PASSED if ok else VerdictStatus.FAILED
        return cls(name=name, status=status, margin=margin, detail=detail, values=values)

    @classmethod
    def skipped(cls, name: str, reason: str) -> Verdict:
        """Return a skipped verdict."""
        return cls(name=name, status=VerdictStatus.SKIPPED, detail=reason)


@dataclass(frozen=True, slots=True, kw_only=True)
class VerdictBundle:
    """All verdicts for one (α, p, n, domain) case."""

    alpha: float
    p: float
    nodal: int
    domain: str
    verdicts: tuple[Verdict, ...]
    morse: MorseReport | None = None

    @property
    def status(self) -> VerdictStatus:
        """Return alarm, fail or pass, ignoring skipped checks."""
        statuses = {verdict.status for verdict in self.verdicts}
        if VerdictStatus.ALARM in statuses:
            return VerdictStatus.ALARM
        if VerdictStatus.FAILED in statuses:
            return VerdictStatus.FAILED
        return VerdictStatus.PASSED

    @property
    def passed(self) -> bool:
        """Return True when no check failed or alarmed."""
        return self.status is VerdictStatus.PASSED

    def get(self, name: str) -> Verdict:
        """Return the verdict with the given name."""
        for verdict in self.verdicts:
            if verdict.name == name:
                return verdict
        raise KeyError(name)


def _sup_difference(first: RadialProfile, second: RadialProfile) -> float:
    return float(np.max(np.abs(first.values - second.values)))


def _correspondence(
    profile: RadialProfile,
    p: float,
    n: int,
    domain: Domain,
    shooting: ShootingConfig,
    tolerance: float,
) -> Verdict:
    if not (domain.is_ball() and domain.outer_radius == 1):
        reason = "the Lane-Emden correspondence needs the unit disk"
        return Verdict.skipped("correspondence", reason)
    scaled = henon_scaling_solve(profile.alpha, p, domain, n, grid=profile.grid, config=shooting)
    error = _sup_difference(profile, scaled)
    return Verdict.check(
        "correspondence",
        error < tolerance,
        tolerance - error,
        f"sup difference {error:.3g} between direct and transformed solutions",
        sup_difference=error,
        tolerance=tolerance,
    )


def _morse_verdicts(
    profile: RadialProfile,
    nonlinearity: Nonlinearity,
    options: SpectralOptions,
) -> tuple[MorseReport, list[Verdict]]:
    report = morse_index(profile, nonlinearity, replace(options, weighted=False))
    weighted = morse_index(profile, nonlinearity, replace(options, weighted=True))
    counts = [spectrum.negative_count for spectrum in report.per_mode]
    weighted_counts = [spectrum.negative_count for spectrum in weighted.per_mode]
    regions = region_form_values(profile, nonlinearity)
    verdicts = [
        Verdict.check(
            "morse_bound",
            report.passed,
            float(report.total_index - report.theoretical_bound),
            f"index {report.total_index} against bound {report.theoretical_bound}",
            total=report.total_index,
            bound=report.theoretical_bound,
            radial_count=report.radial_negative_count,
            nodal_sets=profile.nodal_sets,
        ),
        Verdict.check(
            "radial_directions",
            report.radial_negative_count >= profile.nodal_sets
            and (not nonlinearity.superlinear or all(value < 0 for value in regions)),
            float(report.radial_negative_count - profile.nodal_sets),
            f"mode-0 count {report.radial_negative_count} with {profile.nodal_sets} nodal sets",
            region_forms=regions,
        ),
        Verdict.check(
            "inertia",
            counts == weighted_counts,
            0.0 if counts == weighted_counts else -1.0,
            "weighted and unweighted negative counts per mode",
            unweighted=counts,
            weighted=weighted_counts,
        ),
        Verdict.check(
            "monotonicity",
            report.monotone and weighted.monotone,
            min(_gaps(report), default=math.inf),
            "lowest eigenvalue increases with k",
            lowest=[spectrum.lowest for spectrum in report.per_mode],
        ),
    ]
    return report, verdicts


def _gaps(report: MorseReport) -> list[float]:
    lows = [spectrum.lowest for spectrum in report.per_mode]
    return [later - earlier for earlier, later in pairwise(lows)]


def _sector_verdict(
    profile: RadialProfile,
    nonlinearity: Nonlinearity,
    options: SpectralOptions,
    report: MorseReport,
    identity_tolerance: float,
) -> Verdict:
    if not is_positive_even(profile.alpha):
        return Verdict.skipped("sector_bound", "alpha is not a positive even integer")
    try:
        directions = build_sector_directions(
            profile, nonlinearity, options, identity_tolerance=identity_tolerance
        )
    except DiscretizationAlarm as err:
        _LOGGER.warning("Discretization alarm for alpha = %s: %s", profile.alpha, err)
        return Verdict(name="sector_bound", status=VerdictStatus.ALARM, detail=str(err))
    bound = int(profile.alpha) + profile.nodal_sets + 2
    certified = directions.radial_count + directions.nonradial_count
    ok = directions.passed and certified >= bound and report.total_index >= certified
    return Verdict.check(
        "sector_bound",
        ok,
        float(certified - bound),
        f"{directions.nonradial_count} nonradial and {directions.radial_count} radial"
        f" directions against bound {bound}",
        bound=bound,
        certified=certified,
        scaling_error=directions.scaling_error,
        reduced_eigenvalue=directions.reduced_eigenvalue,
        mode_eigenvalues=directions.mode_eigenvalues,
        orthogonal=directions.orthogonal,
    )


def _nondegeneracy_verdicts(
    profile: RadialProfile,
    nonlinearity: Nonlinearity,
    p: float,
    domain: Domain,
    options: SpectralOptions,
    residual_tolerance: float,
) -> list[Verdict]:
    if not (domain.is_ball() and profile.nodal_sets == 2):
        reason = "radial non-degeneracy is checked for two nodal sets on a disk"
        return [
            Verdict.skipped("nondegeneracy", reason),
            Verdict.skipped("auxiliary_z", reason),
            Verdict.skipped("radial_transport", reason),
        ]
    margin = radial_nondegeneracy(profile, nonlinearity, options)
    half = (profile.alpha + 2) / 2
    aux = auxiliary_z(profile, p)
    trace_ok = aux.hopf_ratio > _HOPF_RATIO
    transport = _transport_verdict(profile, nonlinearity, options)
    return [
        Verdict.check(
            "nondegeneracy",
            margin.passed,
            margin.margin - margin.threshold,
            f"min |λ| = {margin.margin:.6g} against {margin.threshold:.3g}",
            eigen_margin=margin.margin,
            threshold=margin.threshold,
            reduced_margin=margin.margin / half**2,
        ),
        Verdict.check(
            "auxiliary_z",
            aux.residual < residual_tolerance and trace_ok,
            residual_tolerance - aux.residual,
            f"residual {aux.residual:.3g}, boundary trace {aux.boundary_value:.6g}",
            residual=aux.residual,
            boundary_value=aux.boundary_value,
            hopf_ratio=aux.hopf_ratio,
        ),
        transport,
    ]


def _transport_verdict(
    profile: RadialProfile,
    nonlinearity: Nonlinearity,
    options: SpectralOptions,
) -> Verdict:
    reduced = reduced_problem(profile, nonlinearity, 0)
    values, functions = eigenpairs(reduced, 1)
    weighted = ModeProblem.linearized(profile, nonlinearity, 0, weighted=True)
    pair = transport_radial_eigenpair(
        float(values[0]), functions[0], profile.alpha, problem=weighted
    )
    direct = mode_spectrum(weighted, 1, options.eigen_tolerance).lowest
    return Verdict.check(
        "radial_transport",
        pair.residual < _TRANSPORT_TOLERANCE,
        _TRANSPORT_TOLERANCE - pair.residual,
        f"transported λ = {pair.eigenvalue:.10g}, Rayleigh quotient {pair.rayleigh_quotient:.10g}",
        transported=pair.eigenvalue,
        rayleigh_quotient=pair.rayleigh_quotient,
        direct=direct,
        residual=pair.residual,
    )


def _corollary(report: MorseReport) -> Verdict:
    if report.nodal_sets < 2:
        return Verdict.skipped("symmetry_breaking", "positive solutions are not nodal")
    return Verdict.check(
        "symmetry_breaking",
        report.total_index >= 3,
        float(report.total_index - 2),
        f"radial nodal index {report.total_index} ≥ 3 > 2, the least-energy nodal index,"
        " so least-energy nodal solutions are not radial",
    )


def verify_theorems(
    alpha: float,
    p: float,
    n: int,
    domain: Domain | None = None,
    *,
    shooting: ShootingConfig = DEFAULT_SHOOTING,
    options: SpectralOptions = DEFAULT_SPECTRAL,
    identity_tolerance: float = DEFAULT_IDENTITY_TOLERANCE,
    correspondence_tolerance: float = DEFAULT_CORRESPONDENCE_TOLERANCE,
) -> VerdictBundle:
    """Run solve, spectrum, index, sector, correspondence and non-degeneracy checks."""
    domain = domain or Domain.ball()
    nonlinearity = Nonlinearity.henon(p)
    label = f"alpha={alpha:g}, p={p:g}, n={n}, {domain}"
    try:
        profile = shoot_nodal_solution(nonlinearity, alpha, domain, n, config=shooting)
        verdicts = [
            Verdict.check(
                "solution",
                profile.is_verified and profile.nodal_sets == n,
                shooting.residual_tolerance - profile.residual,
                f"residual {profile.residual:.3g} with {profile.nodal_sets} nodal sets",
                residual=profile.residual,
                amplitude=profile.shooting_parameter,
            ),
            _correspondence(profile, p, n, domain, shooting, correspondence_tolerance),
        ]
        report, morse = _morse_verdicts(profile, nonlinearity, options)
        verdicts.extend(morse)
        verdicts.append(
            _sector_verdict(profile, nonlinearity, options, report, identity_tolerance)
        )
        verdicts.extend(
            _nondegeneracy_verdicts(
                profile, nonlinearity, p, domain, options, shooting.residual_tolerance
            )
        )
        verdicts.append(_corollary(report))
    except HenonMorseError as err:
        msg = f"{label}: {err}"
        raise type(err)(msg) from err
    bundle = VerdictBundle(
        alpha=alpha,
        p=p,
        nodal=n,
        domain=str(domain),
        verdicts=tuple(verdicts),
        morse=report,
    )
    _LOGGER.info("Verified %s: %s", label, bundle.status)
    return bundle


@dataclass(frozen=True, slots=True, kw_only=True)
class BundleOutcome:
    """A sweep entry: the bundle, or the error that stopped it."""

    alpha: float
    p: float
    nodal: int
    domain: str
    bundle: VerdictBundle | None = None
    error: str | None = None

    @property
    def passed(self) -> bool:
        """Return True when the bundle ran and passed."""
        return self.bundle is not None and self.bundle.passed


def run_bundles(
    cases: Iterable[tuple[float, float, int]],
    domain: Domain | None = None,
    *,
    shooting: ShootingConfig = DEFAULT_SHOOTING,
    options: SpectralOptions = DEFAULT_SPECTRAL,
    identity_tolerance: float = DEFAULT_IDENTITY_TOLERANCE,
    threads: int | None = None,
) -> list[BundleOutcome]:
    """Run verification bundles concurrently; failures are recorded, not raised."""
    domain = domain or Domain.ball()
    cases = list(cases)
    workers = resolve_threads(threads)
    inner = replace(options, threads=1)
    calls = [
        partial(
            verify_theorems,
            alpha,
            p,
            n,
            domain,
            shooting=shooting,
            options=inner,
            identity_tolerance=identity_tolerance,
        )
        for alpha, p, n in cases
    ]
    results = run_calls(
        calls, workers, labels=[f"alpha={a:g} p={p:g} n={n}" for a, p, n in cases]
    )
    outcomes = []
    for (alpha, p, n), result in zip(cases, results, strict=True):
        if isinstance(result, BaseException):
            outcomes.append(
                BundleOutcome(alpha=alpha, p=p, nodal=n, domain=str(domain), error=str(result))
            )
        else:
            outcomes.append(
                BundleOutcome(alpha=alpha, p=p, nodal=n, domain=str(domain), bundle=result)
            )
    return outcomes


def even_alpha_cases(alpha_max: int, p: float, n: int) -> list[tuple[float, float, int]]:
    """Return the cases α = 0, 2, ..., alpha_max."""
    return [(float(alpha), p, n) for alpha in range(0, alpha_max + 1, 2)]


def acceptance_cases() -> list[tuple[float, float, int]]:
    """Return the parameter matrix of the acceptance suite, without duplicates."""
    cases = [
        (float(alpha), p, n)
        for alpha in ACCEPTANCE_ALPHAS
        for p in ACCEPTANCE_POWERS
        for n in ACCEPTANCE_NODAL
    ]
    extra = [(float(alpha), 3.0, 2) for alpha in (*SECTOR_ALPHAS, *NONDEGENERACY_ALPHAS)]
    for case in extra:
        if case not in cases:
            cases.append(case)
    return cases


def bessel_benchmark(
    cells: int = 4000,
    modes: Sequence[int] = (0, 1, 2),
    *,
    tolerance: float = _BESSEL_TOLERANCE,
) -> list[IdentityReport]:
    """Compare zero-potential disk eigenvalues with j_{k,1}² and estimate the order."""
    reports = []
    for mode in modes:
        exact = float(jn_zeros(mode, 1)[0]) ** 2
        errors = []
        for size in (cells // 2, cells):
            grid = spectral_grid(Domain.ball(), size)
            problem = ModeProblem(mode=mode, grid=grid, potential=np.zeros(grid.size))
            lowest = mode_spectrum(problem, 1).lowest
            errors.append(abs(lowest - exact) / exact)
        order = math.log2(errors[0] / errors[1]) if errors[1] > 0 else math.inf
        reports.append(
            IdentityReport(
                name=f"bessel_k{mode}",
                lhs=lowest,
                rhs=exact,
                rel_error=errors[1],
                tolerance=tolerance,
                passed=errors[1] < tolerance and order >= _MIN_ORDER,
                details={"mode": mode, "cells": cells, "order": order},
            )
        )
    return reports


def transform_checks(
    *,
    kappas: Sequence[float] = TRANSFORM_KAPPAS,
    seed: int = DEFAULT_SEED,
    samples: int = DEFAULT_JACOBIAN_POINTS,
    identity_tolerance: float = DEFAULT_IDENTITY_TOLERANCE,
    points: int = 4000,
) -> list[IdentityReport]:
    """Run the Jacobian, group law, L^r, composition and H¹ identities for each κ."""
    reports = []
    domain = Domain.ball()
    for index, kappa in enumerate(kappas):
        transform = KappaTransform(kappa)
        cloud = random_points(seed + index, samples)
        reports.append(jacobian_fd_check(transform, cloud, tolerance=identity_tolerance))
        reports.append(verify_group_law(transform, KappaTransform(1 / kappa), cloud))
        image = map_domain(domain, kappa)
        trial = random_polar_trials(seed + index, 1, image)[0]
        for exponent in (2.0, 3.0):
            reports.append(
                verify_lr_identity(
                    trial, domain, kappa, exponent, points=points, tolerance=identity_tolerance
                )
            )
        reports.append(
            verify_composition_identity(
                trial,
                domain,
                kappa,
                np.sin,
                points=points,
                tolerance=identity_tolerance,
                name="composition_sin",
            )
        )
        grid = spectral_grid(image, points)
        for radial in (True, False):
            psi = normalized_trials(seed + index, 1, grid, radial=radial)[0]
            reports.append(verify_h1_identities(psi, kappa))
    return reports


@dataclass(frozen=True, slots=True, kw_only=True)
class FormSummary:
    """Aggregate of the reduced-form comparison over seeded trials."""

    alpha: float
    trials: int
    radial_trials: int
    min_gap: float
    max_radial_relative: float
    failures: int
    passed: bool = field(metadata={"key": "pass"})


def prop31_checks(
    alpha: float,
    p: float = 3.0,
    n: int = 2,
    *,
    seed: int = DEFAULT_SEED,
    count: int = DEFAULT_TRIAL_COUNT,
    radial_count: int = 10,
    cells: int | None = None,
    shooting: ShootingConfig = DEFAULT_SHOOTING,
    slack: float = PROP31_SLACK,
    tolerance: float = RADIAL_EQUALITY_TOLERANCE,
    max_mode: int = DEFAULT_TRIAL_MAX_MODE,
) -> FormSummary:
    """Compare 𝒬_v(ψ) with κ·Q_u(φ) on seeded multi-mode and radial trials."""
    nonlinearity = Nonlinearity.henon(p)
    profile = shoot_nodal_solution(nonlinearity, alpha, Domain.ball(), n, config=shooting)
    kappa = kappa_for_alpha(alpha)
    v = reduced_profile(profile, kappa, cells or shooting.grid_points)
    trials: list[AngularFourierFunction] = normalized_trials(
        seed, count, v.grid, max_mode=max_mode
    )
    radial = normalized_trials(seed + 1, radial_count, v.grid, radial=True)
    reports = [
        check_prop31(v, psi, alpha, nonlinearity, slack=slack, tolerance=tolerance)
        for psi in (*trials, *radial)
    ]
    gaps = [report.gap for report in reports if not report.radial]
    relative = [report.relative_gap for report in reports if report.radial]
    failures = sum(1 for report in reports if not report.passed)
    return FormSummary(
        alpha=alpha,
        trials=len(trials),
        radial_trials=len(radial),
        min_gap=min(gaps, default=math.inf),
        max_radial_relative=max(relative, default=0.0),
        failures=failures,
        passed=failures == 0,
    )

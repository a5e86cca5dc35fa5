"""Radial nodal solutions of -Δu = |x|^α f(u) by shooting."""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .const import (
    DEFAULT_BLOWUP_BOUND,
    DEFAULT_GRID_POINTS,
    DEFAULT_IVP_WINDOW,
    DEFAULT_MAX_BISECTIONS,
    DEFAULT_MAX_EXPANSIONS,
    DEFAULT_ODE_TOLERANCE,
    DEFAULT_RESIDUAL_TOLERANCE,
    DEFAULT_SERIES_CUTOFF,
    MAX_IVP_WINDOW,
)
from .errors import (
    DomainError,
    GridError,
    NoBracketError,
    SearchFailedError,
    SolverError,
    UsageError,
    ZeroNotFoundError,
)
from .grid import count_sign_changes, radial_spline, spectral_grid
from .models import Domain, RadialFunction, RadialGrid, RadialProfile
from .nonlinearity import Nonlinearity

if TYPE_CHECKING:
    from collections.abc import Callable

    from .models import FloatArray

_LOGGER = logging.getLogger(__name__)

_SIGN_ATOL = 1e-9
_EDGE_GAP = 1e-9


@dataclass(frozen=True, slots=True, kw_only=True)
class ShootingConfig:
    """Tolerances and budgets for the shooting solver."""

    ode_tolerance: float = DEFAULT_ODE_TOLERANCE
    max_bisections: int = DEFAULT_MAX_BISECTIONS
    series_cutoff: float = DEFAULT_SERIES_CUTOFF
    blowup_bound: float = DEFAULT_BLOWUP_BOUND
    max_expansions: int = DEFAULT_MAX_EXPANSIONS
    residual_tolerance: float = DEFAULT_RESIDUAL_TOLERANCE
    grid_points: int = DEFAULT_GRID_POINTS

    def __post_init__(self) -> None:
        """Validate tolerances and budgets."""
        if not self.ode_tolerance > 0:
            msg = f"ode tolerance must be positive, got {self.ode_tolerance!r}"
            raise UsageError(msg)
        if not self.series_cutoff > 0:
            msg = f"series cutoff must be positive, got {self.series_cutoff!r}"
            raise UsageError(msg)
        if self.max_bisections < 1 or self.max_expansions < 1:
            msg = "bisection and expansion budgets must be positive"
            raise UsageError(msg)

    def check_grid(self, grid: RadialGrid) -> None:
        """Require the series cutoff to sit below twice the first node of a disk grid."""
        if grid.domain.is_ball() and self.series_cutoff >= 2 * grid.nodes[0]:
            msg = (
                f"series cutoff {self.series_cutoff!r} must lie below twice the first"
                f" node {grid.nodes[0]!r}"
            )
            raise GridError(msg)


DEFAULT_SHOOTING = ShootingConfig()


def origin_series(
    nonlinearity: Nonlinearity, alpha: float, amplitude: float, radius: float
) -> tuple[float, float]:
    """Return u(r) = a - f(a) r^(α+2)/(α+2)² and its derivative near the origin."""
    coefficient = float(nonlinearity.f(amplitude)) / (alpha + 2) ** 2
    value = amplitude - coefficient * radius ** (alpha + 2)
    slope = -coefficient * (alpha + 2) * radius ** (alpha + 1)
    return value, slope


def integrate_ivp(
    nonlinearity: Nonlinearity,
    alpha: float,
    start: tuple[float, float, float],
    end_radius: float,
    *,
    grid: RadialGrid | None = None,
    config: ShootingConfig = DEFAULT_SHOOTING,
    max_zeros: int | None = None,
) -> RadialProfile:
    """Integrate u″ + u′/r + r^α f(u) = 0 from (r₀, u₀, u₀′) to end_radius.

    Zero crossings are located by event detection on the dense output. A start
    at the origin switches to the series expansion up to the series cutoff.
    Escaping |u| beyond the blow-up bound ends the run with ``diverged`` set;
    nodes past the last integrated radius hold NaN.
    """
    r0, u0, du0 = (float(value) for value in start)
    if r0 < 0:
        msg = f"start radius must be ≥ 0, got {r0!r}"
        raise SolverError(msg)
    if r0 == 0 and du0 != 0:
        msg = "a start at the origin requires u′(0) = 0"
        raise SolverError(msg)
    if end_radius <= r0:
        msg = f"end radius {end_radius!r} must exceed the start radius {r0!r}"
        raise SolverError(msg)
    if grid is None:
        domain = Domain.ball(end_radius) if r0 == 0 else Domain.annulus(r0, end_radius)
        grid = spectral_grid(domain, config.grid_points)
    if r0 == 0:
        t0 = min(config.series_cutoff, 0.5 * end_radius)
        y0 = origin_series(nonlinearity, alpha, u0, t0)
    else:
        t0, y0 = r0, (u0, du0)

    f = nonlinearity.eval_f
    bound = config.blowup_bound

    def rhs(r: float, y: FloatArray) -> list[float]:
        return [y[1], -y[1] / r - r**alpha * float(f(y[0]))]

    def crossing(_r: float, y: FloatArray) -> float:
        return y[0]

    def blowup(_r: float, y: FloatArray) -> float:
        return bound - abs(y[0])

    crossing.terminal = max_zeros if max_zeros else False  # type: ignore[attr-defined]
    blowup.terminal = True  # type: ignore[attr-defined]
    blowup.direction = -1  # type: ignore[attr-defined]

    scale = max(1.0, abs(u0), abs(du0))
    solution = solve_ivp(
        rhs,
        (t0, end_radius),
        y0,
        method="DOP853",
        rtol=config.ode_tolerance,
        atol=config.ode_tolerance * 1e-2 * scale,
        dense_output=True,
        events=[crossing, blowup],
    )
    if solution.status == -1:
        msg = f"integration failed at r = {solution.t[-1]!r}: {solution.message}"
        raise SolverError(msg)
    t_end = float(solution.t[-1])
    diverged = bool(solution.t_events[1].size)
    gap = _EDGE_GAP * end_radius
    zeros = tuple(
        float(t) for t in solution.t_events[0] if t0 + gap < t < end_radius - gap
    )
    if diverged:
        _LOGGER.debug("IVP from u0=%s diverged at r=%s", u0, t_end)

    nodes = grid.nodes
    values = np.full(nodes.shape, np.nan)
    slopes = np.full(nodes.shape, np.nan)
    series_mask = nodes < t0
    if np.any(series_mask):
        values[series_mask], slopes[series_mask] = origin_series(
            nonlinearity, alpha, u0, nodes[series_mask]
        )
    dense_mask = (nodes >= t0) & (nodes <= t_end * (1 + 1e-14))
    if np.any(dense_mask):
        values[dense_mask], slopes[dense_mask] = solution.sol(
            np.minimum(nodes[dense_mask], t_end)
        )

    complete = bool(np.all(np.isfinite(values)))
    residual = (
        ode_residual(grid, values, slopes, alpha, nonlinearity)
        if complete
        else math.nan
    )
    finite = values[np.isfinite(values)]
    return RadialProfile(
        grid,
        values,
        slopes,
        alpha=alpha,
        nodal_sets=count_sign_changes(finite, _SIGN_ATOL) + 1,
        residual=residual,
        residual_tolerance=config.residual_tolerance,
        zeros=zeros,
        diverged=diverged,
        shooting_parameter=du0 if r0 > 0 else u0,
    )


def ode_residual(
    grid: RadialGrid,
    values: FloatArray,
    slopes: FloatArray,
    alpha: float,
    nonlinearity: Nonlinearity,
) -> float:
    """Return max|u″ + u′/r + r^α f(u)| relative to max(1, max|r^α f(u)|).

    u″ is the derivative of a cubic spline through the sampled u′.
    """
    nodes = grid.nodes
    second = radial_spline(RadialFunction(grid, slopes), reflect=-1)(nodes, 1)
    source = nodes**alpha * nonlinearity.f(values)
    residual = second + slopes / nodes + source
    return float(np.max(np.abs(residual)) / max(1.0, float(np.max(np.abs(source)))))


def shoot_nodal_solution(
    nonlinearity: Nonlinearity,
    alpha: float,
    domain: Domain,
    n: int,
    *,
    grid: RadialGrid | None = None,
    config: ShootingConfig = DEFAULT_SHOOTING,
) -> RadialProfile:
    """Return the radial solution with n nodal sets, positive on the innermost one.

    On a disk the shooting parameter is u(0); on an annulus it is u′(R_in) with
    u(R_in) = 0. The parameter is bracketed by doubling, narrowed by bisection
    on the zero count until the counts are n - 1 and n, then polished with
    Brent's method on u(R).
    """
    if n < 1:
        msg = f"the number of nodal sets must be ≥ 1, got {n}"
        raise SolverError(msg)
    if grid is None:
        grid = spectral_grid(domain, config.grid_points)
    outer = domain.outer_radius
    ball = domain.is_ball()
    if ball:
        config.check_grid(grid)

    def start(parameter: float) -> tuple[float, float, float]:
        if ball:
            return 0.0, parameter, 0.0
        return domain.inner_radius, 0.0, parameter

    trial_grid = spectral_grid(domain, 16)
    if ball:
        config.check_grid(trial_grid)
    cache: dict[float, int] = {}

    def count(parameter: float) -> int:
        if parameter not in cache:
            trial = integrate_ivp(
                nonlinearity,
                alpha,
                start(parameter),
                outer,
                grid=trial_grid,
                config=config,
                max_zeros=n + 1 if ball else None,
            )
            cache[parameter] = n + 1 if trial.diverged else len(trial.zeros)
        return cache[parameter]

    lo, hi = _bracket(count, n, config.max_expansions)
    for _ in range(config.max_bisections):
        if count(lo) == n - 1 and count(hi) == n:
            break
        middle = math.sqrt(lo * hi)
        if count(middle) >= n:
            hi = middle
        else:
            lo = middle
    else:
        msg = f"bisection did not isolate the {n}-th zero in {config.max_bisections} steps"
        raise SearchFailedError(msg)
    _LOGGER.debug("Bracket for n=%s: [%.17g, %.17g]", n, lo, hi)

    def boundary_value(parameter: float) -> float:
        trial = integrate_ivp(
            nonlinearity, alpha, start(parameter), outer, grid=trial_grid, config=config
        )
        return trial.boundary_value

    try:
        root = brentq(
            boundary_value,
            lo,
            hi,
            xtol=1e-15 * hi,
            rtol=4 * np.finfo(float).eps,
            maxiter=config.max_bisections,
        )
    except (RuntimeError, ValueError) as err:
        msg = f"root search on u(R) failed in [{lo!r}, {hi!r}]"
        raise SearchFailedError(msg) from err

    profile = integrate_ivp(nonlinearity, alpha, start(root), outer, grid=grid, config=config)
    if profile.nodal_sets != n:
        msg = f"solution has {profile.nodal_sets} nodal sets, expected {n}"
        raise SearchFailedError(msg)
    _LOGGER.debug(
        "Shooting converged: alpha=%s n=%s parameter=%.17g residual=%.3e",
        alpha,
        n,
        root,
        profile.residual,
    )
    return profile


def _bracket(count: Callable[[float], int], n: int, max_expansions: int) -> tuple[float, float]:
    parameter = 1.0
    if count(parameter) >= n:
        hi, lo = parameter, parameter / 2
        for _ in range(max_expansions):
            if count(lo) < n:
                return lo, hi
            hi, lo = lo, lo / 2
    else:
        lo, hi = parameter, parameter * 2
        for _ in range(max_expansions):
            if count(hi) >= n:
                return lo, hi
            lo, hi = hi, hi * 2
    msg = f"no bracket found for {n} nodal sets within {max_expansions} expansions"
    raise NoBracketError(msg)


def _require_unit_ball(domain: Domain) -> None:
    if not (domain.is_ball() and domain.outer_radius == 1):
        msg = f"the Henon correspondence needs the unit disk, got {domain}"
        raise DomainError(msg)


def henon_scaling_solve(
    alpha: float,
    p: float,
    domain: Domain,
    n: int,
    *,
    grid: RadialGrid | None = None,
    config: ShootingConfig = DEFAULT_SHOOTING,
) -> RadialProfile:
    """Return u(r) = ((α+2)/2)^(2/(p-1)) U(r^((α+2)/2)) from the Lane-Emden solution U."""
    _require_unit_ball(domain)
    if grid is None:
        grid = spectral_grid(domain, config.grid_points)
    nonlinearity = Nonlinearity.henon(p)
    lane_emden = shoot_nodal_solution(nonlinearity, 0.0, domain, n, grid=grid, config=config)
    if alpha == 0:
        return lane_emden
    half = (alpha + 2) / 2
    amplitude = half ** (2 / (p - 1))
    reduced_nodes = grid.nodes**half
    reduced_nodes[-1] = 1.0
    reduced = integrate_ivp(
        nonlinearity,
        0.0,
        (0.0, lane_emden.shooting_parameter, 0.0),
        1.0,
        grid=RadialGrid(reduced_nodes, domain),
        config=config,
    )
    values = amplitude * reduced.values
    slopes = amplitude * reduced.derivatives * half * grid.nodes ** (alpha / 2)
    return RadialProfile(
        grid,
        values,
        slopes,
        alpha=alpha,
        nodal_sets=count_sign_changes(values, _SIGN_ATOL) + 1,
        residual=ode_residual(grid, values, slopes, alpha, nonlinearity),
        residual_tolerance=config.residual_tolerance,
        zeros=tuple(zero ** (1 / half) for zero in lane_emden.zeros),
        shooting_parameter=amplitude * lane_emden.shooting_parameter,
    )


def raw_henon_solution(
    alpha: float,
    p: float,
    n: int,
    *,
    config: ShootingConfig = DEFAULT_SHOOTING,
) -> RadialProfile:
    """Integrate the Henon IVP with u(0) = 1 until its n-th zero."""
    nonlinearity = Nonlinearity.henon(p)
    window = DEFAULT_IVP_WINDOW
    while window <= MAX_IVP_WINDOW:
        raw = integrate_ivp(
            nonlinearity,
            alpha,
            (0.0, 1.0, 0.0),
            window,
            grid=spectral_grid(Domain.ball(window), 64),
            config=config,
            max_zeros=n,
        )
        if len(raw.zeros) >= n:
            return raw
        window *= 4
    msg = f"fewer than {n} zeros found within r ≤ {MAX_IVP_WINDOW:g}"
    raise ZeroNotFoundError(msg)


def henon_rescale_trick(
    alpha: float,
    p: float,
    n: int,
    *,
    raw: RadialProfile | None = None,
    domain: Domain | None = None,
    grid: RadialGrid | None = None,
    config: ShootingConfig = DEFAULT_SHOOTING,
) -> RadialProfile:
    """Place the n-th zero of the u(0) = 1 solution on the boundary by scaling.

    With ρ_n the n-th zero, u(r) = a·u₁(λr) for λ = ρ_n/R and
    a = λ^((α+2)/(p-1)) solves the Dirichlet problem on the disk of radius R.
    """
    domain = domain or Domain.ball()
    if not domain.is_ball():
        msg = "the rescale trick needs a disk"
        raise DomainError(msg)
    if raw is None:
        raw = raw_henon_solution(alpha, p, n, config=config)
    if len(raw.zeros) < n:
        msg = f"raw solution has {len(raw.zeros)} zeros, {n} needed"
        raise ZeroNotFoundError(msg)
    if grid is None:
        grid = spectral_grid(domain, config.grid_points)
    nonlinearity = Nonlinearity.henon(p)
    rho = raw.zeros[n - 1]
    stretch = rho / domain.outer_radius
    amplitude = stretch ** ((alpha + 2) / (p - 1))
    stretched_nodes = grid.nodes * stretch
    stretched_nodes[-1] = rho
    base = integrate_ivp(
        nonlinearity,
        alpha,
        (0.0, 1.0, 0.0),
        rho,
        grid=RadialGrid(stretched_nodes, Domain.ball(rho)),
        config=config,
    )
    values = amplitude * base.values
    slopes = amplitude * stretch * base.derivatives
    return RadialProfile(
        grid,
        values,
        slopes,
        alpha=alpha,
        nodal_sets=count_sign_changes(values, _SIGN_ATOL) + 1,
        residual=ode_residual(grid, values, slopes, alpha, nonlinearity),
        residual_tolerance=config.residual_tolerance,
        zeros=tuple(zero / stretch for zero in raw.zeros[: n - 1]) + (domain.outer_radius,),
        shooting_parameter=amplitude,
    )


@dataclass(frozen=True, slots=True, kw_only=True)
class AuxiliaryFunction:
    """z = r u′ + (α+2)u/(p-1) with its equation residual."""

    z: RadialFunction
    residual: float
    boundary_value: float
    hopf_ratio: float


def auxiliary_z(
    profile: RadialProfile, p: float, *, alpha: float | None = None
) -> AuxiliaryFunction:
    """Return z and the residual of -z″ - z′/r - |x|^α f′(u) z for f(u) = |u|^(p-1)u."""
    alpha = profile.alpha if alpha is None else alpha
    nonlinearity = Nonlinearity.henon(p)
    nodes, u = profile.nodes, profile.values
    if profile.derivatives is None:
        du = radial_spline(profile, reflect=1)(nodes, 1)
    else:
        du = profile.derivatives
    factor = (alpha + 2) / (p - 1)
    z = nodes * du + factor * u
    dz = factor * du - nodes ** (alpha + 1) * nonlinearity.f(u)
    second = radial_spline(RadialFunction(profile.grid, dz), reflect=-1)(nodes, 1)
    potential_term = nodes**alpha * nonlinearity.fprime(u) * z
    residual_values = -second - dz / nodes - potential_term
    residual = float(
        np.max(np.abs(residual_values)) / max(1.0, float(np.max(np.abs(potential_term))))
    )
    slope_scale = float(np.max(np.abs(du)))
    boundary = float(z[-1])
    return AuxiliaryFunction(
        z=RadialFunction(profile.grid, z, dz),
        residual=residual,
        boundary_value=boundary,
        hopf_ratio=abs(boundary) / slope_scale if slope_scale else 0.0,
    )

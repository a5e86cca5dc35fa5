"""The planar transforms T_κ and T_{κ,m} and their norm identities."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging
import math
from typing import TYPE_CHECKING, Any

import numpy as np

from .const import ANGULAR_SAMPLES, DEFAULT_IDENTITY_TOLERANCE, RADIAL_EQUALITY_TOLERANCE
from .errors import DomainError, GridError
from .grid import integrate_radial, spectral_grid
from .models import (
    AngularFourierFunction,
    Domain,
    FourierTerm,
    RadialFunction,
    RadialGrid,
    RadialProfile,
)

if TYPE_CHECKING:
    from collections.abc import Callable

    from numpy.typing import ArrayLike

    from .grid import QuadratureRule
    from .models import FloatArray

    type PolarFunction = Callable[[FloatArray, FloatArray], FloatArray]

_LOGGER = logging.getLogger(__name__)


def kappa_for_alpha(alpha: float) -> float:
    """Return κ = 2/(α+2), the exponent that removes the weight |x|^α."""
    return 2.0 / (alpha + 2.0)


def weight_exponent(kappa: float) -> float:
    """Return (2-2κ)/κ, the weight exponent in the transformed integrals."""
    return (2.0 - 2.0 * kappa) / kappa


def _check_kappa(kappa: float) -> None:
    if not (math.isfinite(kappa) and kappa > 0):
        msg = f"kappa must be positive, got {kappa!r}"
        raise DomainError(msg)


@dataclass(frozen=True, slots=True)
class KappaTransform:
    """T_κ y = y|y|^(κ-1), stored in polar form (s, σ) ↦ (s^κ, σ)."""

    kappa: float

    def __post_init__(self) -> None:
        """Validate κ."""
        _check_kappa(self.kappa)

    def inverse(self) -> KappaTransform:
        """Return T_{1/κ}."""
        return KappaTransform(1.0 / self.kappa)

    def compose(self, inner: KappaTransform) -> KappaTransform:
        """Return T_κ ∘ T_λ = T_{κλ}."""
        return KappaTransform(self.kappa * inner.kappa)

    def cartesian(self, y: ArrayLike) -> FloatArray:
        """Apply the map to cartesian points of shape (..., 2)."""
        points = np.asarray(y, dtype=np.float64)
        norm = np.linalg.norm(points, axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = np.where(norm > 0, points * norm ** (self.kappa - 1), 0.0)
        return scaled

    def jacobian_matrix(self, y: ArrayLike) -> FloatArray:
        """Return the 2x2 Jacobian of the cartesian map at y ≠ 0."""
        y1, y2 = _nonzero_point(y)
        norm2 = y1 * y1 + y2 * y2
        k1 = self.kappa - 1
        factor = norm2 ** ((self.kappa - 3) / 2)
        return factor * np.array(
            [[norm2 + k1 * y1 * y1, k1 * y1 * y2], [k1 * y1 * y2, norm2 + k1 * y2 * y2]]
        )


@dataclass(frozen=True, slots=True)
class SectorTransform:
    """T_{κ,m}: (s, σ) ↦ (s^κ, σ/m)."""

    kappa: float
    m: int = 1

    def __post_init__(self) -> None:
        """Validate κ and m."""
        _check_kappa(self.kappa)
        if self.m < 1:
            msg = f"m must be a positive integer, got {self.m!r}"
            raise DomainError(msg)

    def apply(self, s: ArrayLike, sigma: ArrayLike) -> tuple[FloatArray, FloatArray]:
        """Map polar (s, σ) to (s^κ, σ/m)."""
        return (
            np.asarray(s, dtype=np.float64) ** self.kappa,
            np.asarray(sigma, dtype=np.float64) / self.m,
        )

    def invert(self, r: ArrayLike, theta: ArrayLike) -> tuple[FloatArray, FloatArray]:
        """Map polar (r, θ) back to (r^(1/κ), mθ)."""
        return (
            np.asarray(r, dtype=np.float64) ** (1.0 / self.kappa),
            np.asarray(theta, dtype=np.float64) * self.m,
        )

    def as_kappa(self) -> KappaTransform:
        """Return the T_κ this reduces to when m = 1."""
        if self.m != 1:
            msg = f"T_(κ,m) with m = {self.m} is not a T_κ"
            raise DomainError(msg)
        return KappaTransform(self.kappa)


@dataclass(frozen=True, slots=True, kw_only=True)
class IdentityReport:
    """Both sides of a checked identity and their discrepancy."""

    name: str
    lhs: float
    rhs: float
    rel_error: float
    tolerance: float
    passed: bool = field(metadata={"key": "pass"})
    details: dict[str, Any] = field(default_factory=dict)


def apply(
    transform: KappaTransform, point: tuple[ArrayLike, ArrayLike]
) -> tuple[FloatArray, FloatArray]:
    """Map polar (s, σ) to (s^κ, σ)."""
    s, sigma = point
    radius = np.asarray(s, dtype=np.float64)
    if np.any(radius < 0):
        msg = "polar radius must be ≥ 0"
        raise DomainError(msg)
    return radius**transform.kappa, np.asarray(sigma, dtype=np.float64)


def jacobian_det(transform: KappaTransform, point: ArrayLike) -> float:
    """Return det J_{T_κ}(y) = κ|y|^(2κ-2)."""
    y1, y2 = _nonzero_point(point)
    return transform.kappa * math.hypot(y1, y2) ** (2 * transform.kappa - 2)


def _nonzero_point(point: ArrayLike) -> tuple[float, float]:
    y1, y2 = (float(value) for value in np.asarray(point, dtype=np.float64).reshape(2))
    if y1 == 0 and y2 == 0:
        msg = "the Jacobian is undefined at y = 0"
        raise DomainError(msg)
    return y1, y2


def map_domain(domain: Domain, kappa: float) -> Domain:
    """Return Ω_κ = T_κ^{-1}(Ω), with radii R ↦ R^(1/κ)."""
    _check_kappa(kappa)
    return Domain(domain.inner_radius ** (1.0 / kappa), domain.outer_radius ** (1.0 / kappa))


def _mapped_grid(grid: RadialGrid, exponent: float, domain: Domain) -> RadialGrid:
    nodes = grid.nodes**exponent
    nodes[-1] = domain.outer_radius
    if not domain.is_ball():
        nodes[0] = domain.inner_radius
    return RadialGrid(nodes, domain)


def pull_back_radial(profile: RadialFunction, kappa: float) -> RadialFunction:
    """Return v(s) = u(s^κ) on the mapped grid of Ω_κ.

    Values are carried node by node; derivatives follow v′(s) = κ s^(κ-1) u′(s^κ).
    """
    domain = map_domain(profile.grid.domain, kappa)
    grid = _mapped_grid(profile.grid, 1.0 / kappa, domain)
    chain = kappa * grid.nodes ** (kappa - 1)
    return _transported(profile, grid, chain, exponent=1.0 / kappa, alpha=0.0)


def push_forward_radial(profile: RadialFunction, kappa: float) -> RadialFunction:
    """Return u(r) = v(r^(1/κ)) on the mapped grid of T_κ(Ω_κ)."""
    _check_kappa(kappa)
    domain = map_domain(profile.grid.domain, 1.0 / kappa)
    grid = _mapped_grid(profile.grid, kappa, domain)
    chain = profile.nodes ** (1 - kappa) / kappa
    return _transported(profile, grid, chain, exponent=kappa, alpha=weight_exponent(kappa))


def _transported(
    function: RadialFunction,
    grid: RadialGrid,
    chain: FloatArray,
    *,
    exponent: float,
    alpha: float,
) -> RadialFunction:
    derivatives = None if function.derivatives is None else function.derivatives * chain
    if isinstance(function, RadialProfile):
        return replace(
            function,
            grid=grid,
            values=function.values,
            derivatives=derivatives,
            alpha=alpha,
            zeros=tuple(zero**exponent for zero in function.zeros),
            residual=math.nan,
        )
    return RadialFunction(grid, function.values, derivatives)


def push_forward_fourier(
    psi: AngularFourierFunction,
    sector: SectorTransform,
    *,
    domain: Domain | None = None,
) -> AngularFourierFunction:
    """Carry ψ on Ω_κ to φ = ψ ∘ T_{κ,m}^{-1} on Ω.

    Mode k becomes mode m·k with coefficient b_k(r^(1/κ)); parities are kept.
    """
    target = map_domain(psi.grid.domain, 1.0 / sector.kappa)
    if domain is not None and not (
        math.isclose(target.outer_radius, domain.outer_radius, rel_tol=1e-10)
        and math.isclose(target.inner_radius, domain.inner_radius, rel_tol=1e-10, abs_tol=1e-12)
    ):
        msg = f"coefficient grid maps onto {target}, which does not cover {domain}"
        raise GridError(msg)
    grid = _mapped_grid(psi.grid, sector.kappa, target)
    chain = psi.grid.nodes ** (1 - sector.kappa) / sector.kappa
    terms = []
    for term in psi.terms:
        coefficient = term.coefficient
        derivatives = None if coefficient.derivatives is None else coefficient.derivatives * chain
        terms.append(
            FourierTerm(
                sector.m * term.mode,
                term.parity,
                RadialFunction(grid, coefficient.values, derivatives),
            )
        )
    return AngularFourierFunction(tuple(terms))


def verify_composition_identity(
    psi: PolarFunction,
    domain: Domain,
    kappa: float,
    func: Callable[[FloatArray], FloatArray],
    *,
    points: int = 4000,
    angular_samples: int = ANGULAR_SAMPLES,
    tolerance: float = DEFAULT_IDENTITY_TOLERANCE,
    name: str = "composition_identity",
) -> IdentityReport:
    """Check ∫_{Ω_κ} F(ψ) dy = κ^(-1) ∫_Ω F(φ) |x|^((2-2κ)/κ) dx.

    ψ is a vectorised polar callable ψ(s, σ) on Ω_κ = T_κ^{-1}(Ω); both sides
    use independent polar quadratures.
    """
    theta = np.linspace(0.0, 2 * math.pi, angular_samples, endpoint=False)[None, :]
    source_grid = spectral_grid(map_domain(domain, kappa), points)
    s = source_grid.nodes[:, None]
    lhs_mean = np.mean(func(psi(s, theta)), axis=1)
    lhs = integrate_radial(lhs_mean, source_grid, 0.0, rule="simpson")

    target_grid = spectral_grid(domain, points)
    r = target_grid.nodes[:, None]
    rhs_mean = np.mean(func(psi(r ** (1.0 / kappa), theta)), axis=1)
    rhs = integrate_radial(rhs_mean, target_grid, weight_exponent(kappa), rule="simpson") / kappa

    rel_error = _relative(lhs, rhs)
    _LOGGER.debug("%s: lhs=%.17g rhs=%.17g rel=%.3e", name, lhs, rhs, rel_error)
    return IdentityReport(
        name=name,
        lhs=lhs,
        rhs=rhs,
        rel_error=rel_error,
        tolerance=tolerance,
        passed=rel_error <= tolerance,
        details={"kappa": kappa, "weight_exponent": weight_exponent(kappa)},
    )


def verify_lr_identity(
    psi: PolarFunction,
    domain: Domain,
    kappa: float,
    exponent: float = 2.0,
    **kwargs: Any,
) -> IdentityReport:
    """Check ∫_{Ω_κ} |ψ|^r dy = κ^(-1) ∫_Ω |φ|^r |x|^((2-2κ)/κ) dx."""
    if exponent < 1:
        msg = f"the L^r exponent must be ≥ 1, got {exponent!r}"
        raise DomainError(msg)
    report = verify_composition_identity(
        psi,
        domain,
        kappa,
        lambda values: np.abs(values) ** exponent,
        name="lr_identity",
        **kwargs,
    )
    report.details["exponent"] = exponent
    return report


def dirichlet_energy(
    function: AngularFourierFunction, *, rule: QuadratureRule = "simpson"
) -> float:
    """Return ∫|∇w|² as Σ π c_k ∫ (b′² + k² b²/r²) r dr."""
    total = 0.0
    for term in function.terms:
        values, slopes = values_and_slopes(term.coefficient)
        density = slopes**2 + term.mode**2 * values**2 / term.coefficient.nodes**2
        total += term.angular_weight / (2 * math.pi) * integrate_radial(
            density, term.coefficient.grid, 0.0, rule=rule
        )
    return total


def values_and_slopes(function: RadialFunction) -> tuple[FloatArray, FloatArray]:
    """Return samples and slopes, differencing when no derivative is stored."""
    if function.derivatives is not None:
        return function.values, function.derivatives
    return function.values, np.gradient(function.values, function.nodes, edge_order=2)


def verify_h1_identities(
    psi: AngularFourierFunction,
    kappa: float,
    *,
    tolerance: float = RADIAL_EQUALITY_TOLERANCE,
    rule: QuadratureRule = "simpson",
) -> IdentityReport:
    """Check min{κ,1/κ}∫|∇φ|² ≤ ∫|∇ψ|² ≤ max{κ,1/κ}∫|∇φ|².

    Radial ψ must also satisfy κ∫|∇φ|² = ∫|∇ψ|².

    The pointwise identity [ψ_s² + ψ_σ²/s²] s^(2-2κ) = κ²φ_r² + φ_θ²/r² is
    checked mode by mode on the grid.
    """
    phi = push_forward_fourier(psi, SectorTransform(kappa, 1))
    grad_psi = dirichlet_energy(psi, rule=rule)
    grad_phi = dirichlet_energy(phi, rule=rule)
    low, high = min(kappa, 1 / kappa), max(kappa, 1 / kappa)
    headroom = tolerance * abs(grad_psi)
    sandwich = low * grad_phi - headroom <= grad_psi <= high * grad_phi + headroom
    strict = low * grad_phi < grad_psi < high * grad_phi
    rel_error = _relative(grad_psi, kappa * grad_phi)
    pointwise = _pointwise_gradient_error(psi, phi, kappa)
    passed = sandwich and pointwise <= tolerance
    if psi.is_radial:
        passed = passed and rel_error <= tolerance
    return IdentityReport(
        name="h1_identity",
        lhs=grad_psi,
        rhs=kappa * grad_phi,
        rel_error=rel_error,
        tolerance=tolerance,
        passed=passed,
        details={
            "kappa": kappa,
            "radial": psi.is_radial,
            "gradient_phi": grad_phi,
            "lower_bound": low * grad_phi,
            "upper_bound": high * grad_phi,
            "sandwich": sandwich,
            "strict": strict,
            "pointwise_error": pointwise,
        },
    )


def _pointwise_gradient_error(
    psi: AngularFourierFunction, phi: AngularFourierFunction, kappa: float
) -> float:
    s = psi.grid.nodes
    r = phi.grid.nodes
    worst = 0.0
    for source, image in zip(psi.terms, phi.terms, strict=True):
        b, db = values_and_slopes(source.coefficient)
        c, dc = values_and_slopes(image.coefficient)
        k = source.mode
        radial_lhs = db**2 * s ** (2 - 2 * kappa)
        radial_rhs = kappa**2 * dc**2
        angular_lhs = k**2 * b**2 * s ** (-2 * kappa)
        angular_rhs = k**2 * c**2 / r**2
        scale = max(float(np.max(radial_lhs + angular_lhs)), np.finfo(float).tiny)
        worst = max(
            worst,
            float(np.max(np.abs(radial_lhs - radial_rhs))) / scale,
            float(np.max(np.abs(angular_lhs - angular_rhs))) / scale,
        )
    return worst


def jacobian_fd_check(
    transform: KappaTransform,
    points: ArrayLike,
    *,
    step: float = 1e-6,
    tolerance: float = DEFAULT_IDENTITY_TOLERANCE,
) -> IdentityReport:
    """Compare the Jacobian formulas against central differences of the cartesian map."""
    samples = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    worst_det = worst_matrix = 0.0
    worst = (math.nan, math.nan)
    for y in samples:
        h = step * float(np.linalg.norm(y))
        columns = [
            (transform.cartesian(y + h * unit) - transform.cartesian(y - h * unit)) / (2 * h)
            for unit in np.eye(2)
        ]
        numeric = np.column_stack(columns)
        exact_det = jacobian_det(transform, y)
        numeric_det = float(np.linalg.det(numeric))
        det_error = abs(numeric_det - exact_det) / abs(exact_det)
        matrix = transform.jacobian_matrix(y)
        worst_matrix = max(
            worst_matrix, float(np.max(np.abs(matrix - numeric)) / np.max(np.abs(matrix)))
        )
        if det_error >= worst_det:
            worst_det, worst = det_error, (exact_det, numeric_det)
    return IdentityReport(
        name="jacobian",
        lhs=worst[0],
        rhs=worst[1],
        rel_error=worst_det,
        tolerance=tolerance,
        passed=worst_det <= tolerance and worst_matrix <= tolerance,
        details={
            "kappa": transform.kappa,
            "points": int(samples.shape[0]),
            "matrix_rel_error": worst_matrix,
        },
    )


def verify_group_law(
    outer: KappaTransform,
    inner: KappaTransform,
    points: ArrayLike,
    *,
    tolerance: float = 1e-12,
) -> IdentityReport:
    """Check T_κ ∘ T_λ = T_{κλ} and T_κ ∘ T_κ^{-1} = id on cartesian samples."""
    samples = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    composed = outer.cartesian(inner.cartesian(samples))
    direct = outer.compose(inner).cartesian(samples)
    round_trip = outer.inverse().cartesian(outer.cartesian(samples))
    scale = np.maximum(np.linalg.norm(direct, axis=1), np.finfo(float).tiny)
    group_error = float(np.max(np.linalg.norm(composed - direct, axis=1) / scale))
    inverse_error = float(
        np.max(np.linalg.norm(round_trip - samples, axis=1) / np.linalg.norm(samples, axis=1))
    )
    rel_error = max(group_error, inverse_error)
    return IdentityReport(
        name="group_law",
        lhs=float(np.linalg.norm(composed)),
        rhs=float(np.linalg.norm(direct)),
        rel_error=rel_error,
        tolerance=tolerance,
        passed=rel_error <= tolerance,
        details={
            "kappa": outer.kappa,
            "inner_kappa": inner.kappa,
            "inverse_error": inverse_error,
            "group_error": group_error,
        },
    )


def _relative(lhs: float, rhs: float) -> float:
    """Relative gap with an absolute floor, so two sides near 0 compare absolutely."""
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))

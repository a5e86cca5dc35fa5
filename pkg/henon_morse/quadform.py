"""Quadratic forms Q_u and their comparison under the transform T_κ."""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import TYPE_CHECKING, Literal

import numpy as np

from .const import PROP31_SLACK, RADIAL_EQUALITY_TOLERANCE
from .errors import GridError
from .grid import integrate_radial, sign_change_indices
from .models import AngularFourierFunction, RadialFunction
from .spectral import ModeProblem, discrete_form, discrete_mass
from .transform import (
    SectorTransform,
    kappa_for_alpha,
    push_forward_fourier,
    push_forward_radial,
    values_and_slopes,
)

if TYPE_CHECKING:
    from .grid import QuadratureRule
    from .models import FloatArray, FourierTerm, RadialGrid, RadialProfile
    from .nonlinearity import Nonlinearity

_LOGGER = logging.getLogger(__name__)

type FormRule = Literal["operator", "simpson", "trapezoid"]

_SIGN_ATOL = 1e-9


def _paired_terms(
    function: AngularFourierFunction, other: AngularFourierFunction | None
) -> list[tuple[FourierTerm, FourierTerm]]:
    """Pair terms with equal (mode, parity); other pairs integrate to 0 in θ."""
    if other is None:
        return [(term, term) for term in function.terms]
    if not other.grid.matches(function.grid):
        msg = "grid mismatch between the two arguments of the form"
        raise GridError(msg)
    partners = {term.key: term for term in other.terms}
    return [(term, partners[term.key]) for term in function.terms if term.key in partners]


def _check_grid(profile: RadialFunction, function: AngularFourierFunction) -> None:
    if not function.grid.matches(profile.grid):
        msg = "grid mismatch: test function and profile use different grids"
        raise GridError(msg)


def eval_Q(
    profile: RadialFunction,
    alpha: float,
    nonlinearity: Nonlinearity,
    w: AngularFourierFunction,
    *,
    other: AngularFourierFunction | None = None,
    rule: FormRule = "operator",
) -> float:
    """Return Q_u(w, w̃) = ∫ ∇w·∇w̃ - ∫ |x|^α f′(u) w w̃.

    Mode by mode with partner coefficient d this is
    Σ π c_k [∫(b′d′ + k² b d/r²) r dr - ∫ r^α f′(u) b d r dr], where c₀ = 2 and
    c_k = 1. The "operator" rule is the discrete form of the
    spectral stiffness matrix, so an eigenfunction gives exactly λ‖w‖².
    """
    _check_grid(profile, w)
    potential = profile.nodes**alpha * nonlinearity.fprime(profile.values)
    total = 0.0
    for term, partner in _paired_terms(w, other):
        a = term.coefficient
        b = partner.coefficient
        if rule == "operator":
            problem = ModeProblem(mode=term.mode, grid=profile.grid, potential=potential)
            radial = discrete_form(problem, a.values, b.values)
        else:
            a_values, a_slopes = values_and_slopes(a)
            b_values, b_slopes = values_and_slopes(b)
            density = (
                a_slopes * b_slopes
                + term.mode**2 * a_values * b_values / profile.nodes**2
                - potential * a_values * b_values
            )
            radial = integrate_radial(density, profile.grid, rule=rule) / (2 * math.pi)
        total += term.angular_weight * radial
    return total


def eval_Q_on_preimage(
    profile: RadialFunction,
    alpha: float,
    nonlinearity: Nonlinearity,
    w: AngularFourierFunction,
    source: RadialGrid,
    kappa: float,
    *,
    rule: QuadratureRule = "simpson",
) -> float:
    """Return Q_u(w, w) with the quadrature carried out on the grid of Ω_κ.

    The nodes of ``profile`` must be the images r = s^κ of the ``source`` nodes.
    Each Ω density is multiplied by the Jacobian κ s^(2κ-2), so the radial
    integral becomes an integral in s on the same nodes as the reduced form.
    """
    _check_grid(profile, w)
    if profile.grid.size != source.size:
        msg = "grid mismatch: the source grid and the mapped profile differ in size"
        raise GridError(msg)
    jacobian = kappa * source.nodes ** (2 * kappa - 2)
    potential = profile.nodes**alpha * nonlinearity.fprime(profile.values)
    total = 0.0
    for term in w.terms:
        values, slopes = values_and_slopes(term.coefficient)
        density = (
            slopes**2 + term.mode**2 * values**2 / profile.nodes**2 - potential * values**2
        )
        total += term.angular_weight * integrate_radial(density * jacobian, source, rule=rule)
    return total / (2 * math.pi)


def weighted_inner(
    w: AngularFourierFunction,
    other: AngularFourierFunction | None,
    alpha: float,
    *,
    rule: FormRule = "operator",
) -> float:
    """Return ∫ |x|^α w w̃; the "operator" rule is the discrete eigenvalue mass."""
    total = 0.0
    grid = w.grid
    for term, partner in _paired_terms(w, other):
        a = term.coefficient.values
        b = partner.coefficient.values
        if rule == "operator":
            problem = ModeProblem(
                mode=term.mode,
                grid=grid,
                potential=np.zeros(grid.size),
                weighted=True,
                weight_exponent=alpha,
            )
            radial = discrete_mass(problem, a, b)
        else:
            radial = integrate_radial(a * b, grid, alpha, rule=rule) / (2 * math.pi)
        total += term.angular_weight * radial
    return total


def nodal_regions(profile: RadialFunction) -> list[range]:
    """Return the node index ranges of the nodal regions, innermost first."""
    cuts = [index + 1 for index in sign_change_indices(profile.values, _SIGN_ATOL)]
    edges = [0, *cuts, profile.grid.size]
    return [range(start, stop) for start, stop in zip(edges[:-1], edges[1:], strict=True)]


def restrict_to_nodal_region(profile: RadialFunction, index: int) -> RadialFunction:
    """Return w = u·1_{region} for the index-th nodal region."""
    regions = nodal_regions(profile)
    if not 0 <= index < len(regions):
        msg = f"nodal region {index} does not exist; the profile has {len(regions)}"
        raise GridError(msg)
    mask = np.zeros(profile.grid.size, dtype=bool)
    mask[regions[index].start : regions[index].stop] = True
    values = np.where(mask, profile.values, 0.0)
    values[profile.grid.dirichlet_mask] = 0.0
    _, slopes = values_and_slopes(profile)
    return RadialFunction(profile.grid, values, np.where(mask, slopes, 0.0))


def reduced_form(
    v: RadialFunction,
    kappa: float,
    nonlinearity: Nonlinearity,
    psi: AngularFourierFunction,
    *,
    rule: FormRule = "simpson",
) -> float:
    """Return 𝒬_v(ψ, ψ) = ∫|∇ψ|² - κ² ∫ f′(v) ψ² on Ω_κ."""
    total = 0.0
    potential = kappa**2 * nonlinearity.fprime(v.values)
    nodes = v.nodes
    for term in psi.terms:
        values, slopes = values_and_slopes(term.coefficient)
        density = slopes**2 + term.mode**2 * values**2 / nodes**2 - potential * values**2
        total += term.angular_weight * integrate_radial(density, v.grid, rule=rule)
    return total / (2 * math.pi)


@dataclass(frozen=True, slots=True, kw_only=True)
class QuadFormReport:
    """Both sides of 𝒬_v(ψ,ψ) ≥ κ Q_u(φ,φ) for one test function."""

    q_value_reduced: float
    q_value_weighted: float
    ratio_bound: float
    gap: float
    slack: float
    radial: bool
    relative_gap: float
    passed: bool = field(metadata={"key": "pass"})


def check_prop31(
    v: RadialFunction,
    psi: AngularFourierFunction,
    alpha: float,
    nonlinearity: Nonlinearity,
    *,
    slack: float = PROP31_SLACK,
    tolerance: float = RADIAL_EQUALITY_TOLERANCE,
    rule: QuadratureRule = "simpson",
) -> QuadFormReport:
    """Compare the reduced form of ψ on Ω_κ with κ·Q_u of φ = ψ ∘ T_κ^{-1}.

    Q_u(φ) is integrated on the mapped nodes of the Ω_κ grid, so for radial ψ
    the two integrands coincide node by node. A nonradial ψ passes when the
    gap is ≥ -slack. A radial ψ passes when both sides agree to ``tolerance``
    relative to ∫|∇ψ|² + κ²∫|f′(v)|ψ².
    """
    _check_grid(v, psi)
    kappa = kappa_for_alpha(alpha)
    reduced = reduced_form(v, kappa, nonlinearity, psi, rule=rule)
    u = push_forward_radial(v, kappa)
    phi = push_forward_fourier(psi, SectorTransform(kappa, 1))
    weighted = eval_Q_on_preimage(u, alpha, nonlinearity, phi, v.grid, kappa, rule=rule)
    gap = reduced - kappa * weighted
    scale = _form_scale(v, kappa, nonlinearity, psi, rule=rule)
    relative = abs(gap) / scale if scale else abs(gap)
    passed = relative <= tolerance if psi.is_radial else gap >= -slack
    if not passed:
        _LOGGER.debug("Form comparison failed: gap %.3g (relative %.3g)", gap, relative)
    return QuadFormReport(
        q_value_reduced=reduced,
        q_value_weighted=weighted,
        ratio_bound=kappa,
        gap=gap,
        slack=slack,
        radial=psi.is_radial,
        relative_gap=relative,
        passed=passed,
    )


def _form_scale(
    v: RadialFunction,
    kappa: float,
    nonlinearity: Nonlinearity,
    psi: AngularFourierFunction,
    *,
    rule: FormRule,
) -> float:
    potential = kappa**2 * np.abs(nonlinearity.fprime(v.values))
    total = 0.0
    for term in psi.terms:
        values, slopes = values_and_slopes(term.coefficient)
        density = slopes**2 + term.mode**2 * values**2 / v.nodes**2 + potential * values**2
        total += term.angular_weight * integrate_radial(density, v.grid, rule=rule)
    return total / (2 * math.pi)


def gram_matrices(
    profile: RadialProfile,
    nonlinearity: Nonlinearity,
    directions: list[AngularFourierFunction] | tuple[AngularFourierFunction, ...],
) -> tuple[FloatArray, FloatArray]:
    """Return the Q_u and |x|^α Gram matrices of a list of directions."""
    size = len(directions)
    gram_q = np.zeros((size, size))
    gram_weight = np.zeros((size, size))
    for i, first in enumerate(directions):
        for j in range(i, size):
            second = directions[j]
            gram_q[i, j] = gram_q[j, i] = eval_Q(
                profile, profile.alpha, nonlinearity, first, other=second
            )
            gram_weight[i, j] = gram_weight[j, i] = weighted_inner(
                first, second, profile.alpha
            )
    return gram_q, gram_weight


def region_form_values(
    profile: RadialProfile, nonlinearity: Nonlinearity, *, rule: FormRule = "operator"
) -> list[float]:
    """Return Q_u(u·1_region) for every nodal region."""
    return [
        eval_Q(
            profile,
            profile.alpha,
            nonlinearity,
            AngularFourierFunction.radial(restrict_to_nodal_region(profile, index)),
            rule=rule,
        )
        for index in range(len(nodal_regions(profile)))
    ]

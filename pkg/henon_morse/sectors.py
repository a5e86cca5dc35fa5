"""Nonradial negative directions for even α through the sector transform T_{κ,m}."""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import TYPE_CHECKING

import numpy as np

from .const import (
    ANGULAR_SAMPLES,
    DEFAULT_IDENTITY_TOLERANCE,
    DEFAULT_SCALING_TOLERANCE,
)
from .errors import DiscretizationAlarm, UsageError
from .grid import resample
from .models import AngularFourierFunction, FourierTerm, Parity
from .quadform import gram_matrices
from .spectral import (
    DEFAULT_SPECTRAL,
    ModeProblem,
    SpectralOptions,
    assemble_mode_operator,
    eigenpairs,
    is_positive_even,
    mode_spectrum,
    negative_count,
    reduced_problem,
)
from .transform import SectorTransform, push_forward_fourier

if TYPE_CHECKING:
    from .models import FloatArray, RadialFunction, RadialProfile
    from .nonlinearity import Nonlinearity

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, kw_only=True)
class NegativeDirectionSet:
    """Mutually orthogonal directions on which Q_u is negative."""

    directions: tuple[AngularFourierFunction, ...]
    labels: tuple[str, ...]
    gram_q: FloatArray
    gram_weight: FloatArray
    sector_mode: int
    reduced_eigenvalue: float
    mode_eigenvalues: dict[int, float]
    scaling_error: float
    orthogonal: bool
    negative: bool
    passed: bool = field(metadata={"key": "pass"})

    @property
    def nonradial_count(self) -> int:
        """Return the number of directions with a nonzero angular mode."""
        return sum(1 for direction in self.directions if not direction.is_radial)

    @property
    def radial_count(self) -> int:
        """Return the number of mode-0 directions."""
        return len(self.directions) - self.nonradial_count


def sector_mode(alpha: float) -> int:
    """Return m with α = 2(m - 1)."""
    if not is_positive_even(alpha):
        msg = f"sector directions need a positive even alpha, got {alpha!r}"
        raise UsageError(msg)
    return int(alpha) // 2 + 1


def _pair(function: RadialFunction, mode: int) -> list[AngularFourierFunction]:
    return [
        AngularFourierFunction((FourierTerm(mode, parity, function),)) for parity in Parity
    ]


def build_sector_directions(
    profile: RadialProfile,
    nonlinearity: Nonlinearity,
    options: SpectralOptions = DEFAULT_SPECTRAL,
    *,
    cells: int | None = None,
    identity_tolerance: float = DEFAULT_IDENTITY_TOLERANCE,
    scaling_tolerance: float = DEFAULT_SCALING_TOLERANCE,
) -> NegativeDirectionSet:
    """Build the 2m nonradial and the radial negative directions of Q_u.

    The reduced mode-1 eigenfunction a(s) on Ω_κ, κ = 1/m, is carried by
    T_{κ,m} to a(r^m)·{cos mθ, sin mθ}, a weighted eigenfunction of mode m
    with eigenvalue m²λ. Modes 1 ≤ n < m come from direct weighted solves.
    """
    m = sector_mode(profile.alpha)
    tolerance = options.eigen_tolerance
    reduced = reduced_problem(profile, nonlinearity, 1, cells=cells)
    (reduced_value,), (reduced_function,) = eigenpairs(reduced, 1)
    reduced_value = float(reduced_value)
    if reduced_value >= -tolerance:
        msg = (
            f"reduced mode-1 eigenvalue {reduced_value:.6g} is not negative"
            f" for alpha = {profile.alpha:g}; refine the grid"
        )
        raise DiscretizationAlarm(msg)

    base = ModeProblem.linearized(profile, nonlinearity, 0, weighted=True)
    directions: list[AngularFourierFunction] = []
    labels: list[str] = []
    mode_eigenvalues: dict[int, float] = {}

    radial_system = assemble_mode_operator(base)
    radial_negative = negative_count(radial_system, tolerance)
    if radial_negative:
        _, radial_functions = eigenpairs(base, radial_negative, system=radial_system)
        for index, function in enumerate(radial_functions):
            directions.append(AngularFourierFunction.radial(function))
            labels.append(f"k=0 #{index + 1}")

    for n in range(1, m):
        values, (function,) = eigenpairs(base.with_mode(n), 1)
        lowest = float(values[0])
        mode_eigenvalues[n] = lowest
        if lowest >= -tolerance:
            msg = (
                f"weighted mode-{n} lowest eigenvalue {lowest:.6g} is not negative"
                f" for alpha = {profile.alpha:g}; refine the grid"
            )
            raise DiscretizationAlarm(msg)
        directions.extend(_pair(function, n))
        labels.extend(f"k={n} {parity}" for parity in Parity)

    reduced_pair = AngularFourierFunction(
        tuple(FourierTerm(1, parity, reduced_function) for parity in Parity)
    )
    pushed = push_forward_fourier(reduced_pair, SectorTransform(1 / m, m))
    coefficient = resample(pushed.terms[0].coefficient, profile.grid, even=m % 2 == 0)
    directions.extend(_pair(coefficient, m))
    labels.extend(f"k={m} {parity}" for parity in Parity)

    direct = mode_spectrum(base.with_mode(m), 1, tolerance).lowest
    mode_eigenvalues[m] = direct
    predicted = m**2 * reduced_value
    scaling_error = abs(direct - predicted) / abs(predicted)
    _LOGGER.debug(
        "Sector mode %s: direct %.10g, m²λ %.10g (relative error %.3g)",
        m,
        direct,
        predicted,
        scaling_error,
    )

    gram_q, gram_weight = gram_matrices(profile, nonlinearity, directions)
    orthogonal = _diagonal(gram_q, directions, identity_tolerance) and _diagonal(
        gram_weight, directions, identity_tolerance
    )
    negative = bool(np.all(np.diag(gram_q) < 0))
    if not negative:
        msg = f"Q_u is not negative on every sector direction for alpha = {profile.alpha:g}"
        raise DiscretizationAlarm(msg)
    passed = orthogonal and negative and scaling_error < scaling_tolerance
    if not passed:
        _LOGGER.warning(
            "Sector directions for alpha = %s: orthogonal=%s, scaling error %.3g",
            profile.alpha,
            orthogonal,
            scaling_error,
        )
    return NegativeDirectionSet(
        directions=tuple(directions),
        labels=tuple(labels),
        gram_q=gram_q,
        gram_weight=gram_weight,
        sector_mode=m,
        reduced_eigenvalue=reduced_value,
        mode_eigenvalues=mode_eigenvalues,
        scaling_error=scaling_error,
        orthogonal=orthogonal,
        negative=negative,
        passed=passed,
    )


def _diagonal(
    gram: FloatArray,
    directions: list[AngularFourierFunction],
    tolerance: float,
) -> bool:
    """Check off-diagonal entries: zero across keys, small within a key."""
    keys = [tuple(term.key for term in direction.terms) for direction in directions]
    size = len(directions)
    for i in range(size):
        for j in range(i + 1, size):
            entry = abs(gram[i, j])
            if keys[i] != keys[j]:
                if entry != 0:
                    return False
            elif entry > tolerance * math.sqrt(abs(gram[i, i] * gram[j, j])):
                return False
    return True


def angular_sign_changes(
    phi: AngularFourierFunction, radius_index: int, samples: int = ANGULAR_SAMPLES
) -> int:
    """Count cyclic sign changes of φ(r_i, ·) on a half-step offset angular lattice."""
    theta = (np.arange(samples) + 0.5) * (2 * math.pi / samples)
    values = phi.evaluate(radius_index, theta)
    signs = np.sign(values)
    return int(np.count_nonzero(signs != np.roll(signs, 1)))

"""Seeded smooth test functions for the form and norm identities."""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import TYPE_CHECKING

import numpy as np
from numpy.polynomial import Polynomial

from .const import DEFAULT_TRIAL_DEGREE, DEFAULT_TRIAL_MAX_MODE
from .errors import GridError
from .models import AngularFourierFunction, FourierTerm, Parity, RadialFunction
from .transform import dirichlet_energy

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from .models import Domain, FloatArray, RadialGrid

_MAX_TERMS = 4


@dataclass(frozen=True, slots=True)
class PolynomialTerm:
    """b(s)·cos(kσ) or b(s)·sin(kσ) with a polynomial envelope b."""

    mode: int
    parity: Parity
    envelope: Polynomial


@dataclass(frozen=True, slots=True)
class PolynomialTrial:
    """A finite angular expansion with polynomial coefficients vanishing on ∂Ω."""

    domain: Domain
    terms: tuple[PolynomialTerm, ...]

    @property
    def is_radial(self) -> bool:
        """Return True when only mode 0 is present."""
        return all(term.mode == 0 for term in self.terms)

    def __call__(self, s: ArrayLike, sigma: ArrayLike) -> FloatArray:
        """Evaluate ψ(s, σ) with broadcasting."""
        radius = np.asarray(s, dtype=np.float64)
        angle = np.asarray(sigma, dtype=np.float64)
        total = np.zeros(np.broadcast(radius, angle).shape)
        for term in self.terms:
            factor = np.cos if term.parity is Parity.COSINE else np.sin
            total = total + term.envelope(radius) * factor(term.mode * angle)
        return total

    def sample(self, grid: RadialGrid) -> AngularFourierFunction:
        """Sample the coefficients and their exact derivatives on a grid."""
        terms = []
        for term in self.terms:
            values = term.envelope(grid.nodes)
            values[grid.dirichlet_mask] = 0.0
            slopes = term.envelope.deriv()(grid.nodes)
            terms.append(FourierTerm(term.mode, term.parity, RadialFunction(grid, values, slopes)))
        return AngularFourierFunction(tuple(terms))

    def scaled(self, factor: float) -> PolynomialTrial:
        """Return factor·ψ."""
        return PolynomialTrial(
            self.domain,
            tuple(
                PolynomialTerm(term.mode, term.parity, factor * term.envelope)
                for term in self.terms
            ),
        )


def envelope(
    domain: Domain, mode: int, coefficients: ArrayLike
) -> Polynomial:
    """Return a polynomial coefficient vanishing on the Dirichlet boundary.

    On a disk of radius R this is s^k (1 - (s/R)²) P(s²), smooth at the
    origin for mode k. On an annulus [a, b] it is (s - a)(b - s) P(s).
    """
    base = Polynomial(np.asarray(coefficients, dtype=np.float64))
    if domain.is_ball():
        radius = domain.outer_radius
        even = base(Polynomial([0.0, 0.0, 1.0]))
        cutoff = Polynomial([1.0, 0.0, -1.0 / radius**2])
        return Polynomial.basis(mode) * cutoff * even
    inner, outer = domain.inner_radius, domain.outer_radius
    return Polynomial([-inner, 1.0]) * Polynomial([outer, -1.0]) * base


def random_trial(
    rng: np.random.Generator,
    domain: Domain,
    *,
    max_mode: int = DEFAULT_TRIAL_MAX_MODE,
    degree: int = DEFAULT_TRIAL_DEGREE,
    radial: bool = False,
) -> PolynomialTrial:
    """Draw a trial with 1 to 4 terms and at least one nonradial term, or a radial one."""
    if radial:
        return PolynomialTrial(
            domain,
            (
                PolynomialTerm(
                    0, Parity.COSINE, envelope(domain, 0, rng.standard_normal(degree + 1))
                ),
            ),
        )
    if max_mode < 1:
        msg = f"a nonradial trial needs max_mode ≥ 1, got {max_mode}"
        raise GridError(msg)
    keys = [(0, Parity.COSINE)] + [
        (mode, parity) for mode in range(1, max_mode + 1) for parity in Parity
    ]
    count = int(rng.integers(1, _MAX_TERMS + 1))
    chosen = {keys[int(rng.integers(1, len(keys)))]}
    while len(chosen) < count:
        chosen.add(keys[int(rng.integers(0, len(keys)))])
    terms = tuple(
        PolynomialTerm(mode, parity, envelope(domain, mode, rng.standard_normal(degree + 1)))
        for mode, parity in sorted(chosen, key=lambda key: (key[0], key[1].value))
    )
    return PolynomialTrial(domain, terms)


def normalized_trials(
    seed: int,
    count: int,
    grid: RadialGrid,
    *,
    max_mode: int = DEFAULT_TRIAL_MAX_MODE,
    degree: int = DEFAULT_TRIAL_DEGREE,
    radial: bool = False,
) -> list[AngularFourierFunction]:
    """Return ``count`` sampled trials, each scaled to unit Dirichlet energy."""
    rng = np.random.default_rng(seed)
    trials = []
    for _ in range(count):
        trial = random_trial(rng, grid.domain, max_mode=max_mode, degree=degree, radial=radial)
        energy = dirichlet_energy(trial.sample(grid))
        trials.append(trial.scaled(1 / math.sqrt(energy)).sample(grid))
    return trials


def random_polar_trials(
    seed: int,
    count: int,
    domain: Domain,
    *,
    max_mode: int = DEFAULT_TRIAL_MAX_MODE,
    degree: int = DEFAULT_TRIAL_DEGREE,
) -> list[PolynomialTrial]:
    """Return ``count`` trials usable as callables ψ(s, σ)."""
    rng = np.random.default_rng(seed)
    return [random_trial(rng, domain, max_mode=max_mode, degree=degree) for _ in range(count)]


def random_points(
    seed: int,
    count: int,
    *,
    radii: tuple[float, float] = (0.1, 2.0),
) -> FloatArray:
    """Return ``count`` planar points with |y| uniform in ``radii`` and uniform angle."""
    rng = np.random.default_rng(seed)
    radius = rng.uniform(*radii, size=count)
    angle = rng.uniform(0.0, 2 * math.pi, size=count)
    return np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))

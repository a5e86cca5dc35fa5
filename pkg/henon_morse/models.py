"""Models for the henon_morse package."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
import math
from typing import TYPE_CHECKING

import numpy as np

from .errors import DomainError, GridError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

type FloatArray = NDArray[np.float64]

_BOUNDARY_ATOL = 1e-8


def _frozen_array(values: ArrayLike) -> FloatArray:
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, slots=True)
class Domain:
    """A disk or annulus centred at the origin."""

    inner_radius: float
    outer_radius: float

    def __post_init__(self) -> None:
        """Validate the radii."""
        inner, outer = self.inner_radius, self.outer_radius
        if not (math.isfinite(inner) and math.isfinite(outer)):
            msg = f"radii must be finite, got {inner!r} and {outer!r}"
            raise DomainError(msg)
        if inner < 0:
            msg = f"inner radius must be ≥ 0, got {inner!r}"
            raise DomainError(msg)
        if inner >= outer:
            msg = f"inner < outer required, got {inner!r} and {outer!r}"
            raise DomainError(msg)

    @classmethod
    def ball(cls, radius: float = 1.0) -> Domain:
        """Return the disk of the given radius."""
        return cls(0.0, float(radius))

    @classmethod
    def annulus(cls, inner_radius: float, outer_radius: float) -> Domain:
        """Return the annulus between two radii."""
        return cls(float(inner_radius), float(outer_radius))

    @classmethod
    def parse(cls, text: str) -> Domain:
        """Parse `ball`, `ball:R` or `annulus:RIN:ROUT`."""
        kind, _, rest = text.strip().partition(":")
        parts = [part for part in rest.split(":") if part] if rest else []
        try:
            radii = [float(part) for part in parts]
        except ValueError as err:
            msg = f"malformed domain {text!r}"
            raise DomainError(msg) from err
        if kind == "ball" and len(radii) <= 1:
            return cls.ball(*radii)
        if kind == "annulus" and len(radii) == 2:
            return cls.annulus(*radii)
        msg = f"malformed domain {text!r}, expected ball[:R] or annulus:RIN:ROUT"
        raise DomainError(msg)

    def is_ball(self) -> bool:
        """Return True for a disk."""
        return self.inner_radius == 0

    def __str__(self) -> str:
        if self.is_ball():
            if self.outer_radius == 1:
                return "ball"
            return f"ball:{self.outer_radius:g}"
        return f"annulus:{self.inner_radius:g}:{self.outer_radius:g}"


@dataclass(frozen=True, slots=True, eq=False)
class RadialGrid:
    """Ordered radii covering a domain, never containing the origin."""

    nodes: FloatArray
    domain: Domain

    def __post_init__(self) -> None:
        """Validate ordering and coverage."""
        nodes = _frozen_array(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            msg = "a radial grid needs at least two nodes"
            raise GridError(msg)
        if not np.all(np.isfinite(nodes)) or np.any(np.diff(nodes) <= 0):
            msg = "grid nodes must be finite and strictly increasing"
            raise GridError(msg)
        outer = self.domain.outer_radius
        if not math.isclose(nodes[-1], outer, rel_tol=1e-12, abs_tol=1e-15):
            msg = f"last node {nodes[-1]!r} differs from outer radius {outer!r}"
            raise GridError(msg)
        inner = self.domain.inner_radius
        if nodes[0] < inner * (1 - 1e-12):
            msg = f"first node {nodes[0]!r} lies inside the inner radius {inner!r}"
            raise GridError(msg)
        if nodes[0] <= 0:
            msg = "a radial grid never contains r = 0"
            raise GridError(msg)

    @property
    def size(self) -> int:
        """Return the number of nodes."""
        return int(self.nodes.size)

    @property
    def is_uniform(self) -> bool:
        """Return True when consecutive nodes are equally spaced."""
        steps = np.diff(self.nodes)
        return bool(np.allclose(steps, steps.mean(), rtol=1e-9, atol=0.0))

    @property
    def spacing(self) -> float:
        """Return the mean node spacing."""
        return float(np.diff(self.nodes).mean())

    @property
    def dirichlet_mask(self) -> NDArray[np.bool_]:
        """Return a mask of nodes that sit on a Dirichlet boundary."""
        mask = np.zeros(self.size, dtype=bool)
        mask[-1] = True
        if not self.domain.is_ball():
            mask[0] = True
        return mask

    def matches(self, other: RadialGrid) -> bool:
        """Return True when both grids carry the same nodes."""
        if other is self:
            return True
        return other.size == self.size and bool(
            np.allclose(other.nodes, self.nodes, rtol=1e-13, atol=0.0)
        )


@dataclass(frozen=True, slots=True, eq=False)
class RadialFunction:
    """Samples of a radial function, optionally with its derivative."""

    grid: RadialGrid
    values: FloatArray
    derivatives: FloatArray | None = None

    def __post_init__(self) -> None:
        """Check that the samples fit the grid."""
        values = _frozen_array(self.values)
        object.__setattr__(self, "values", values)
        if values.shape != self.grid.nodes.shape:
            msg = f"grid/value length mismatch: {values.size} values on {self.grid.size} nodes"
            raise GridError(msg)
        if self.derivatives is not None:
            derivatives = _frozen_array(self.derivatives)
            object.__setattr__(self, "derivatives", derivatives)
            if derivatives.shape != self.grid.nodes.shape:
                msg = (
                    f"grid/value length mismatch: {derivatives.size} derivatives"
                    f" on {self.grid.size} nodes"
                )
                raise GridError(msg)

    @property
    def nodes(self) -> FloatArray:
        """Return the grid radii."""
        return self.grid.nodes

    def vanishes_on_boundary(self, atol: float = _BOUNDARY_ATOL) -> bool:
        """Return True when the values vanish at the Dirichlet nodes."""
        scale = max(1.0, float(np.max(np.abs(self.values))))
        return bool(np.all(np.abs(self.values[self.grid.dirichlet_mask]) <= atol * scale))


@dataclass(frozen=True, slots=True, eq=False, kw_only=True)
class RadialProfile(RadialFunction):
    """A radial solution of the Henon-type equation on a grid."""

    alpha: float
    nodal_sets: int
    residual: float = math.nan
    residual_tolerance: float = math.inf
    zeros: tuple[float, ...] = ()
    diverged: bool = False
    shooting_parameter: float = math.nan

    @property
    def boundary_value(self) -> float:
        """Return u at the outer radius."""
        return float(self.values[-1])

    @property
    def sup_norm(self) -> float:
        """Return max |u| over the grid."""
        return float(np.max(np.abs(self.values)))

    @property
    def is_verified(self) -> bool:
        """Return True when the stored residual is within tolerance."""
        return (
            not self.diverged
            and math.isfinite(self.residual)
            and self.residual <= self.residual_tolerance
        )


class Parity(StrEnum):
    """Angular parity of a Fourier term."""

    COSINE = "cos"
    SINE = "sin"


@dataclass(frozen=True, slots=True, eq=False)
class FourierTerm:
    """One term b_k(r)·cos(kθ) or b_k(r)·sin(kθ)."""

    mode: int
    parity: Parity
    coefficient: RadialFunction

    def __post_init__(self) -> None:
        """Validate the mode and parity."""
        if self.mode < 0:
            msg = f"mode must be ≥ 0, got {self.mode}"
            raise GridError(msg)
        if self.mode == 0 and self.parity is not Parity.COSINE:
            msg = "mode 0 carries only the cosine parity"
            raise GridError(msg)

    @property
    def key(self) -> tuple[int, Parity]:
        """Return the (mode, parity) pair."""
        return self.mode, self.parity

    @property
    def angular_weight(self) -> float:
        """Return the integral of the squared angular factor over a full turn."""
        return 2 * math.pi if self.mode == 0 else math.pi

    @property
    def reflection_signs(self) -> tuple[int, int]:
        """Return the signs under y2 ↦ -y2 and y1 ↦ -y1."""
        odd_mode = -1 if self.mode % 2 else 1
        if self.parity is Parity.COSINE:
            return 1, odd_mode
        return -1, -odd_mode

    def angular(self, theta: ArrayLike) -> FloatArray:
        """Evaluate the angular factor."""
        angle = self.mode * np.asarray(theta, dtype=np.float64)
        if self.parity is Parity.COSINE:
            return np.cos(angle)
        return np.sin(angle)


@dataclass(frozen=True, slots=True, eq=False)
class AngularFourierFunction:
    """A finite angular Fourier expansion with coefficients on one grid."""

    terms: tuple[FourierTerm, ...]

    def __post_init__(self) -> None:
        """Check the shared grid, unique keys and boundary values."""
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            msg = "an angular Fourier function needs at least one term"
            raise GridError(msg)
        grid = terms[0].coefficient.grid
        seen: set[tuple[int, Parity]] = set()
        for term in terms:
            if not term.coefficient.grid.matches(grid):
                msg = "all coefficients must share one grid"
                raise GridError(msg)
            if term.key in seen:
                msg = f"duplicate term for mode {term.mode} ({term.parity})"
                raise GridError(msg)
            seen.add(term.key)
            if not term.coefficient.vanishes_on_boundary():
                msg = f"coefficient of mode {term.mode} does not vanish on the boundary"
                raise GridError(msg)

    @classmethod
    def radial(cls, coefficient: RadialFunction) -> AngularFourierFunction:
        """Wrap a radial function as a mode-0 expansion."""
        return cls((FourierTerm(0, Parity.COSINE, coefficient),))

    @property
    def grid(self) -> RadialGrid:
        """Return the shared coefficient grid."""
        return self.terms[0].coefficient.grid

    @property
    def modes(self) -> tuple[int, ...]:
        """Return the sorted distinct modes."""
        return tuple(sorted({term.mode for term in self.terms}))

    @property
    def is_radial(self) -> bool:
        """Return True when only mode 0 is present."""
        return self.modes == (0,)

    def evaluate(self, radius_index: int, theta: ArrayLike) -> FloatArray:
        """Evaluate the expansion on one grid radius at the given angles."""
        total = np.zeros_like(np.asarray(theta, dtype=np.float64))
        for term in self.terms:
            total = total + term.coefficient.values[radius_index] * term.angular(theta)
        return total

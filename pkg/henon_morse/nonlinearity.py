"""Nonlinearity descriptors f and f′."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import NonlinearityError

if TYPE_CHECKING:
    from collections.abc import Callable

    from numpy.typing import ArrayLike

    from .models import FloatArray

    type Evaluator = Callable[[FloatArray], FloatArray]

_SAMPLE_LATTICE = np.concatenate(
    (-np.logspace(-3, 3, 61)[::-1], np.logspace(-3, 3, 61))
)


@dataclass(frozen=True, slots=True, eq=False, kw_only=True)
class Nonlinearity:
    """Evaluator pair (f, f′) with optional Henon metadata."""

    eval_f: Evaluator
    eval_fprime: Evaluator
    henon_power: float | None = None
    superlinear: bool = False
    name: str = "f"

    def __post_init__(self) -> None:
        """Check the metadata against sampled values."""
        lattice = _SAMPLE_LATTICE
        if self.henon_power is not None:
            power = self.henon_power
            if power <= 1:
                msg = f"Henon power must exceed 1, got {power!r}"
                raise NonlinearityError(msg)
            expected_f = np.abs(lattice) ** (power - 1) * lattice
            expected_fprime = power * np.abs(lattice) ** (power - 1)
            if not (
                np.allclose(self.f(lattice), expected_f, rtol=1e-12, atol=0.0)
                and np.allclose(self.fprime(lattice), expected_fprime, rtol=1e-12, atol=0.0)
            ):
                msg = f"{self.name} does not match |u|^(p-1)u for p = {power!r}"
                raise NonlinearityError(msg)
        if self.superlinear and not is_superlinear(self.f, self.fprime):
            msg = f"{self.name} violates f′(u) > f(u)/u on the sample lattice"
            raise NonlinearityError(msg)

    @classmethod
    def henon(cls, power: float) -> Nonlinearity:
        """Return f(u) = |u|^(p-1)u."""
        power = float(power)
        return cls(
            eval_f=lambda u: np.abs(u) ** (power - 1) * u,
            eval_fprime=lambda u: power * np.abs(u) ** (power - 1),
            henon_power=power,
            superlinear=True,
            name=f"|u|^{power:g}",
        )

    @classmethod
    def linear(cls, slope: float) -> Nonlinearity:
        """Return f(u) = c·u."""
        slope = float(slope)
        return cls(
            eval_f=lambda u: slope * u,
            eval_fprime=lambda u: np.full_like(u, slope),
            name=f"{slope:g}u",
        )

    @classmethod
    def zero(cls) -> Nonlinearity:
        """Return f ≡ 0."""
        return cls(
            eval_f=np.zeros_like,
            eval_fprime=np.zeros_like,
            name="0",
        )

    def f(self, u: ArrayLike) -> FloatArray:
        """Evaluate f."""
        return np.asarray(self.eval_f(np.asarray(u, dtype=np.float64)), dtype=np.float64)

    def fprime(self, u: ArrayLike) -> FloatArray:
        """Evaluate f′."""
        return np.asarray(self.eval_fprime(np.asarray(u, dtype=np.float64)), dtype=np.float64)

    def scaled(self, factor: float) -> Nonlinearity:
        """Return c·f for c > 0; the Henon power is kept only for c = 1."""
        if factor <= 0:
            msg = f"scale factor must be positive, got {factor!r}"
            raise NonlinearityError(msg)
        if factor == 1:
            return self
        eval_f, eval_fprime = self.eval_f, self.eval_fprime
        return Nonlinearity(
            eval_f=lambda u: factor * eval_f(u),
            eval_fprime=lambda u: factor * eval_fprime(u),
            superlinear=self.superlinear,
            name=f"{factor:g}·{self.name}",
        )


def is_superlinear(
    f: Callable[[FloatArray], FloatArray],
    fprime: Callable[[FloatArray], FloatArray],
    lattice: ArrayLike | None = None,
) -> bool:
    """Sample f′(u) > f(u)/u on a lattice of u ≠ 0."""
    samples = _SAMPLE_LATTICE if lattice is None else np.asarray(lattice, dtype=np.float64)
    samples = samples[samples != 0]
    return bool(np.all(fprime(samples) > f(samples) / samples))

"""Shared fixtures: solved profiles are cached for the whole session."""

from __future__ import annotations

from collections.abc import Callable
from functools import cache

import pytest

from henon_morse.models import Domain, RadialProfile
from henon_morse.nonlinearity import Nonlinearity
from henon_morse.radial import ShootingConfig, shoot_nodal_solution

TEST_GRID = 2000
TEST_SHOOTING = ShootingConfig(grid_points=TEST_GRID)

type ProfileFactory = Callable[..., RadialProfile]


@cache
def _solve(alpha: float, p: float, n: int, domain: str) -> RadialProfile:
    return shoot_nodal_solution(
        Nonlinearity.henon(p), alpha, Domain.parse(domain), n, config=TEST_SHOOTING
    )


@pytest.fixture(scope="session")
def shooting() -> ShootingConfig:
    """Return the solver settings used across the tests."""
    return TEST_SHOOTING


@pytest.fixture(scope="session")
def cubic() -> Nonlinearity:
    """Return f(u) = |u|²u."""
    return Nonlinearity.henon(3)


@pytest.fixture(scope="session")
def henon_profile() -> ProfileFactory:
    """Return a cached solver keyed by (alpha, p, n, domain)."""

    def solve(alpha: float, n: int = 2, *, p: float = 3.0, domain: str = "ball") -> RadialProfile:
        return _solve(float(alpha), float(p), n, domain)

    return solve


@pytest.fixture(autouse=True)
def _clean_thread_env(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("HENON_MORSE_THREADS", raising=False)

"""Tests for the seeded trial functions."""

from __future__ import annotations

import numpy as np
import pytest

from henon_morse.errors import GridError
from henon_morse.grid import spectral_grid
from henon_morse.models import Domain
from henon_morse.trials import (
    envelope,
    normalized_trials,
    random_points,
    random_trial,
)
from henon_morse.transform import dirichlet_energy


def test_disk_envelope() -> None:
    poly = envelope(Domain.ball(2), 2, [1.0])
    assert poly(2.0) == pytest.approx(0.0, abs=1e-14)
    assert poly(1.0) == pytest.approx(0.75)
    np.testing.assert_allclose(poly.coef, [0.0, 0.0, 1.0, 0.0, -0.25])


def test_annulus_envelope() -> None:
    poly = envelope(Domain.annulus(1, 2), 3, [2.0, 1.0])
    assert poly(1.0) == pytest.approx(0.0, abs=1e-14)
    assert poly(2.0) == pytest.approx(0.0, abs=1e-14)
    assert poly(1.5) == pytest.approx(0.25 * 3.5)


@pytest.mark.parametrize("seed", range(10))
def test_random_trial_shape(seed: int) -> None:
    trial = random_trial(np.random.default_rng(seed), Domain.ball())
    keys = [(term.mode, term.parity) for term in trial.terms]
    assert 1 <= len(keys) <= 4
    assert len(set(keys)) == len(keys)
    assert not trial.is_radial
    assert all(0 <= term.mode <= 5 for term in trial.terms)


def test_radial_trial() -> None:
    trial = random_trial(np.random.default_rng(1), Domain.ball(), radial=True)
    assert trial.is_radial
    with pytest.raises(GridError, match="max_mode"):
        random_trial(np.random.default_rng(1), Domain.ball(), max_mode=0)


def test_trial_evaluation_matches_samples() -> None:
    grid = spectral_grid(Domain.ball(), 50)
    trial = random_trial(np.random.default_rng(2), Domain.ball())
    sampled = trial.sample(grid)
    theta = np.linspace(0, 2 * np.pi, 7)
    np.testing.assert_allclose(
        sampled.evaluate(10, theta), trial(grid.nodes[10], theta), rtol=1e-12, atol=1e-14
    )
    assert np.allclose(trial.scaled(2.0)(0.5, 0.3), 2 * trial(0.5, 0.3))


def test_normalized_trials_are_seeded() -> None:
    grid = spectral_grid(Domain.annulus(1, 3), 400)
    first = normalized_trials(5, 3, grid)
    second = normalized_trials(5, 3, grid)
    for one, two in zip(first, second, strict=True):
        assert dirichlet_energy(one) == pytest.approx(1.0, rel=1e-12)
        assert [term.key for term in one.terms] == [term.key for term in two.terms]
        np.testing.assert_array_equal(
            one.terms[0].coefficient.values, two.terms[0].coefficient.values
        )


def test_random_points() -> None:
    points = random_points(0, 500, radii=(0.5, 1.5))
    radii = np.linalg.norm(points, axis=1)
    assert points.shape == (500, 2)
    assert np.all((radii >= 0.5 - 1e-12) & (radii <= 1.5 + 1e-12))
    np.testing.assert_array_equal(points, random_points(0, 500, radii=(0.5, 1.5)))

"""Tests for Q_u, the weighted inner product and the reduced-form comparison."""

from __future__ import annotations

import numpy as np
import pytest

from henon_morse.errors import GridError
from henon_morse.grid import spectral_grid
from henon_morse.models import AngularFourierFunction, Domain, FourierTerm, Parity
from henon_morse.nonlinearity import Nonlinearity
from henon_morse.quadform import (
    check_prop31,
    eval_Q,
    eval_Q_on_preimage,
    gram_matrices,
    nodal_regions,
    region_form_values,
    restrict_to_nodal_region,
    weighted_inner,
)
from henon_morse.spectral import ModeProblem, eigenpairs, reduced_profile
from henon_morse.transform import (
    SectorTransform,
    dirichlet_energy,
    kappa_for_alpha,
    push_forward_fourier,
    push_forward_radial,
)
from henon_morse.trials import normalized_trials
from henon_morse.verify import PROP31_ALPHAS, prop31_checks

from .conftest import TEST_SHOOTING, ProfileFactory


def test_eigenfunction_form_is_eigenvalue(henon_profile: ProfileFactory) -> None:
    cubic = Nonlinearity.henon(3)
    profile = henon_profile(0, 2)
    problem = ModeProblem.linearized(profile, cubic, 1)
    eigenvalues, functions = eigenpairs(problem, 2)
    for value, function in zip(eigenvalues, functions, strict=True):
        w = AngularFourierFunction((FourierTerm(1, Parity.SINE, function),))
        assert eval_Q(profile, 0.0, cubic, w) == pytest.approx(
            value * weighted_inner(w, None, 0.0), rel=1e-8
        )


def test_distinct_terms_are_orthogonal(henon_profile: ProfileFactory) -> None:
    profile = henon_profile(0, 2)
    (w,) = normalized_trials(3, 1, profile.grid)
    other = AngularFourierFunction(
        (FourierTerm(7, Parity.COSINE, w.terms[0].coefficient),)
    )
    assert eval_Q(profile, 0.0, Nonlinearity.henon(3), w, other=other) == 0.0


def test_zero_potential_gives_dirichlet_energy(henon_profile: ProfileFactory) -> None:
    profile = henon_profile(0, 2)
    (w,) = normalized_trials(3, 1, profile.grid)
    value = eval_Q(profile, 0.0, Nonlinearity.zero(), w, rule="simpson")
    assert value == pytest.approx(dirichlet_energy(w), rel=1e-12)
    assert value == pytest.approx(1.0, rel=1e-12)


def test_form_requires_matching_grids(henon_profile: ProfileFactory) -> None:
    profile = henon_profile(0, 2)
    (w,) = normalized_trials(3, 1, spectral_grid(Domain.ball(), 100))
    with pytest.raises(GridError, match="grid mismatch"):
        eval_Q(profile, 0.0, Nonlinearity.henon(3), w)


def test_nodal_regions_have_negative_forms(henon_profile: ProfileFactory) -> None:
    profile = henon_profile(0, 3)
    regions = nodal_regions(profile)
    assert len(regions) == 3
    assert regions[0].start == 0
    assert regions[-1].stop == profile.grid.size
    values = region_form_values(profile, Nonlinearity.henon(3))
    assert len(values) == 3
    assert all(value < 0 for value in values)


def test_restriction_keeps_one_sign(henon_profile: ProfileFactory) -> None:
    profile = henon_profile(0, 2)
    inner = restrict_to_nodal_region(profile, 0)
    outer = restrict_to_nodal_region(profile, 1)
    assert np.all(inner.values >= 0)
    assert np.all(outer.values <= 0)
    np.testing.assert_allclose(
        inner.values + outer.values, profile.values, atol=1e-8 * profile.sup_norm
    )
    with pytest.raises(GridError, match="does not exist"):
        restrict_to_nodal_region(profile, 2)


def test_gram_matrices_are_symmetric(henon_profile: ProfileFactory) -> None:
    profile = henon_profile(2, 2)
    directions = normalized_trials(8, 3, profile.grid)
    gram_q, gram_weight = gram_matrices(profile, Nonlinearity.henon(3), directions)
    np.testing.assert_array_equal(gram_q, gram_q.T)
    np.testing.assert_array_equal(gram_weight, gram_weight.T)
    assert np.all(np.linalg.eigvalsh(gram_weight) > 0)


@pytest.mark.parametrize("alpha", PROP31_ALPHAS)
def test_reduced_form_bounds_weighted_form(henon_profile: ProfileFactory, alpha: float) -> None:
    cubic = Nonlinearity.henon(3)
    profile = henon_profile(alpha, 2)
    v = reduced_profile(profile, kappa_for_alpha(alpha), 2000)
    for psi in normalized_trials(21, 5, v.grid):
        report = check_prop31(v, psi, alpha, cubic)
        assert report.passed, report
        assert not report.radial
    for radial in normalized_trials(22, 5, v.grid, radial=True):
        report = check_prop31(v, radial, alpha, cubic)
        assert report.radial
        assert report.passed, report
        assert report.relative_gap < 1e-12


@pytest.mark.parametrize("alpha", [1, 2])
def test_preimage_quadrature_matches_direct_form(
    henon_profile: ProfileFactory, alpha: float
) -> None:
    cubic = Nonlinearity.henon(3)
    kappa = kappa_for_alpha(alpha)
    v = reduced_profile(henon_profile(alpha, 2), kappa, 2000)
    u = push_forward_radial(v, kappa)
    (psi,) = normalized_trials(5, 1, v.grid)
    phi = push_forward_fourier(psi, SectorTransform(kappa, 1))
    on_preimage = eval_Q_on_preimage(u, alpha, cubic, phi, v.grid, kappa)
    assert on_preimage == pytest.approx(eval_Q(u, alpha, cubic, phi, rule="simpson"), rel=1e-5)
    with pytest.raises(GridError, match="differ in size"):
        eval_Q_on_preimage(u, alpha, cubic, phi, spectral_grid(Domain.ball(), 10), kappa)


@pytest.mark.parametrize("alpha", PROP31_ALPHAS)
def test_prop31_summary(alpha: float) -> None:
    summary = prop31_checks(alpha, count=10, radial_count=5, shooting=TEST_SHOOTING)
    assert summary.passed, summary
    assert summary.trials == 10
    assert summary.radial_trials == 5
    assert summary.failures == 0
    assert summary.min_gap >= -1e-10
    assert summary.max_radial_relative < 1e-8

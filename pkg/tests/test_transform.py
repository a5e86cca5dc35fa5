"""Tests for the T_κ and T_{κ,m} transforms and their identities."""

from __future__ import annotations

import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from henon_morse.errors import DomainError, GridError
from henon_morse.grid import spectral_grid
from henon_morse.models import (
    AngularFourierFunction,
    Domain,
    FourierTerm,
    Parity,
    RadialFunction,
)
from henon_morse.transform import (
    KappaTransform,
    SectorTransform,
    apply,
    jacobian_det,
    jacobian_fd_check,
    kappa_for_alpha,
    map_domain,
    pull_back_radial,
    push_forward_fourier,
    push_forward_radial,
    verify_composition_identity,
    verify_group_law,
    verify_h1_identities,
    verify_lr_identity,
    weight_exponent,
)
from henon_morse.trials import normalized_trials, random_points, random_polar_trials

kappas = st.floats(min_value=0.2, max_value=5.0, allow_nan=False)
points = st.tuples(
    st.floats(min_value=0.05, max_value=10.0), st.floats(min_value=0.0, max_value=2 * math.pi)
)


def _cartesian(polar: tuple[float, float]) -> np.ndarray:
    radius, angle = polar
    return np.array([radius * math.cos(angle), radius * math.sin(angle)])


def test_kappa_for_alpha() -> None:
    assert kappa_for_alpha(0) == 1.0
    assert kappa_for_alpha(2) == 0.5
    assert weight_exponent(0.5) == 2.0


@pytest.mark.parametrize(
    ("kappa", "point", "expected"),
    [
        (2.0, (1.0, math.pi / 3), (1.0, math.pi / 3)),
        (0.5, (4.0, math.pi / 3), (2.0, math.pi / 3)),
    ],
)
def test_apply_in_polar_form(
    kappa: float, point: tuple[float, float], expected: tuple[float, float]
) -> None:
    radius, angle = apply(KappaTransform(kappa), point)
    assert float(radius) == pytest.approx(expected[0], rel=1e-15)
    assert float(angle) == expected[1]


def test_apply_rejects_negative_radius() -> None:
    with pytest.raises(DomainError):
        apply(KappaTransform(2.0), (-1.0, 0.0))


def test_kappa_must_be_positive() -> None:
    with pytest.raises(DomainError, match="kappa must be positive"):
        KappaTransform(0.0)
    with pytest.raises(DomainError, match="m must be a positive integer"):
        SectorTransform(0.5, 0)


@given(kappa=kappas, polar=points)
@settings(max_examples=200, deadline=None)
def test_inverse_law(kappa: float, polar: tuple[float, float]) -> None:
    transform = KappaTransform(kappa)
    y = _cartesian(polar)
    np.testing.assert_allclose(
        transform.inverse().cartesian(transform.cartesian(y)), y, rtol=1e-10, atol=1e-12
    )


@given(outer=kappas, inner=kappas, polar=points)
@settings(max_examples=200, deadline=None)
def test_group_law(outer: float, inner: float, polar: tuple[float, float]) -> None:
    first, second = KappaTransform(outer), KappaTransform(inner)
    y = _cartesian(polar)
    np.testing.assert_allclose(
        first.cartesian(second.cartesian(y)),
        first.compose(second).cartesian(y),
        rtol=1e-10,
        atol=1e-12,
    )


@given(kappa=kappas, polar=points)
@settings(max_examples=100, deadline=None)
def test_jacobian_matrix_determinant(kappa: float, polar: tuple[float, float]) -> None:
    transform = KappaTransform(kappa)
    y = _cartesian(polar)
    assert float(np.linalg.det(transform.jacobian_matrix(y))) == pytest.approx(
        jacobian_det(transform, y), rel=1e-9
    )


def test_jacobian_values() -> None:
    assert jacobian_det(KappaTransform(1.0), (0.3, -0.7)) == pytest.approx(1.0)
    assert jacobian_det(KappaTransform(2.0), (0.6, 0.8)) == pytest.approx(2.0)
    with pytest.raises(DomainError, match="undefined"):
        jacobian_det(KappaTransform(2.0), (0.0, 0.0))


def test_jacobian_against_finite_differences() -> None:
    report = jacobian_fd_check(KappaTransform(0.5), [(3.0, 4.0)])
    assert report.passed
    assert report.rel_error < 1e-6


@pytest.mark.parametrize("kappa", [1 / 3, 1 / 2, 2.0, 3.0])
def test_jacobian_on_random_points(kappa: float) -> None:
    report = jacobian_fd_check(KappaTransform(kappa), random_points(7, 1000))
    assert report.passed, report


def test_group_law_report() -> None:
    cloud = random_points(3, 200)
    report = verify_group_law(KappaTransform(2.0), KappaTransform(0.5), cloud)
    assert report.passed
    assert report.details["kappa"] == 2.0


def test_map_domain() -> None:
    assert map_domain(Domain.ball(), 0.3) == Domain.ball()
    assert map_domain(Domain.annulus(1, 4), 0.5) == Domain.annulus(1, 16)
    assert map_domain(Domain.annulus(1, 16), 2.0) == Domain.annulus(1, 4)


def test_sector_transform_inverts() -> None:
    sector = SectorTransform(0.5, 2)
    r, theta = sector.apply(4.0, math.pi)
    assert (float(r), float(theta)) == (2.0, math.pi / 2)
    s, sigma = sector.invert(r, theta)
    assert (float(s), float(sigma)) == pytest.approx((4.0, math.pi))
    with pytest.raises(DomainError):
        sector.as_kappa()
    assert SectorTransform(0.5).as_kappa() == KappaTransform(0.5)


def test_pull_back_constant() -> None:
    grid = spectral_grid(Domain.ball(), 50)
    v = pull_back_radial(RadialFunction(grid, np.ones(grid.size)), 0.5)
    np.testing.assert_array_equal(v.values, 1.0)
    assert v.grid.domain == Domain.ball()


def test_pull_back_square() -> None:
    grid = spectral_grid(Domain.ball(), 50)
    u = RadialFunction(grid, grid.nodes**2, 2 * grid.nodes)
    v = pull_back_radial(u, 0.5)
    np.testing.assert_allclose(v.values, v.nodes, rtol=1e-12)
    np.testing.assert_allclose(v.derivatives, 1.0, rtol=1e-12)


def test_push_forward_inverts_pull_back() -> None:
    grid = spectral_grid(Domain.annulus(1, 4), 40)
    u = RadialFunction(grid, np.sin(grid.nodes), np.cos(grid.nodes))
    back = push_forward_radial(pull_back_radial(u, 0.5), 0.5)
    np.testing.assert_allclose(back.nodes, grid.nodes, rtol=1e-12)
    np.testing.assert_array_equal(back.values, u.values)
    np.testing.assert_allclose(back.derivatives, u.derivatives, rtol=1e-12)
    assert back.grid.domain == Domain.annulus(1, 4)


def test_push_forward_fourier_multiplies_modes() -> None:
    grid = spectral_grid(Domain.ball(), 60)
    b = RadialFunction(grid, grid.nodes * (1 - grid.nodes**2))
    psi = AngularFourierFunction((FourierTerm(1, Parity.COSINE, b),))
    phi = push_forward_fourier(psi, SectorTransform(0.5, 2))
    (term,) = phi.terms
    assert (term.mode, term.parity) == (2, Parity.COSINE)
    np.testing.assert_array_equal(term.coefficient.values, b.values)
    np.testing.assert_allclose(term.coefficient.nodes**2, grid.nodes, rtol=1e-12)


def test_push_forward_fourier_identity_and_radial() -> None:
    grid = spectral_grid(Domain.ball(), 60)
    b = RadialFunction(grid, 1 - grid.nodes**2)
    psi = AngularFourierFunction.radial(b)
    same = push_forward_fourier(psi, SectorTransform(1.0, 1))
    np.testing.assert_array_equal(same.grid.nodes, grid.nodes)
    assert push_forward_fourier(psi, SectorTransform(0.25, 3)).is_radial


def test_push_forward_fourier_checks_target() -> None:
    grid = spectral_grid(Domain.ball(2), 20)
    psi = AngularFourierFunction.radial(RadialFunction(grid, 4 - grid.nodes**2))
    with pytest.raises(GridError, match="does not cover"):
        push_forward_fourier(psi, SectorTransform(0.5, 1), domain=Domain.ball())


def _one(s: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    return np.ones(np.broadcast(s, sigma).shape)


def test_lr_identity_for_constant() -> None:
    report = verify_lr_identity(_one, Domain.ball(), 0.5, 1.0, points=1000)
    assert report.lhs == pytest.approx(math.pi, rel=1e-10)
    assert report.rhs == pytest.approx(math.pi, rel=1e-10)
    assert report.passed


def test_lr_identity_at_kappa_one() -> None:
    report = verify_lr_identity(_one, Domain.annulus(1, 2), 1.0, points=500)
    assert report.lhs == pytest.approx(3 * math.pi, rel=1e-10)
    assert report.passed


def test_lr_identity_rejects_small_exponent() -> None:
    with pytest.raises(DomainError):
        verify_lr_identity(_one, Domain.ball(), 0.5, 0.5)


def test_composition_identity_on_random_trial() -> None:
    kappa = kappa_for_alpha(3)
    (trial,) = random_polar_trials(11, 1, map_domain(Domain.ball(), kappa))
    report = verify_composition_identity(trial, Domain.ball(), kappa, np.sin, points=4000)
    assert report.passed, report
    assert abs(report.lhs) < 1e-12
    assert report.rel_error == pytest.approx(abs(report.lhs - report.rhs))


def test_h1_equality_for_radial_trial() -> None:
    grid = spectral_grid(Domain.ball(), 4000)
    (psi,) = normalized_trials(5, 1, grid, radial=True)
    report = verify_h1_identities(psi, 0.5)
    assert report.passed, report
    assert report.rel_error < 1e-8


def test_h1_sandwich_is_strict_for_nonradial_trial() -> None:
    grid = spectral_grid(Domain.ball(), 4000)
    (psi,) = normalized_trials(5, 1, grid)
    report = verify_h1_identities(psi, 1 / 3)
    assert report.passed, report
    assert report.details["strict"]


def test_h1_identity_at_kappa_one() -> None:
    grid = spectral_grid(Domain.ball(), 1000)
    (psi,) = normalized_trials(9, 1, grid)
    report = verify_h1_identities(psi, 1.0)
    assert report.lhs == pytest.approx(report.rhs, rel=1e-12)

"""Tests for the mode operator, Sturm counts and Morse index assembly."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.special import jn_zeros

from henon_morse.errors import DiscretizationAlarm, GridError, SolverError, UsageError
from henon_morse.grid import spectral_grid
from henon_morse.models import Domain, RadialGrid, RadialProfile
from henon_morse.nonlinearity import Nonlinearity
from henon_morse.radial import shoot_nodal_solution
from henon_morse.spectral import (
    ModeProblem,
    SpectralOptions,
    assemble_mode_operator,
    assemble_morse_report,
    collect_mode_spectra,
    discrete_form,
    discrete_mass,
    eigenpairs,
    is_positive_even,
    lowest_eigenvalues,
    mode_spectrum,
    morse_index,
    negative_count,
    radial_nondegeneracy,
    reduced_problem,
    solve_modes,
    sturm_count,
    theoretical_bound,
    transport_radial_eigenpair,
)
from henon_morse.transform import kappa_for_alpha

from .conftest import ProfileFactory


def _constant_problem(value: float, cells: int = 2000, *, mode: int = 0) -> ModeProblem:
    grid = spectral_grid(Domain.ball(), cells)
    return ModeProblem(mode=mode, grid=grid, potential=np.full(grid.size, value))


@pytest.mark.parametrize("mode", [0, 1, 2])
def test_zero_potential_matches_bessel_zeros(mode: int) -> None:
    exact = float(jn_zeros(mode, 1)[0]) ** 2
    spectrum = mode_spectrum(_constant_problem(0.0, 4000, mode=mode), 1)
    assert spectrum.lowest == pytest.approx(exact, rel=5e-4)
    assert spectrum.negative_count == 0


def test_constant_potential_counts() -> None:
    assert negative_count(assemble_mode_operator(_constant_problem(0.0))) == 0
    assert negative_count(assemble_mode_operator(_constant_problem(10.0))) == 1


def test_sturm_count_against_dense_spectrum() -> None:
    rng = np.random.default_rng(4)
    grid = spectral_grid(Domain.annulus(0.5, 2.0), 40)
    problem = ModeProblem(mode=2, grid=grid, potential=rng.uniform(0, 80, grid.size))
    system = assemble_mode_operator(problem)
    dense = np.linalg.eigvalsh(system.dense())
    for shift in (-50.0, -1.0, 0.0, 3.5, 40.0, 500.0):
        assert sturm_count(system, shift) == int(np.count_nonzero(dense < shift))
    np.testing.assert_allclose(lowest_eigenvalues(system, 5), dense[:5], rtol=1e-8, atol=1e-7)


def test_matvec_matches_dense() -> None:
    system = assemble_mode_operator(_constant_problem(3.0, 30, mode=1))
    vector = np.linspace(-1, 1, system.size)
    np.testing.assert_allclose(
        system.matvec(vector), system.dense() @ vector, rtol=1e-12, atol=1e-9
    )


def test_nonuniform_grid_is_rejected() -> None:
    grid = RadialGrid(np.array([0.1, 0.2, 0.5, 1.0]), Domain.ball())
    problem = ModeProblem(mode=0, grid=grid, potential=np.zeros(4))
    with pytest.raises(GridError, match="non-uniform"):
        assemble_mode_operator(problem)


def test_problem_validation() -> None:
    grid = spectral_grid(Domain.ball(), 10)
    with pytest.raises(UsageError):
        ModeProblem(mode=-1, grid=grid, potential=np.zeros(grid.size))
    with pytest.raises(GridError, match="length mismatch"):
        ModeProblem(mode=0, grid=grid, potential=np.zeros(3))
    with pytest.raises(UsageError):
        lowest_eigenvalues(assemble_mode_operator(_constant_problem(0.0, 10)), 0)


@pytest.mark.parametrize("mode", [0, 1, 3])
def test_weighting_preserves_negative_counts(henon_profile: ProfileFactory, mode: int) -> None:
    cubic = Nonlinearity.henon(3)
    profile = henon_profile(2, 2)
    plain = mode_spectrum(ModeProblem.linearized(profile, cubic, mode))
    weighted = mode_spectrum(ModeProblem.linearized(profile, cubic, mode, weighted=True))
    assert plain.negative_count == weighted.negative_count
    assert weighted.weighted


@pytest.mark.parametrize("domain", [Domain.ball(), Domain.annulus(1, 2)])
def test_eigenpairs_are_normalized(domain: Domain) -> None:
    grid = spectral_grid(domain, 400)
    problem = ModeProblem(mode=1, grid=grid, potential=np.full(grid.size, 5.0))
    eigenvalues, functions = eigenpairs(problem, 3)
    for value, function in zip(eigenvalues, functions, strict=True):
        assert discrete_mass(problem, function.values) == pytest.approx(1.0, rel=1e-10)
        assert discrete_form(problem, function.values) == pytest.approx(value, rel=1e-8)
        assert function.vanishes_on_boundary()
    assert discrete_mass(problem, functions[0].values, functions[1].values) == pytest.approx(
        0.0, abs=1e-10
    )
    assert functions[0].values[np.argmax(np.abs(functions[0].values))] > 0


def test_degenerate_eigenvalue_is_not_negative() -> None:
    lowest = mode_spectrum(_constant_problem(0.0, 500), 1).lowest
    spectrum = mode_spectrum(_constant_problem(lowest, 500), 3)
    assert spectrum.degenerate_count == 1
    assert spectrum.negative_count == 0
    assert abs(spectrum.lowest) < 1e-8


@pytest.mark.parametrize(
    ("alpha", "nodal", "superlinear", "expected"),
    [
        (0, 1, True, 1),
        (0, 1, False, 0),
        (0, 2, False, 3),
        (0, 2, True, 4),
        (0, 3, True, 5),
        (1, 2, True, 4),
        (3, 3, True, 5),
        (2, 2, False, 5),
        (2, 2, True, 6),
        (4, 3, True, 9),
    ],
)
def test_theoretical_bound(alpha: float, nodal: int, superlinear: bool, expected: int) -> None:
    assert theoretical_bound(alpha, nodal, superlinear=superlinear) == expected


@pytest.mark.parametrize(
    ("alpha", "expected"), [(2, True), (4.0, True), (0, False), (3, False), (2.5, False)]
)
def test_is_positive_even(alpha: float, expected: bool) -> None:
    assert is_positive_even(alpha) is expected


def test_collection_stops_at_first_nonnegative_mode() -> None:
    options = SpectralOptions(threads=2)
    spectra = collect_mode_spectra(_constant_problem(100.0), q=4, options=options)
    assert [spectrum.mode for spectrum in spectra] == list(range(8))
    assert spectra[0].negative_count == 3
    assert spectra[-1].negative_count == 0
    assert all(spectrum.negative_count > 0 for spectrum in spectra[:-1])


def test_collection_raises_when_modes_run_out() -> None:
    options = SpectralOptions(max_modes=3, threads=1)
    with pytest.raises(DiscretizationAlarm, match="refine"):
        collect_mode_spectra(_constant_problem(100.0), q=4, options=options)


def test_solve_modes_keeps_order() -> None:
    spectra = solve_modes(_constant_problem(0.0, 200), [3, 0, 1], q=2)
    assert [spectrum.mode for spectrum in spectra] == [3, 0, 1]
    assert spectra[1].lowest < spectra[2].lowest < spectra[0].lowest


def test_report_assembly() -> None:
    spectra = solve_modes(_constant_problem(100.0), range(8), q=4)
    report = assemble_morse_report(spectra, alpha=0.0, nodal_sets=2, superlinear=True)
    assert report.radial_negative_count == 3
    assert report.total_index == 3 + 2 * sum(s.negative_count for s in spectra[1:])
    assert report.k_max == 7
    assert report.monotone
    assert report.passed
    with pytest.raises(UsageError, match="k = 0"):
        assemble_morse_report(spectra[1:], alpha=0.0, nodal_sets=2, superlinear=True)


def test_morse_index_of_nodal_solution(henon_profile: ProfileFactory) -> None:
    profile = henon_profile(0, 2)
    report = morse_index(profile, Nonlinearity.henon(3), SpectralOptions(threads=2))
    assert report.radial_negative_count == 2
    assert report.theoretical_bound == 4
    assert report.passed
    assert report.per_mode[-1].negative_count == 0
    assert report.total_index == 2 + 2 * sum(
        spectrum.negative_count for spectrum in report.per_mode[1:]
    )


def test_morse_index_needs_verified_profile(henon_profile: ProfileFactory) -> None:
    solved = henon_profile(0, 1)
    unverified = RadialProfile(
        solved.grid, solved.values, solved.derivatives, alpha=0.0, nodal_sets=1
    )
    with pytest.raises(SolverError, match="residual"):
        morse_index(unverified, Nonlinearity.henon(3))


def test_radial_nondegeneracy(henon_profile: ProfileFactory) -> None:
    report = radial_nondegeneracy(henon_profile(0, 2), Nonlinearity.henon(3))
    assert report.passed
    assert not report.degenerate
    assert report.margin > report.threshold


def test_transport_at_alpha_zero_is_identity(henon_profile: ProfileFactory) -> None:
    cubic = Nonlinearity.henon(3)
    profile = henon_profile(0, 2)
    eigenvalues, functions = eigenpairs(reduced_problem(profile, cubic, 0), 1)
    moved = transport_radial_eigenpair(eigenvalues[0], functions[0], 0.0)
    assert moved.eigenvalue == eigenvalues[0]
    np.testing.assert_array_equal(moved.eigenfunction.values, functions[0].values)
    assert math.isnan(moved.residual)


def test_transport_to_weighted_problem() -> None:
    cubic = Nonlinearity.henon(3)
    profile = shoot_nodal_solution(cubic, 2.0, Domain.ball(), 2)
    eigenvalues, functions = eigenpairs(reduced_problem(profile, cubic, 0), 1)
    weighted = ModeProblem.linearized(profile, cubic, 0, weighted=True)
    moved = transport_radial_eigenpair(eigenvalues[0], functions[0], 2.0, problem=weighted)
    assert moved.eigenvalue == pytest.approx(eigenvalues[0] / kappa_for_alpha(2) ** 2)
    assert moved.residual < 1e-5
    assert mode_spectrum(weighted).lowest == pytest.approx(moved.eigenvalue, rel=1e-3)
    with pytest.raises(UsageError):
        transport_radial_eigenpair(
            eigenvalues[0], functions[0], 2.0, problem=ModeProblem.linearized(profile, cubic, 0)
        )

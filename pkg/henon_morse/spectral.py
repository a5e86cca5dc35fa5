"""Angular-mode spectra of the linearized operator and Morse index assembly.

Each angular mode k reduces -Δφ - r^α f′(u) φ = λ w φ to a radial
Sturm-Liouville problem. The radial problem is discretized by finite volumes on
the midpoint-offset grid from :func:`henon_morse.grid.spectral_grid`: cell
faces sit halfway between nodes and, on a disk, the first face is r = 0 where
the flux r·a′ vanishes. The substitution b = √(h r w)·a makes the
discrete generalized problem a symmetric tridiagonal one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from itertools import pairwise
import logging
import math
from typing import TYPE_CHECKING

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal

from .concurrency import resolve_threads, run_calls
from .const import (
    DEFAULT_EIGEN_TOLERANCE,
    DEFAULT_MIN_EIGENVALUES,
    DEFAULT_RESIDUAL_TOLERANCE,
    NONDEGENERACY_FACTOR,
)
from .errors import DiscretizationAlarm, GridError, SolverError, UsageError
from .grid import radial_spline, resample, spectral_grid
from .models import RadialFunction, RadialGrid
from .transform import kappa_for_alpha, pull_back_radial, push_forward_radial

if TYPE_CHECKING:
    from collections.abc import Iterable

    from numpy.typing import ArrayLike

    from .models import FloatArray, RadialProfile
    from .nonlinearity import Nonlinearity

_LOGGER = logging.getLogger(__name__)

_DEFAULT_MAX_MODES = 64
_SIGN_FLOOR = 1e-8


@dataclass(frozen=True, slots=True, eq=False, kw_only=True)
class ModeProblem:
    """Radial problem -a″ - a′/r + (k²/r²)a - V a = λ w a for one angular mode."""

    mode: int
    grid: RadialGrid
    potential: FloatArray
    weighted: bool = False
    weight_exponent: float = 0.0

    def __post_init__(self) -> None:
        """Validate the mode and the potential samples."""
        if self.mode < 0:
            msg = f"angular mode must be ≥ 0, got {self.mode}"
            raise UsageError(msg)
        potential = np.array(self.potential, dtype=np.float64)
        if potential.shape != self.grid.nodes.shape:
            msg = (
                f"grid/value length mismatch: potential has {potential.size} values"
                f" on {self.grid.size} nodes"
            )
            raise GridError(msg)
        potential.setflags(write=False)
        object.__setattr__(self, "potential", potential)

    @classmethod
    def linearized(
        cls,
        profile: RadialProfile,
        nonlinearity: Nonlinearity,
        mode: int,
        *,
        weighted: bool = False,
    ) -> ModeProblem:
        """Return the problem with V = r^α f′(u) about a radial profile."""
        return cls(
            mode=mode,
            grid=profile.grid,
            potential=linearized_potential(profile, nonlinearity),
            weighted=weighted,
            weight_exponent=profile.alpha,
        )

    def with_mode(self, mode: int) -> ModeProblem:
        """Return the same problem for another angular mode."""
        return ModeProblem(
            mode=mode,
            grid=self.grid,
            potential=self.potential,
            weighted=self.weighted,
            weight_exponent=self.weight_exponent,
        )

    @property
    def interior(self) -> slice:
        """Return the slice of grid nodes that carry unknowns."""
        return slice(0, -1) if self.grid.domain.is_ball() else slice(1, -1)

    def weight(self, nodes: FloatArray) -> FloatArray:
        """Return w(r): r^α for the weighted problem, 1 otherwise."""
        if self.weighted:
            return nodes**self.weight_exponent
        return np.ones_like(nodes)


@dataclass(frozen=True, slots=True, eq=False)
class TridiagonalSystem:
    """Symmetric tridiagonal matrix acting on b = scale·a at the interior nodes."""

    diagonal: FloatArray
    off_diagonal: FloatArray
    nodes: FloatArray
    scale: FloatArray
    mode: int
    weighted: bool

    @property
    def size(self) -> int:
        """Return the matrix dimension."""
        return int(self.diagonal.size)

    def matvec(self, vector: ArrayLike) -> FloatArray:
        """Return A·b."""
        b = np.asarray(vector, dtype=np.float64)
        result = self.diagonal * b
        result[:-1] += self.off_diagonal * b[1:]
        result[1:] += self.off_diagonal * b[:-1]
        return result

    def rayleigh_quotient(self, vector: ArrayLike) -> float:
        """Return bᵀAb / bᵀb."""
        b = np.asarray(vector, dtype=np.float64)
        return float(b @ self.matvec(b) / (b @ b))

    def dense(self) -> FloatArray:
        """Return the full matrix, for small systems and tests."""
        return (
            np.diag(self.diagonal)
            + np.diag(self.off_diagonal, 1)
            + np.diag(self.off_diagonal, -1)
        )


def linearized_potential(profile: RadialFunction, nonlinearity: Nonlinearity) -> FloatArray:
    """Return V(r) = r^α f′(u(r)) on the profile grid."""
    alpha = getattr(profile, "alpha", 0.0)
    return profile.nodes**alpha * nonlinearity.fprime(profile.values)


def _require_uniform(grid: RadialGrid) -> float:
    if not grid.is_uniform:
        msg = "the mode operator needs a uniform grid; non-uniform grid rejected"
        raise GridError(msg)
    return grid.spacing


def _faces(problem: ModeProblem, h: float) -> tuple[FloatArray, FloatArray]:
    """Return the left and right face radii of every interior cell."""
    nodes = problem.grid.nodes[problem.interior]
    left = nodes - h / 2
    right = nodes + h / 2
    if problem.grid.domain.is_ball():
        left[0] = 0.0
    return left, right


def assemble_mode_operator(problem: ModeProblem) -> TridiagonalSystem:
    """Return the symmetric tridiagonal matrix of one mode problem.

    With faces f and weights w,
    A_jj = [(f_{j+½} + f_{j-½})/(h² r_j) + k²/r_j² - V_j]/w_j and
    A_{j,j+1} = -f_{j+½}/(h² √(r_j w_j r_{j+1} w_{j+1})).
    """
    h = _require_uniform(problem.grid)
    nodes = problem.grid.nodes[problem.interior]
    if nodes.size < 2:
        msg = f"a mode operator needs at least two unknowns, got {nodes.size}"
        raise GridError(msg)
    potential = problem.potential[problem.interior]
    weight = problem.weight(nodes)
    left, right = _faces(problem, h)
    k2 = float(problem.mode) ** 2
    diagonal = ((left + right) / (h * h * nodes) + k2 / nodes**2 - potential) / weight
    mass = nodes * weight
    off_diagonal = -right[:-1] / (h * h * np.sqrt(mass[:-1] * mass[1:]))
    return TridiagonalSystem(
        diagonal=diagonal,
        off_diagonal=off_diagonal,
        nodes=nodes,
        scale=np.sqrt(h * mass),
        mode=problem.mode,
        weighted=problem.weighted,
    )


def discrete_form(
    problem: ModeProblem,
    values: ArrayLike,
    other: ArrayLike | None = None,
) -> float:
    """Return the radial stiffness form aᵀKã of the discretization on full-grid values.

    Σ_faces r_f Δa Δã / h + Σ_j h r_j (k²/r_j² - V_j) a_j ã_j, the form whose
    matrix :func:`assemble_mode_operator` symmetrizes.
    """
    h = _require_uniform(problem.grid)
    a = np.asarray(values, dtype=np.float64)
    b = a if other is None else np.asarray(other, dtype=np.float64)
    nodes = problem.grid.nodes
    faces = (nodes[:-1] + nodes[1:]) / 2
    gradient = float(np.sum(faces * np.diff(a) * np.diff(b)) / h)
    interior = problem.interior
    inner = nodes[interior]
    zeroth = (float(problem.mode) ** 2 / inner**2 - problem.potential[interior]) * inner
    return gradient + h * float(np.sum(zeroth * a[interior] * b[interior]))


def discrete_mass(
    problem: ModeProblem,
    values: ArrayLike,
    other: ArrayLike | None = None,
) -> float:
    """Return Σ_j h r_j w_j a_j ã_j over the interior nodes."""
    h = _require_uniform(problem.grid)
    a = np.asarray(values, dtype=np.float64)
    b = a if other is None else np.asarray(other, dtype=np.float64)
    interior = problem.interior
    nodes = problem.grid.nodes[interior]
    return h * float(np.sum(nodes * problem.weight(nodes) * a[interior] * b[interior]))


def sturm_count(system: TridiagonalSystem, shift: float) -> int:
    """Return the number of eigenvalues strictly below ``shift``.

    Counts the negative pivots of the LDLᵀ factorization of A - shift·I.
    Pivots smaller than ``pivmin`` are replaced by -pivmin, as LAPACK's
    bisection does.
    """
    diagonal = (system.diagonal - shift).tolist()
    squares = (system.off_diagonal**2).tolist()
    pivmin = np.finfo(np.float64).tiny * max(1.0, max(squares, default=0.0))
    pivot = diagonal[0]
    if abs(pivot) < pivmin:
        pivot = -pivmin
    count = int(pivot < 0)
    for value, square in zip(diagonal[1:], squares, strict=True):
        pivot = value - square / pivot
        if abs(pivot) < pivmin:
            pivot = -pivmin
        if pivot < 0:
            count += 1
    return count


def negative_count(system: TridiagonalSystem, tolerance: float = 0.0) -> int:
    """Return the number of eigenvalues below -tolerance."""
    return sturm_count(system, -tolerance)


def lowest_eigenvalues(
    system: TridiagonalSystem, q: int, tolerance: float = DEFAULT_EIGEN_TOLERANCE
) -> FloatArray:
    """Return the q smallest eigenvalues by Sturm bisection, each to ``tolerance``."""
    if q < 1:
        msg = f"at least one eigenvalue must be requested, got {q}"
        raise UsageError(msg)
    q = min(q, system.size)
    return eigvalsh_tridiagonal(
        system.diagonal,
        system.off_diagonal,
        select="i",
        select_range=(0, q - 1),
        lapack_driver="stebz",
        tol=tolerance,
    )


def eigenpairs(
    problem: ModeProblem, q: int, *, system: TridiagonalSystem | None = None
) -> tuple[FloatArray, list[RadialFunction]]:
    """Return the q lowest eigenvalues and eigenfunctions a(r) on the full grid.

    Eigenfunctions vanish at the Dirichlet nodes, satisfy Σ h r w a² = 1 and
    are signed so that their first significant sample is positive.
    """
    system = system or assemble_mode_operator(problem)
    q = min(q, system.size)
    eigenvalues, vectors = eigh_tridiagonal(
        system.diagonal,
        system.off_diagonal,
        select="i",
        select_range=(0, q - 1),
    )
    functions = []
    for column in vectors.T:
        interior_values = column / system.scale
        floor = _SIGN_FLOOR * float(np.max(np.abs(interior_values)))
        first = interior_values[np.flatnonzero(np.abs(interior_values) > floor)[0]]
        values = np.zeros(problem.grid.size)
        values[problem.interior] = math.copysign(1.0, first) * interior_values
        functions.append(RadialFunction(problem.grid, values))
    return eigenvalues, functions


@dataclass(frozen=True, slots=True, kw_only=True)
class ModeSpectrum:
    """Lowest eigenvalues of one mode and its negative and near-zero counts."""

    mode: int = field(metadata={"key": "k"})
    eigenvalues: tuple[float, ...]
    negative_count: int
    degenerate_count: int
    size: int
    weighted: bool

    @property
    def lowest(self) -> float:
        """Return μ₁, the smallest eigenvalue."""
        return self.eigenvalues[0]


def mode_spectrum(
    problem: ModeProblem,
    q: int = DEFAULT_MIN_EIGENVALUES,
    tolerance: float = DEFAULT_EIGEN_TOLERANCE,
) -> ModeSpectrum:
    """Solve one mode problem.

    Eigenvalues in [-tolerance, tolerance] are degenerate and do not count as
    negative. The returned list always covers every negative eigenvalue.
    """
    system = assemble_mode_operator(problem)
    negative = sturm_count(system, -tolerance)
    degenerate = sturm_count(system, tolerance) - negative
    if degenerate:
        _LOGGER.warning(
            "Mode %s has %s eigenvalue(s) within ±%s of 0; counted as non-negative",
            problem.mode,
            degenerate,
            tolerance,
        )
    count = max(q, negative + degenerate + 1)
    eigenvalues = lowest_eigenvalues(system, count, tolerance)
    _LOGGER.debug(
        "Mode %s (%s): %s negative, lowest %.12g",
        problem.mode,
        "weighted" if problem.weighted else "unweighted",
        negative,
        eigenvalues[0],
    )
    return ModeSpectrum(
        mode=problem.mode,
        eigenvalues=tuple(float(value) for value in eigenvalues),
        negative_count=negative,
        degenerate_count=degenerate,
        size=system.size,
        weighted=problem.weighted,
    )


@dataclass(frozen=True, slots=True, kw_only=True)
class SpectralOptions:
    """Controls for mode solves and Morse index assembly."""

    eigen_tolerance: float = DEFAULT_EIGEN_TOLERANCE
    min_eigenvalues: int = DEFAULT_MIN_EIGENVALUES
    max_modes: int = _DEFAULT_MAX_MODES
    weighted: bool = False
    threads: int | None = None
    residual_tolerance: float = DEFAULT_RESIDUAL_TOLERANCE

    def __post_init__(self) -> None:
        """Validate the controls."""
        if not self.eigen_tolerance > 0:
            msg = f"eigen_tolerance must be positive, got {self.eigen_tolerance!r}"
            raise UsageError(msg)
        if self.min_eigenvalues < 1 or self.max_modes < 1:
            msg = "min_eigenvalues and max_modes must be ≥ 1"
            raise UsageError(msg)


DEFAULT_SPECTRAL = SpectralOptions()


def theoretical_bound(alpha: float, nodal_sets: int, *, superlinear: bool) -> int:
    """Return the proved lower bound on the Morse index of a radial solution.

    Nodal solutions get 3, raised to n + 2 when f is superlinear. A positive
    even α raises it to α + 3, or α + n + 2 with superlinearity. A positive
    solution gets 1 when f is superlinear.
    """
    if nodal_sets < 2:
        return 1 if superlinear else 0
    bound = 3
    if superlinear:
        bound = max(bound, nodal_sets + 2)
    if is_positive_even(alpha):
        bound = max(bound, int(alpha) + 3)
        if superlinear:
            bound = max(bound, int(alpha) + nodal_sets + 2)
    return bound


def is_positive_even(alpha: float) -> bool:
    """Return True for α ∈ {2, 4, 6, ...}."""
    return alpha > 0 and float(alpha).is_integer() and int(alpha) % 2 == 0


@dataclass(frozen=True, slots=True, kw_only=True)
class MorseReport:
    """Per-mode negative counts and the assembled Morse index."""

    per_mode: tuple[ModeSpectrum, ...]
    radial_negative_count: int = field(metadata={"key": "radial_count"})
    total_index: int = field(metadata={"key": "total"})
    k_max: int
    theoretical_bound: int = field(metadata={"key": "bound"})
    verdict: str
    degenerate_flags: tuple[int, ...]
    monotone: bool
    weighted: bool
    alpha: float
    nodal_sets: int

    @property
    def passed(self) -> bool:
        """Return True when the index meets the bound."""
        return self.verdict == "pass"


def assemble_morse_report(
    spectra: list[ModeSpectrum] | tuple[ModeSpectrum, ...],
    *,
    alpha: float,
    nodal_sets: int,
    superlinear: bool,
) -> MorseReport:
    """Reduce ordered mode spectra, ending at the first zero count, to a report."""
    if not spectra or spectra[0].mode != 0:
        msg = "mode spectra must start at k = 0"
        raise UsageError(msg)
    radial = spectra[0].negative_count
    total = radial + 2 * sum(spectrum.negative_count for spectrum in spectra[1:])
    lows = [spectrum.lowest for spectrum in spectra]
    monotone = all(later > earlier for earlier, later in pairwise(lows))
    if not monotone:
        _LOGGER.warning("Lowest eigenvalues are not increasing in k: %s", lows)
    bound = theoretical_bound(alpha, nodal_sets, superlinear=superlinear)
    return MorseReport(
        per_mode=tuple(spectra),
        radial_negative_count=radial,
        total_index=total,
        k_max=spectra[-1].mode,
        theoretical_bound=bound,
        verdict="pass" if total >= bound else "fail",
        degenerate_flags=tuple(s.mode for s in spectra if s.degenerate_count),
        monotone=monotone,
        weighted=spectra[0].weighted,
        alpha=alpha,
        nodal_sets=nodal_sets,
    )


def solve_modes(
    base: ModeProblem,
    modes: Iterable[int],
    *,
    q: int,
    options: SpectralOptions = DEFAULT_SPECTRAL,
) -> list[ModeSpectrum]:
    """Solve the given modes concurrently and return their spectra in order."""
    modes = list(modes)
    calls = [partial(mode_spectrum, base.with_mode(k), q, options.eigen_tolerance) for k in modes]
    results = run_calls(
        calls, resolve_threads(options.threads), labels=[f"mode {k}" for k in modes]
    )
    spectra = []
    for k, result in zip(modes, results, strict=True):
        if isinstance(result, BaseException):
            msg = f"mode {k} solve failed: {result}"
            raise SolverError(msg) from result
        spectra.append(result)
    return spectra


def collect_mode_spectra(
    base: ModeProblem,
    *,
    q: int,
    options: SpectralOptions = DEFAULT_SPECTRAL,
) -> list[ModeSpectrum]:
    """Solve k = 0, 1, ... in concurrent batches until a mode has no negative eigenvalue."""
    threads = resolve_threads(options.threads)
    spectra: list[ModeSpectrum] = []
    mode = 0
    while mode < options.max_modes:
        batch = range(mode, min(mode + threads, options.max_modes))
        for result in solve_modes(base, batch, q=q, options=options):
            spectra.append(result)
            if result.negative_count == 0:
                return spectra
        mode = batch.stop
    msg = f"every mode up to k = {options.max_modes - 1} has negative eigenvalues; refine"
    raise DiscretizationAlarm(msg)


def morse_index(
    profile: RadialProfile,
    nonlinearity: Nonlinearity,
    options: SpectralOptions = DEFAULT_SPECTRAL,
) -> MorseReport:
    """Count negative eigenvalues per mode and assemble the Morse index.

    The index is c₀ + 2·Σ_{k≥1} c_k since cos kθ and sin kθ share mode k.
    """
    if not profile.is_verified:
        msg = (
            f"profile residual {profile.residual!r} exceeds tolerance"
            f" {profile.residual_tolerance!r}"
        )
        raise SolverError(msg)
    q = max(profile.nodal_sets + 2, options.min_eigenvalues)
    base = ModeProblem.linearized(profile, nonlinearity, 0, weighted=options.weighted)
    spectra = collect_mode_spectra(base, q=q, options=options)
    report = assemble_morse_report(
        spectra,
        alpha=profile.alpha,
        nodal_sets=profile.nodal_sets,
        superlinear=nonlinearity.superlinear,
    )
    _LOGGER.debug(
        "Morse index %s (radial %s, k_max %s, bound %s): %s",
        report.total_index,
        report.radial_negative_count,
        report.k_max,
        report.theoretical_bound,
        report.verdict,
    )
    return report


@dataclass(frozen=True, slots=True, kw_only=True)
class NondegeneracyReport:
    """Distance of the radial spectrum from zero."""

    margin: float
    threshold: float
    passed: bool = field(metadata={"key": "pass"})
    degenerate: bool
    weighted: bool
    eigenvalues: tuple[float, ...]


def nondegeneracy_margin(
    problem: ModeProblem,
    q: int = DEFAULT_MIN_EIGENVALUES,
    tolerance: float = DEFAULT_EIGEN_TOLERANCE,
) -> NondegeneracyReport:
    """Return min |λ| over the q lowest eigenvalues of a mode problem."""
    spectrum = mode_spectrum(problem, q, tolerance)
    margin = float(np.min(np.abs(spectrum.eigenvalues)))
    threshold = NONDEGENERACY_FACTOR * tolerance
    return NondegeneracyReport(
        margin=margin,
        threshold=threshold,
        passed=margin > threshold,
        degenerate=spectrum.degenerate_count > 0,
        weighted=problem.weighted,
        eigenvalues=spectrum.eigenvalues,
    )


def radial_nondegeneracy(
    profile: RadialProfile,
    nonlinearity: Nonlinearity,
    options: SpectralOptions = DEFAULT_SPECTRAL,
    *,
    weighted: bool = True,
) -> NondegeneracyReport:
    """Check that the mode-0 linearization about ``profile`` has no zero eigenvalue."""
    problem = ModeProblem.linearized(profile, nonlinearity, 0, weighted=weighted)
    q = max(profile.nodal_sets + 2, options.min_eigenvalues)
    report = nondegeneracy_margin(problem, q, options.eigen_tolerance)
    _LOGGER.debug("Radial margin %.6g (threshold %.3g)", report.margin, report.threshold)
    return report


def reduced_profile(profile: RadialFunction, kappa: float, cells: int) -> RadialFunction:
    """Return v(s) = u(s^κ) resampled onto the spectral grid of Ω_κ."""
    mapped = pull_back_radial(profile, kappa)
    return resample(mapped, spectral_grid(mapped.grid.domain, cells))


def reduced_problem(
    profile: RadialProfile,
    nonlinearity: Nonlinearity,
    mode: int,
    *,
    cells: int | None = None,
) -> ModeProblem:
    """Return the unweighted mode problem with V = κ² f′(v) on Ω_κ."""
    kappa = kappa_for_alpha(profile.alpha)
    reduced = reduced_profile(profile, kappa, cells or profile.grid.size - 1)
    return ModeProblem(
        mode=mode,
        grid=reduced.grid,
        potential=kappa**2 * nonlinearity.fprime(reduced.values),
    )


@dataclass(frozen=True, slots=True, kw_only=True)
class TransportedEigenpair:
    """A reduced eigenpair carried to the weighted problem on Ω."""

    eigenvalue: float
    eigenfunction: RadialFunction
    rayleigh_quotient: float
    residual: float


def transport_radial_eigenpair(
    eigenvalue: float,
    eigenfunction: RadialFunction,
    alpha: float,
    *,
    problem: ModeProblem | None = None,
) -> TransportedEigenpair:
    """Carry (λ, ψ) of the reduced problem to (λ/κ², ψ(r^(1/κ))).

    With a weighted mode-0 ``problem`` on Ω the function is sampled on its
    grid and plugged into the discrete weighted equation. With y the
    symmetrized samples, the residual is ‖Ay - Λy‖/(max(1, |Λ|)‖y‖). Without
    a problem, φ lives on the mapped grid and no residual is computed.
    """
    kappa = kappa_for_alpha(alpha)
    transported = eigenvalue / kappa**2
    if problem is None:
        function = push_forward_radial(eigenfunction, kappa)
        return TransportedEigenpair(
            eigenvalue=transported,
            eigenfunction=function,
            rayleigh_quotient=math.nan,
            residual=math.nan,
        )
    if problem.mode != 0 or not problem.weighted:
        msg = "radial eigenpairs transport to the weighted mode-0 problem"
        raise UsageError(msg)
    nodes = problem.grid.nodes
    reduced_nodes = nodes ** (1 / kappa)
    spline = radial_spline(eigenfunction, reflect=1)
    values = spline(reduced_nodes)
    slopes = spline(reduced_nodes, 1) * reduced_nodes / (kappa * nodes)
    values[problem.grid.dirichlet_mask] = 0.0
    function = RadialFunction(problem.grid, values, slopes)
    system = assemble_mode_operator(problem)
    vector = system.scale * values[problem.interior]
    quotient = system.rayleigh_quotient(vector)
    defect = system.matvec(vector) - transported * vector
    residual = float(
        np.linalg.norm(defect) / (max(1.0, abs(transported)) * np.linalg.norm(vector))
    )
    _LOGGER.debug("Transported eigenvalue %.12g, Rayleigh quotient %.12g", transported, quotient)
    return TransportedEigenpair(
        eigenvalue=transported,
        eigenfunction=function,
        rayleigh_quotient=quotient,
        residual=residual,
    )

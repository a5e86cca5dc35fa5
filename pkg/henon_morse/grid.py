"""Radial grids, quadrature and resampling."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Literal

import numpy as np
from scipy.integrate import simpson, trapezoid
from scipy.interpolate import CubicSpline

from .errors import GridError
from .models import Domain, RadialFunction, RadialGrid

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from .models import FloatArray

type QuadratureRule = Literal["trapezoid", "simpson"]

_MAX_CAP_EXPONENT = 50.0


def make_grid(domain: Domain, points: int, origin_offset: float = 0.0) -> RadialGrid:
    """Return a uniform grid on [max(inner, offset), outer]."""
    if points < 2:
        msg = f"a radial grid needs at least 2 points, got {points}"
        raise GridError(msg)
    outer = domain.outer_radius
    if domain.is_ball():
        if not 0 < origin_offset < outer / points:
            msg = (
                f"origin offset must lie in (0, {outer / points!r}) for {points} points,"
                f" got {origin_offset!r}"
            )
            raise GridError(msg)
        start = origin_offset
    else:
        start = max(domain.inner_radius, origin_offset)
        if start >= outer:
            msg = f"origin offset {origin_offset!r} leaves no room inside {domain}"
            raise GridError(msg)
    nodes = np.linspace(start, outer, points)
    nodes[-1] = outer
    return RadialGrid(nodes, domain)


def spectral_grid(domain: Domain, cells: int) -> RadialGrid:
    """Return the midpoint-offset grid used by the mode discretization.

    For a disk the first node sits half a cell from the origin, so the cell
    faces start exactly at r = 0. An annulus gets its two boundary nodes.
    """
    if cells < 1:
        msg = f"a spectral grid needs at least one cell, got {cells}"
        raise GridError(msg)
    if domain.is_ball():
        offset = domain.outer_radius / (2 * cells + 1)
        return make_grid(domain, cells + 1, offset)
    return make_grid(domain, cells + 1)


def integrate_radial(
    fn_values: ArrayLike,
    grid: RadialGrid,
    weight_exponent: float = 0.0,
    *,
    rule: QuadratureRule = "trapezoid",
) -> float:
    """Return ∫ h(|x|)|x|^β dx = 2π ∫ h(r) r^(β+1) dr over the grid's domain.

    On a disk the gap [0, r_1] is closed analytically with a power-law fit
    through the first two samples.
    """
    values = np.asarray(fn_values, dtype=np.float64)
    nodes = grid.nodes
    if values.shape != nodes.shape:
        msg = f"grid/value length mismatch: {values.size} values on {grid.size} nodes"
        raise GridError(msg)
    integrand = values * nodes ** (weight_exponent + 1)
    if rule == "simpson":
        total = float(simpson(integrand, x=nodes))
    elif rule == "trapezoid":
        total = float(trapezoid(integrand, x=nodes))
    else:
        msg = f"unknown quadrature rule {rule!r}"
        raise GridError(msg)
    if grid.domain.is_ball():
        total += _origin_cap(values, nodes, weight_exponent)
    return 2 * math.pi * total


def _origin_cap(values: FloatArray, nodes: FloatArray, weight_exponent: float) -> float:
    first, second = float(values[0]), float(values[1])
    power = weight_exponent + 2
    exponent = 0.0
    if first != 0 and second != 0 and (first > 0) == (second > 0):
        fitted = math.log(second / first) / math.log(nodes[1] / nodes[0])
        exponent = min(max(fitted, 0.0), _MAX_CAP_EXPONENT)
    return first * nodes[0] ** power / (power + exponent)


def count_sign_changes(values: ArrayLike, atol: float = 0.0) -> int:
    """Count sign changes, skipping samples with |v| ≤ atol·max|v|."""
    array = np.asarray(values, dtype=np.float64)
    if array.size == 0:
        return 0
    scale = float(np.max(np.abs(array)))
    if scale == 0:
        return 0
    signs = np.sign(array[np.abs(array) > atol * scale])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def sign_change_indices(values: ArrayLike, atol: float = 0.0) -> list[int]:
    """Return the indices i where the sign changes between samples i and i + 1."""
    array = np.asarray(values, dtype=np.float64)
    scale = float(np.max(np.abs(array))) if array.size else 0.0
    kept = np.flatnonzero(np.abs(array) > atol * scale)
    signs = np.sign(array[kept])
    flips = np.flatnonzero(signs[1:] != signs[:-1])
    return [int(kept[flip]) for flip in flips]


def radial_spline(function: RadialFunction, *, reflect: int = 1) -> CubicSpline:
    """Return a cubic spline of the values.

    On a disk a nonzero ``reflect`` mirrors the samples through the origin as
    an even (+1) or odd (-1) function so the spline is smooth at r = 0.
    """
    nodes, values = function.nodes, function.values
    if reflect and function.grid.domain.is_ball():
        nodes = np.concatenate((-nodes[::-1], nodes))
        values = np.concatenate((reflect * values[::-1], values))
    return CubicSpline(nodes, values)


def resample(function: RadialFunction, grid: RadialGrid, *, even: bool = True) -> RadialFunction:
    """Interpolate a radial function onto another grid of the same domain."""
    source = function.grid.domain
    if not (
        math.isclose(source.outer_radius, grid.domain.outer_radius, rel_tol=1e-12)
        and math.isclose(source.inner_radius, grid.domain.inner_radius, abs_tol=1e-12)
    ):
        msg = f"cannot resample from {source} onto {grid.domain}"
        raise GridError(msg)
    parity = 1 if even else -1
    spline = radial_spline(function, reflect=parity)
    values = spline(grid.nodes)
    if function.vanishes_on_boundary():
        values[grid.dirichlet_mask] = 0.0
    if function.derivatives is None:
        derivatives = spline(grid.nodes, 1)
    else:
        derivatives = radial_spline(
            RadialFunction(function.grid, function.derivatives), reflect=-parity
        )(grid.nodes)
    return RadialFunction(grid, values, derivatives)

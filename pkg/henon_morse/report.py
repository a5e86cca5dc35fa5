"""JSON and CSV artifacts, profile files and plain-text summaries."""

from __future__ import annotations

from collections.abc import Mapping
import csv
from dataclasses import fields, is_dataclass
import enum
import io
import json
import logging
import math
from pathlib import Path
import sys
from typing import TYPE_CHECKING, Any, Literal

import numpy as np

from .const import (
    DEFAULT_RESIDUAL_TOLERANCE,
    PROFILE_CSV_HEADER,
    SPECTRUM_CSV_HEADER,
)
from .errors import DomainError, GridError, ReportError, UsageError
from .grid import count_sign_changes
from .models import Domain, RadialFunction, RadialGrid, RadialProfile
from .radial import ode_residual
from .spectral import ModeSpectrum, MorseReport

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from .config import RunConfig
    from .nonlinearity import Nonlinearity
    from .verify import VerdictBundle

_LOGGER = logging.getLogger(__name__)

type ReportFormat = Literal["json", "csv"]

_SIGN_ATOL = 1e-9
_COMMENT = "#"


def _to_jsonable(value: Any) -> Any:
    """Normalize reports to JSON-safe types."""
    if value is None:
        return None
    if isinstance(value, Domain | Path):
        return str(value)
    if isinstance(value, RadialFunction):
        return {
            "r": _to_jsonable(value.nodes),
            "values": _to_jsonable(value.values),
            "derivatives": _to_jsonable(value.derivatives),
        }
    if is_dataclass(value) and not isinstance(value, type):
        return {
            item.metadata.get("key", item.name): _to_jsonable(getattr(value, item.name))
            for item in fields(value)
        }
    if isinstance(value, Mapping):
        return {str(key): _to_jsonable(val) for key, val in value.items()}
    if isinstance(value, np.ndarray):
        return [_to_jsonable(item) for item in value.tolist()]
    if isinstance(value, list | tuple):
        return [_to_jsonable(item) for item in value]
    if isinstance(value, set | frozenset):
        return sorted([_to_jsonable(item) for item in value], key=str)
    if isinstance(value, enum.Enum):
        return _to_jsonable(value.value)
    if isinstance(value, np.generic):
        return _to_jsonable(value.item())
    if isinstance(value, bool | int | str):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    return str(value)


def render_json(report: Any, config: RunConfig | None = None) -> str:
    """Return the report, with the run configuration embedded, as sorted JSON."""
    document = {"report": _to_jsonable(report)}
    if config is not None:
        document["config"] = _to_jsonable(config.as_record())
    return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _number(value: float) -> str:
    return format(float(value), ".17g")


def _config_lines(config: RunConfig | None) -> list[str]:
    if config is None:
        return []
    record = _to_jsonable(config.as_record())
    return [
        f"{_COMMENT} {key}={json.dumps(record[key], sort_keys=True)}" for key in sorted(record)
    ]


def _csv_text(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    config: RunConfig | None,
) -> str:
    buffer = io.StringIO()
    for line in _config_lines(config):
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(_number(item) if isinstance(item, float) else item for item in row)
    return buffer.getvalue()


def profile_rows(profile: RadialFunction) -> list[tuple[float, float, float]]:
    """Return (r, u, u′) rows."""
    slopes = profile.derivatives
    if slopes is None:
        slopes = np.gradient(profile.values, profile.nodes, edge_order=2)
    return [
        (float(r), float(u), float(du))
        for r, u, du in zip(profile.nodes, profile.values, slopes, strict=True)
    ]


def profile_summary(profile: RadialProfile) -> dict[str, Any]:
    """Return the scalar facts of a solved profile."""
    return {
        "alpha": profile.alpha,
        "nodal_sets": profile.nodal_sets,
        "residual": profile.residual,
        "verified": profile.is_verified,
        "zeros": list(profile.zeros),
        "shooting_parameter": profile.shooting_parameter,
        "boundary_value": profile.boundary_value,
        "sup_norm": profile.sup_norm,
        "grid_points": profile.grid.size,
        "domain": profile.grid.domain,
    }


def spectrum_rows(spectra: Iterable[ModeSpectrum]) -> list[tuple[int, int, float]]:
    """Return (k, index, λ) rows, index counting from 1 within each mode."""
    return [
        (spectrum.mode, index, value)
        for spectrum in spectra
        for index, value in enumerate(spectrum.eigenvalues, start=1)
    ]


def render_csv(report: Any, config: RunConfig | None = None) -> str:
    """Return the CSV form of a profile or a list of mode spectra."""
    if isinstance(report, RadialFunction):
        return _csv_text(PROFILE_CSV_HEADER, profile_rows(report), config)
    if isinstance(report, MorseReport):
        report = report.per_mode
    if isinstance(report, list | tuple) and all(
        isinstance(item, ModeSpectrum) for item in report
    ):
        return _csv_text(SPECTRUM_CSV_HEADER, spectrum_rows(report), config)
    msg = f"no CSV layout for {type(report).__name__}"
    raise UsageError(msg)


def write_text(text: str, path: Path | None) -> None:
    """Write to ``path``, or to stdout when it is None."""
    if path is None:
        sys.stdout.write(text)
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as err:
        msg = f"cannot write {path}: {err}"
        raise ReportError(msg) from err
    _LOGGER.debug("Wrote %s", path)


def emit_report(
    report: Any,
    fmt: ReportFormat = "json",
    path: Path | None = None,
    *,
    config: RunConfig | None = None,
) -> None:
    """Serialize a report deterministically to ``path`` or stdout."""
    if fmt == "json":
        text = render_json(report, config)
    elif fmt == "csv":
        text = render_csv(report, config)
    else:
        msg = f"unknown report format {fmt!r}"
        raise UsageError(msg)
    write_text(text, path)


def _read_rows(path: Path) -> tuple[dict[str, Any], list[list[str]]]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        msg = f"cannot read {path}: {err}"
        raise ReportError(msg) from err
    header: dict[str, Any] = {}
    body = []
    for line in text.splitlines():
        if line.startswith(_COMMENT):
            key, sep, raw = line[len(_COMMENT) :].strip().partition("=")
            if sep:
                try:
                    header[key] = json.loads(raw)
                except json.JSONDecodeError:
                    header[key] = raw
        elif line.strip():
            body.append(line)
    return header, list(csv.reader(body))


def read_header(path: Path) -> dict[str, Any]:
    """Return the ``# key=value`` header of an artifact written by this package."""
    header, _ = _read_rows(path)
    return header


def load_profile(
    path: Path,
    nonlinearity: Nonlinearity,
    alpha: float | None = None,
    *,
    domain: Domain | None = None,
    residual_tolerance: float = DEFAULT_RESIDUAL_TOLERANCE,
) -> RadialProfile:
    """Read an ``r,u,du`` CSV file and recompute the nodal count and residual.

    α and the domain default to the values in the file's comment header.
    """
    header, rows = _read_rows(path)
    if not rows or tuple(rows[0]) != PROFILE_CSV_HEADER:
        msg = f"{path}: expected a {','.join(PROFILE_CSV_HEADER)} header"
        raise ReportError(msg)
    try:
        table = np.array([[float(cell) for cell in row] for row in rows[1:]], dtype=np.float64)
    except ValueError as err:
        msg = f"{path}: malformed number: {err}"
        raise ReportError(msg) from err
    if table.ndim != 2 or table.shape[1] != len(PROFILE_CSV_HEADER):
        msg = f"{path}: every row needs {len(PROFILE_CSV_HEADER)} columns"
        raise ReportError(msg)
    if alpha is None:
        alpha = float(header.get("alpha", 0.0))
    try:
        if domain is None:
            recorded = header.get("domain")
            domain = Domain.parse(recorded) if recorded else Domain.ball(float(table[-1, 0]))
        grid = RadialGrid(table[:, 0], domain)
    except (DomainError, GridError) as err:
        msg = f"{path}: {err}"
        raise ReportError(msg) from err
    values, slopes = table[:, 1], table[:, 2]
    return RadialProfile(
        grid,
        values,
        slopes,
        alpha=alpha,
        nodal_sets=count_sign_changes(values, _SIGN_ATOL) + 1,
        residual=ode_residual(grid, values, slopes, alpha, nonlinearity),
        residual_tolerance=residual_tolerance,
    )


def emit_plot_data(
    directory: Path,
    stem: str,
    *,
    profile: RadialFunction | None = None,
    spectra: Sequence[ModeSpectrum] | None = None,
    config: RunConfig | None = None,
) -> list[Path]:
    """Write (r, u) and (k, λ₁(k)) CSV series for external plotting."""
    written = []
    if profile is not None:
        path = directory / f"{stem}_profile.csv"
        rows = [(float(r), float(u)) for r, u in zip(profile.nodes, profile.values, strict=True)]
        write_text(_csv_text(("r", "u"), rows, config), path)
        written.append(path)
    if spectra:
        path = directory / f"{stem}_lambda1.csv"
        rows = [(spectrum.mode, spectrum.lowest) for spectrum in spectra]
        write_text(_csv_text(("k", "lambda1"), rows, config), path)
        written.append(path)
    return written


def format_table(headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Return a left-aligned plain-text table."""
    cells = [[str(item) for item in headers]]
    for row in rows:
        cells.append([f"{item:.10g}" if isinstance(item, float) else str(item) for item in row])
    widths = [max(len(row[column]) for row in cells) for column in range(len(headers))]
    lines = [
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths, strict=True))
        for row in cells
    ]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def pretty_morse(report: MorseReport) -> str:
    """Return a per-mode table followed by the index and verdict."""
    table = format_table(
        ("k", "negative", "degenerate", "lowest"),
        (
            (spectrum.mode, spectrum.negative_count, spectrum.degenerate_count, spectrum.lowest)
            for spectrum in report.per_mode
        ),
    )
    return (
        table
        + f"\nMorse index {report.total_index} (radial {report.radial_negative_count},"
        f" k_max {report.k_max}); bound {report.theoretical_bound}: {report.verdict}\n"
    )


def pretty_spectra(spectra: Sequence[ModeSpectrum]) -> str:
    """Return the eigenvalue table of several modes."""
    return format_table(("k", "index", "lambda"), spectrum_rows(spectra))


def pretty_bundle(bundle: VerdictBundle) -> str:
    """Return one line per verdict with its margin."""
    title = f"alpha={bundle.alpha:g} p={bundle.p:g} n={bundle.nodal} {bundle.domain}"
    table = format_table(
        ("check", "status", "margin", "detail"),
        (
            (verdict.name, verdict.status.value, verdict.margin, verdict.detail)
            for verdict in bundle.verdicts
        ),
    )
    return f"{title}: {bundle.status.value}\n{table}"

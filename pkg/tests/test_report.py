"""Tests for JSON and CSV artifacts and profile files."""

from __future__ import annotations

import enum
import json
import math
from pathlib import Path

import numpy as np
import pytest

from henon_morse.config import build_run_config
from henon_morse.errors import ReportError, UsageError
from henon_morse.grid import spectral_grid
from henon_morse.models import Domain
from henon_morse.nonlinearity import Nonlinearity
from henon_morse.report import (
    _to_jsonable,
    emit_plot_data,
    emit_report,
    format_table,
    load_profile,
    pretty_morse,
    profile_summary,
    read_header,
    render_csv,
    render_json,
    spectrum_rows,
    write_text,
)
from henon_morse.spectral import ModeProblem, MorseReport, assemble_morse_report, solve_modes

from .conftest import ProfileFactory


class _Colour(enum.Enum):
    RED = "red"


@pytest.fixture(scope="module")
def morse_report() -> MorseReport:
    grid = spectral_grid(Domain.ball(), 300)
    base = ModeProblem(mode=0, grid=grid, potential=np.full(grid.size, 40.0))
    spectra = solve_modes(base, range(5), q=3)
    return assemble_morse_report(spectra, alpha=0.0, nodal_sets=2, superlinear=True)


def test_jsonable_conversions() -> None:
    converted = _to_jsonable(
        {
            "nan": math.nan,
            "inf": np.float64(np.inf),
            "int": np.int64(3),
            "domain": Domain.annulus(1, 2),
            "path": Path("a/b"),
            "colour": _Colour.RED,
            "set": {2, 1},
            "array": np.array([0.5, 1.5]),
        }
    )
    assert converted == {
        "nan": None,
        "inf": None,
        "int": 3,
        "domain": "annulus:1:2",
        "path": "a/b",
        "colour": "red",
        "set": [1, 2],
        "array": [0.5, 1.5],
    }


def test_morse_json_uses_field_keys(morse_report: MorseReport) -> None:
    document = json.loads(render_json(morse_report))
    report = document["report"]
    assert report["total"] == morse_report.total_index
    assert report["radial_count"] == morse_report.radial_negative_count
    assert report["bound"] == 4
    assert report["per_mode"][1]["k"] == 1
    assert "config" not in document


def test_json_is_deterministic(morse_report: MorseReport) -> None:
    config = build_run_config("morse", {"alpha": 1})
    first = render_json(morse_report, config)
    assert first == render_json(morse_report, config)
    assert json.loads(first)["config"]["alpha"] == 1.0
    assert "NaN" not in render_json({"x": math.nan})


def test_spectrum_csv(morse_report: MorseReport) -> None:
    text = render_csv(morse_report)
    lines = text.splitlines()
    assert lines[0] == "k,index,lambda"
    assert len(lines) - 1 == len(spectrum_rows(morse_report.per_mode))
    assert lines[1].startswith("0,1,")


def test_render_csv_rejects_other_reports() -> None:
    with pytest.raises(UsageError, match="no CSV layout"):
        render_csv({"a": 1})
    with pytest.raises(UsageError, match="unknown report format"):
        emit_report({}, "xml")  # type: ignore[arg-type]


def test_profile_file_round_trip(tmp_path: Path, henon_profile: ProfileFactory) -> None:
    profile = henon_profile(0, 2)
    config = build_run_config("solve", {"alpha": 0, "p": 3})
    path = tmp_path / "profile.csv"
    write_text(render_csv(profile, config), path)
    header = read_header(path)
    assert header["alpha"] == 0.0
    assert header["p"] == 3.0
    assert header["domain"] == "ball"
    loaded = load_profile(path, Nonlinearity.henon(3))
    np.testing.assert_array_equal(loaded.values, profile.values)
    np.testing.assert_array_equal(loaded.nodes, profile.nodes)
    assert loaded.nodal_sets == 2
    assert loaded.residual == pytest.approx(profile.residual, rel=1e-12)
    assert loaded.is_verified


@pytest.mark.parametrize(
    ("text", "message"),
    [
        ("a,b\n1,2\n", "expected a r,u,du header"),
        ("r,u,du\n0.5,x,1\n1,0,1\n", "malformed number"),
        ("r,u,du\n0.5,1\n1,0\n", "every row needs 3 columns"),
        ("r,u,du\n0.5,1,0\n0.2,1,0\n1,0,1\n", "strictly increasing"),
    ],
)
def test_malformed_profile_files(tmp_path: Path, text: str, message: str) -> None:
    path = tmp_path / "bad.csv"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ReportError, match=message):
        load_profile(path, Nonlinearity.henon(3))


def test_missing_profile_file(tmp_path: Path) -> None:
    with pytest.raises(ReportError, match="cannot read"):
        load_profile(tmp_path / "absent.csv", Nonlinearity.henon(3))


def test_write_text(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    write_text("hello\n", None)
    assert capsys.readouterr().out == "hello\n"
    nested = tmp_path / "a" / "b.txt"
    write_text("x", nested)
    assert nested.read_text(encoding="utf-8") == "x"
    blocker = tmp_path / "file"
    blocker.write_text("", encoding="utf-8")
    with pytest.raises(ReportError, match="cannot write"):
        write_text("x", blocker / "out.json")


def test_emit_plot_data(
    tmp_path: Path, henon_profile: ProfileFactory, morse_report: MorseReport
) -> None:
    paths = emit_plot_data(
        tmp_path, "a0_p3_n2", profile=henon_profile(0, 2), spectra=morse_report.per_mode
    )
    assert [path.name for path in paths] == ["a0_p3_n2_profile.csv", "a0_p3_n2_lambda1.csv"]
    lambda_lines = paths[1].read_text(encoding="utf-8").splitlines()
    assert lambda_lines[0] == "k,lambda1"
    assert len(lambda_lines) == 1 + len(morse_report.per_mode)
    assert emit_plot_data(tmp_path, "empty") == []


def test_profile_summary(henon_profile: ProfileFactory) -> None:
    profile = henon_profile(0, 2)
    summary = profile_summary(profile)
    assert summary["nodal_sets"] == 2
    assert summary["verified"] is True
    assert summary["grid_points"] == profile.grid.size
    assert str(summary["domain"]) == "ball"


def test_format_table() -> None:
    table = format_table(("name", "value"), [("a", 1.5), ("longer", 2)])
    assert table.splitlines() == [
        "name    value",
        "------  -----",
        "a       1.5",
        "longer  2",
    ]


def test_pretty_morse(morse_report: MorseReport) -> None:
    text = pretty_morse(morse_report)
    assert f"Morse index {morse_report.total_index}" in text
    assert text.endswith(f"{morse_report.verdict}\n")

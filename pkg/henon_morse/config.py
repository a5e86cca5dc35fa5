"""Run configuration: defaults, optional YAML file and command line flags."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field, fields, replace
import logging
from pathlib import Path
from typing import Any

import voluptuous as vol
import yaml

from .const import (
    CONF_ALL_EVEN_UPTO,
    CONF_ALPHA,
    CONF_BLOWUP_BOUND,
    CONF_DOMAIN,
    CONF_EIGEN_TOLERANCE,
    CONF_EMIT_PLOTS,
    CONF_FORMAT,
    CONF_GRID,
    CONF_IDENTITY_TOLERANCE,
    CONF_KAPPA,
    CONF_MAX_BISECTIONS,
    CONF_METHOD,
    CONF_MODES,
    CONF_NODAL,
    CONF_ODE_TOLERANCE,
    CONF_OUT,
    CONF_P,
    CONF_PRETTY,
    CONF_PROFILE,
    CONF_SAMPLES,
    CONF_SEED,
    CONF_THREADS,
    CONF_WEIGHTED,
    DEFAULT_BLOWUP_BOUND,
    DEFAULT_EIGEN_TOLERANCE,
    DEFAULT_GRID_POINTS,
    DEFAULT_IDENTITY_TOLERANCE,
    DEFAULT_MAX_BISECTIONS,
    DEFAULT_MIN_EIGENVALUES,
    DEFAULT_ODE_TOLERANCE,
    DEFAULT_SEED,
    DEFAULT_TRIAL_COUNT,
    DOMAIN,
    METHOD_SHOOT,
    MIN_GRID_POINTS,
    REPORT_FORMATS,
    SOLVE_METHODS,
)
from .errors import DomainError, UsageError
from .models import Domain
from .radial import ShootingConfig
from .spectral import SpectralOptions

_LOGGER = logging.getLogger(__name__)

CONF_LOGGER = "logger"
CONF_DEFAULT = "default"
CONF_LOGS = "logs"

DEFAULT_KAPPAS = (1 / 3, 1 / 2, 2.0, 3.0)

DEFAULTS: dict[str, Any] = {
    CONF_ALPHA: 0.0,
    CONF_P: 3.0,
    CONF_NODAL: 2,
    CONF_DOMAIN: "ball",
    CONF_GRID: DEFAULT_GRID_POINTS,
    CONF_KAPPA: list(DEFAULT_KAPPAS),
    CONF_MODES: None,
    CONF_WEIGHTED: False,
    CONF_ODE_TOLERANCE: DEFAULT_ODE_TOLERANCE,
    CONF_EIGEN_TOLERANCE: DEFAULT_EIGEN_TOLERANCE,
    CONF_IDENTITY_TOLERANCE: DEFAULT_IDENTITY_TOLERANCE,
    CONF_BLOWUP_BOUND: DEFAULT_BLOWUP_BOUND,
    CONF_MAX_BISECTIONS: DEFAULT_MAX_BISECTIONS,
    CONF_SEED: DEFAULT_SEED,
    CONF_SAMPLES: DEFAULT_TRIAL_COUNT,
    CONF_THREADS: None,
    CONF_PROFILE: None,
    CONF_OUT: None,
    CONF_EMIT_PLOTS: None,
    CONF_PRETTY: False,
    CONF_ALL_EVEN_UPTO: None,
    CONF_METHOD: METHOD_SHOOT,
    CONF_FORMAT: None,
}


def _domain(value: Any) -> Domain:
    if isinstance(value, Domain):
        return value
    try:
        return Domain.parse(str(value))
    except DomainError as err:
        raise vol.Invalid(str(err)) from err


def _positive(name: str) -> vol.All:
    return vol.All(
        vol.Coerce(float),
        vol.Range(min=0, min_included=False, msg=f"{name} must be positive"),
    )


def _optional_path(value: Any) -> Path | None:
    if value is None:
        return None
    return Path(value)


RUN_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_ALPHA): vol.All(
            vol.Coerce(float), vol.Range(min=0, msg="alpha must be ≥ 0")
        ),
        vol.Required(CONF_P): vol.All(
            vol.Coerce(float), vol.Range(min=1, min_included=False, msg="p must be > 1")
        ),
        vol.Required(CONF_NODAL): vol.All(
            vol.Coerce(int), vol.Range(min=1, msg="nodal must be ≥ 1")
        ),
        vol.Required(CONF_DOMAIN): _domain,
        vol.Required(CONF_GRID): vol.All(
            vol.Coerce(int),
            vol.Range(min=MIN_GRID_POINTS, msg=f"grid must be ≥ {MIN_GRID_POINTS}"),
        ),
        vol.Required(CONF_KAPPA): vol.All(
            vol.Length(min=1, msg="at least one kappa is required"), [_positive("kappa")]
        ),
        vol.Required(CONF_MODES): vol.Any(
            vol.All(vol.Coerce(int), vol.Range(min=1, msg="modes must be ≥ 1")), None
        ),
        vol.Required(CONF_WEIGHTED): vol.Boolean(),
        vol.Required(CONF_ODE_TOLERANCE): _positive("ode_tolerance"),
        vol.Required(CONF_EIGEN_TOLERANCE): _positive("eigen_tolerance"),
        vol.Required(CONF_IDENTITY_TOLERANCE): _positive("identity_tolerance"),
        vol.Required(CONF_BLOWUP_BOUND): _positive("blowup_bound"),
        vol.Required(CONF_MAX_BISECTIONS): vol.All(
            vol.Coerce(int), vol.Range(min=1, msg="max_bisections must be ≥ 1")
        ),
        vol.Required(CONF_SEED): vol.All(
            vol.Coerce(int), vol.Range(min=0, msg="seed must be ≥ 0")
        ),
        vol.Required(CONF_SAMPLES): vol.All(
            vol.Coerce(int), vol.Range(min=1, msg="samples must be ≥ 1")
        ),
        vol.Required(CONF_THREADS): vol.Any(
            vol.All(vol.Coerce(int), vol.Range(min=1, msg="threads must be ≥ 1")), None
        ),
        vol.Required(CONF_PROFILE): _optional_path,
        vol.Required(CONF_OUT): _optional_path,
        vol.Required(CONF_EMIT_PLOTS): _optional_path,
        vol.Required(CONF_PRETTY): vol.Boolean(),
        vol.Required(CONF_ALL_EVEN_UPTO): vol.Any(
            vol.All(vol.Coerce(int), vol.Range(min=0, msg="all_even_upto must be ≥ 0")),
            None,
        ),
        vol.Required(CONF_METHOD): vol.In(
            SOLVE_METHODS, msg=f"method must be one of {', '.join(SOLVE_METHODS)}"
        ),
        vol.Required(CONF_FORMAT): vol.Any(
            vol.In(REPORT_FORMATS, msg=f"format must be one of {', '.join(REPORT_FORMATS)}"),
            None,
        ),
    },
    extra=vol.PREVENT_EXTRA,
)

LOGGER_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_DEFAULT, default="info"): vol.All(
            str, vol.Lower, vol.In(["debug", "info", "warning", "error", "critical"])
        ),
        vol.Optional(CONF_LOGS, default={}): {str: vol.All(str, vol.Lower)},
    }
)

FILE_SCHEMA = vol.Schema(
    {
        vol.Optional(DOMAIN, default={}): vol.Any(None, dict),
        vol.Optional(CONF_LOGGER, default={}): vol.Any(None, LOGGER_SCHEMA),
    }
)


@dataclass(frozen=True, slots=True, kw_only=True)
class RunConfig:
    """Validated parameters of one command."""

    command: str
    alpha: float
    p: float
    nodal: int
    domain: Domain
    grid: int
    kappa: tuple[float, ...]
    modes: int | None
    weighted: bool
    ode_tolerance: float
    eigen_tolerance: float
    identity_tolerance: float
    blowup_bound: float
    max_bisections: int
    seed: int
    samples: int
    threads: int | None
    profile: Path | None
    out: Path | None
    emit_plots: Path | None
    pretty: bool
    all_even_upto: int | None
    method: str
    format: str | None
    config_file: Path | None = None
    log_levels: dict[str, str] = field(default_factory=dict)

    def shooting(self) -> ShootingConfig:
        """Return the shooting solver settings."""
        return ShootingConfig(
            ode_tolerance=self.ode_tolerance,
            max_bisections=self.max_bisections,
            blowup_bound=self.blowup_bound,
            grid_points=self.grid,
        )

    def spectral_options(self) -> SpectralOptions:
        """Return the mode solver settings."""
        options = SpectralOptions(
            eigen_tolerance=self.eigen_tolerance,
            min_eigenvalues=DEFAULT_MIN_EIGENVALUES,
            weighted=self.weighted,
            threads=self.threads,
        )
        if self.modes is None:
            return options
        return replace(options, max_modes=self.modes)

    def as_record(self) -> dict[str, Any]:
        """Return the parameters as plain values for artifact headers."""
        record: dict[str, Any] = {}
        for item in fields(self):
            if item.name == "log_levels":
                continue
            value = getattr(self, item.name)
            if isinstance(value, Domain | Path):
                value = str(value)
            elif isinstance(value, tuple):
                value = list(value)
            record[item.name] = value
        return record


def _flag(path: list[Any]) -> str:
    if not path:
        return "--config"
    return "--" + str(path[0]).replace("_", "-")


def load_config_file(path: Path) -> tuple[dict[str, Any], dict[str, Any]]:
    """Return the ``henon_morse:`` block and the ``logger:`` block of a YAML file."""
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as err:
        msg = f"--config: cannot read {path}: {err}"
        raise UsageError(msg) from err
    except yaml.YAMLError as err:
        msg = f"--config: {path} is not valid YAML: {err}"
        raise UsageError(msg) from err
    try:
        document = FILE_SCHEMA(raw or {})
    except vol.Invalid as err:
        msg = f"--config: {path}: {err}"
        raise UsageError(msg) from err
    return dict(document[DOMAIN] or {}), dict(document[CONF_LOGGER] or {})


def build_run_config(
    command: str,
    flags: Mapping[str, Any],
    config_file: Path | None = None,
) -> RunConfig:
    """Merge defaults, the YAML file and the flags, later layers winning, and validate."""
    merged = dict(DEFAULTS)
    log_levels: dict[str, str] = {}
    if config_file is not None:
        file_values, logger = load_config_file(config_file)
        merged.update(file_values)
        if logger:
            log_levels = {CONF_DEFAULT: logger[CONF_DEFAULT], **logger[CONF_LOGS]}
        _LOGGER.debug("Loaded %s keys from %s", len(file_values), config_file)
    merged.update({key: value for key, value in flags.items() if value is not None})
    try:
        validated = RUN_SCHEMA(merged)
    except vol.MultipleInvalid as err:
        first = err.errors[0]
        msg = f"{_flag(first.path)}: {first.msg}"
        raise UsageError(msg) from err
    validated[CONF_KAPPA] = tuple(validated[CONF_KAPPA])
    return RunConfig(
        command=command,
        config_file=config_file,
        log_levels=log_levels,
        **validated,
    )

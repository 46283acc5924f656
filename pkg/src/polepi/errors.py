"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: config errors exit 2, I/O errors
(plain OSError) exit 3, undefined metrics exit 4.
"""

from __future__ import annotations

from pydantic import ValidationError


class PolepiError(Exception):
    """Base class for package-level errors."""

    exit_code = 1
    category = "error"


class ConfigError(PolepiError):
    """Invalid parameter value, override path, or malformed configuration."""

    exit_code = 2
    category = "config"


class SchemaError(ConfigError):
    """An input table does not match the documented CSV schema."""


class UndefinedMetricError(PolepiError):
    """A statistic is undefined for the given data.

    Raised for zero-variance correlations, empty pair partitions and
    log transforms that leave fewer than three usable points. Callers
    that tabulate many metrics record the value as missing instead of
    aborting.
    """

    exit_code = 4
    category = "metric"


def config_error_from_validation(exc: ValidationError) -> ConfigError:
    """Convert a pydantic ValidationError into a ConfigError naming each bad field."""
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return ConfigError("invalid configuration: " + "; ".join(parts))

"""Exception types shared across the pipeline.

Each class maps to one CLI exit code so scripted callers can branch on
failures without parsing messages.
"""

from __future__ import annotations


class StylodetectError(Exception):
    """Base class for all pipeline errors."""

    exit_code = 4


class InputError(StylodetectError):
    """Invalid user input: corpus rows, config values, malformed files."""

    exit_code = 2


class MissingArtifactError(StylodetectError):
    """An upstream stage output (matrix, model, report) is absent."""

    exit_code = 3


class ProviderError(StylodetectError):
    """Embedding provider failure (timeouts, bad responses, dim mismatch)."""

    exit_code = 4

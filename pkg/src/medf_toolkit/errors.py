"""errors.py — exception hierarchy for medf-toolkit.

The CLI maps these onto exit codes (see cli.py); library code raises them
and never exits.
"""
from __future__ import annotations


class MedfError(Exception):
    """Base class for every error raised by this package."""


class BoundSpecError(MedfError):
    """Malformed F-spec, invalid value, or an unsupported tail rule."""


class RegimeError(MedfError):
    """A precondition on liminf F, lim F or the finite-support set failed."""


class ScanBoundExceeded(MedfError):
    """A reindex search ran past the configured scan bound."""


class CodecError(MedfError):
    """Invalid pair, or a finite level that violates the growth condition."""


class BudgetExceeded(MedfError):
    """An exhaustive enumeration would exceed its budget."""


class PreconditionError(MedfError):
    """A lift / diagonalization / probe precondition does not hold."""


class ConfigError(MedfError):
    """Unreadable config file or an out-of-range setting."""

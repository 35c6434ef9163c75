"""Exception hierarchy shared by the library and the CLI.

Every error carries the process exit code the CLI reports for it.
"""

from __future__ import annotations


class PolyfregError(Exception):
    """Base class for all polyfreg failures."""

    exit_code: int = 4


class ConfigError(PolyfregError):
    """Unparseable or inconsistent configuration."""

    exit_code = 2


class DataShapeError(PolyfregError, ValueError):
    """Inputs whose sizes, labels or strata do not fit together."""

    exit_code = 4


class GridError(DataShapeError):
    """Invalid quadrature grid, or data that does not conform to one."""


class SolverError(PolyfregError):
    """A linear system could not be solved to a finite answer."""

    exit_code = 3


class NumericalBudgetError(SolverError):
    """Too many cells of an experiment failed numerically."""


class IllConditionedWarning(UserWarning):
    """Emitted when a solve leaves the well-conditioned direct path."""

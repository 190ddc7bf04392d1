"""Exception types shared across the package.

The CLI maps these onto process exit codes, so keep the hierarchy flat
and explicit.
"""


class ConedataError(Exception):
    """Base class for all package errors."""


class ConfigError(ConedataError):
    """Bad or inconsistent run configuration (CLI exit code 2)."""


class CheckFailure(ConedataError):
    """A verification check did not meet its tolerance (CLI exit code 3)."""


class OutOfDomainError(ConedataError):
    """A sample point fell outside the grid box."""


class SingularPointError(ConedataError):
    """Kernel evaluation requested at its singular point y = 0."""


class DegenerateProfileError(ConedataError):
    """Angular profile moments too small to target a unit direction."""


class FormatError(ConedataError):
    """Malformed CIDF1 payload or header."""


class SolverError(ConedataError):
    """Base class for fixed-point solver failures (CLI exit code 4)."""


class DivergenceError(SolverError):
    """Picard ratio stayed at or above the divergence guard."""


class BallViolationError(SolverError):
    """Iterate left the trust ball set by the seed norm."""


class PositivityError(ConedataError):
    """Reconstructed metric lost positive definiteness."""

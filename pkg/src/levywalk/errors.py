"""Exception types shared across the package."""


class LevyWalkError(Exception):
    """Base class for package errors."""


class ConfigError(LevyWalkError):
    """Invalid configuration or argument domain violation (CLI exit code 1)."""


class HorizonError(LevyWalkError):
    """Query time beyond the represented horizon of a path."""


class BranchError(LevyWalkError):
    """Complex-power evaluation outside the principal-branch domain."""


class DiagnosticError(LevyWalkError):
    """A numerical result failed its internal sanity diagnostics (CLI exit code 2)."""

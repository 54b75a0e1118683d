"""Exception hierarchy and process exit codes."""

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_SAFETY = 4
EXIT_IO = 5


class MagbotError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgumentError(MagbotError):
    """An operation received an argument outside its documented domain."""


class SolverFailureError(MagbotError):
    """A numerical solver failed to converge.

    Carries the last residual so callers can report how far off the
    solution was.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class InterlockError(MagbotError):
    """A plan or scenario violated a safety/mode interlock."""


class ConfigError(MagbotError):
    """A configuration file failed validation."""

    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index

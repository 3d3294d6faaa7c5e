"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class EgoRankError(Exception):
    """Base class for all errors raised by egorank."""


class ConfigError(EgoRankError, ValueError):
    """Invalid parameters or configuration (CLI exit code 2)."""


class DataError(EgoRankError, ValueError):
    """Malformed or unusable input data (CLI exit code 3)."""


class ParseError(DataError):
    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ConvergenceError(EgoRankError, RuntimeError):
    """A solver hit its step cap before meeting its tolerance."""

    def __init__(self, message: str, residual: float, steps: int):
        self.residual = residual
        self.steps = steps
        super().__init__(f"{message} (steps={steps}, residual={residual:.3e})")

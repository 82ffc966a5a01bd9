"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class HCBlochError(Exception):
    exit_code = 1


class ConfigError(HCBlochError, ValueError):
    exit_code = 2


class SelectionError(HCBlochError, ValueError):
    exit_code = 3


class ModeError(HCBlochError, ValueError):
    exit_code = 4


class NumericalError(HCBlochError, ArithmeticError):
    exit_code = 5


class PoleError(NumericalError):
    """Evaluation point collides with a pole / excluded contrast."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index

"""Exception types raised by the cfo package."""


class CfoError(Exception):
    """Base class for package errors."""


class ConfigurationError(CfoError, ValueError):
    """A run, sweep or evaluator was configured inconsistently."""


class UnknownFunctionError(CfoError, KeyError):
    """A benchmark id that is not part of the suite was requested."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown function"

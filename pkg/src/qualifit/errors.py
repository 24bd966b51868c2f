"""Exception hierarchy. CLI exit codes are keyed off these classes."""


class QualifitError(Exception):
    """Base class for all errors raised by qualifit."""

    exit_code = 3


class ConfigError(QualifitError):
    """Invalid configuration, arguments, or inconsistent settings."""

    exit_code = 1


class DataError(QualifitError):
    """Malformed or inconsistent data files and observations."""

    exit_code = 2


class ConstraintSyntaxError(DataError):
    """Lexical or syntactic error in a constraint statement."""

    def __init__(self, message, line=1, column=1, source=None):
        self.line = line
        self.column = column
        self.source = source
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class SimulationError(QualifitError):
    """A model simulation could not be carried out."""

    exit_code = 3

"""Exception types shared across the package."""


class OcmetaError(Exception):
    """Base class for all package errors."""


class DimensionError(OcmetaError):
    """Operand shapes do not satisfy an operation's contract."""


class NumericError(OcmetaError):
    """A value that must be finite is NaN or infinite."""


class DataError(OcmetaError):
    """Input data violates a dataset contract."""


class ParseError(DataError):
    """A task file could not be parsed; carries the file and line number."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


class FormatError(DataError):
    """A model file is malformed; carries the byte offset of the problem."""

    def __init__(self, path, offset, message):
        super().__init__(f"{path}: byte {offset}: {message}")
        self.path = str(path)
        self.offset = offset


class ConfigError(OcmetaError):
    """A configuration value is out of range or inconsistent."""

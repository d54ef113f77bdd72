"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the domain an operation accepts."""


class ParseError(ValueError):
    """Malformed note text or corpus input."""

    def __init__(self, message, token=None, line=None, column=None):
        self.token = token
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class CheckpointError(Exception):
    """Base class for unreadable checkpoint files."""


class VersionMismatchError(CheckpointError):
    pass


class TruncatedCheckpointError(CheckpointError):
    pass


class ChecksumError(CheckpointError):
    pass

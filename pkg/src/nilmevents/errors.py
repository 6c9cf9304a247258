"""Exception types shared across the package.

Every error raised on a contract violation derives from NilmEventsError so
the CLI can map them to a nonzero exit status with a clean message.
"""


class NilmEventsError(Exception):
    """Base class for all structured errors raised by this package."""


class DataFormatError(NilmEventsError):
    """A data file violates the expected format.

    Carries the offending path and 1-based line number when known.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line is not None:
            prefix += f":{line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ShapeMismatchError(NilmEventsError):
    """Array dimensions do not agree with the declared layer or dataset shape."""


class DatasetError(NilmEventsError):
    """A dataset violates a precondition (empty, single-class, misaligned...)."""


class CheckpointError(NilmEventsError):
    """A checkpoint file is corrupt, truncated, or of an unsupported version."""


class ConfigError(NilmEventsError):
    """An experiment configuration file is invalid or incomplete."""

import typing as t

__all__: t.Tuple[str, ...] = (
    "ElectorateException",
    "IngestionError",
    "SourceUnavailable",
    "MalformedPage",
    "SnapshotError",
    "CandidateMismatch",
    "NonIncreasingTimestamps",
    "CorruptSnapshot",
    "UnsortedPayload",
    "ImageError",
    "MalformedImage",
    "LexiconError",
    "EmptyClassError",
    "NetworkError",
    "ShapeMismatch",
    "EmptyBatchError",
    "NonFiniteLoss",
    "CorruptModel",
    "ModelError",
    "DivergentRatio",
    "StatsError",
    "EmptyCohort",
    "InfeasiblePooledProportion",
    "ConfigError",
    "get_exit_code",
)


class ElectorateException(Exception):
    """Base exception class for electorate.

    Parameters
    ----------
    message: str
        The message to display.
    context: str
        What was being processed when the error occurred (a source id, a path, a page index...).

    Attributes
    ----------
    message: str
        The message to display.
    context: str
        What was being processed when the error occurred.
    exit_code: int
        The process exit code the CLI uses for this error.
    """

    exit_code: int = 1

    def __init__(self, message: str, context: str = "") -> None:
        self.message = message
        self.context = context
        super().__init__(message)

    def __str__(self) -> str:
        return f"{self.message} | {self.context}" if self.context else self.message


class IngestionError(ElectorateException):
    """Base exception class for follower-ID ingestion."""

    exit_code = 2


class SourceUnavailable(IngestionError):
    """Raised when a paged source cannot be reached after all retries.

    Parameters
    ----------
    message: str
        The message to display.
    context: str
        The source id.
    attempts: int
        How many requests were made for the failing page.
    """

    def __init__(self, message: str, context: str = "", attempts: int = 0) -> None:
        self.attempts = attempts
        super().__init__(message, context)

    def __str__(self) -> str:
        return f"{super().__str__()} | attempts={self.attempts}"


class MalformedPage(IngestionError):
    """Raised when a page cannot be parsed into user IDs.

    Parameters
    ----------
    message: str
        The message to display.
    context: str
        The source id.
    page_index: int
        Zero-based index of the offending page.
    """

    def __init__(self, message: str, context: str = "", page_index: int = -1) -> None:
        self.page_index = page_index
        super().__init__(message, context)

    def __str__(self) -> str:
        return f"{super().__str__()} | page={self.page_index}"


class SnapshotError(ElectorateException):
    """Base exception class for snapshot storage and diffing."""

    exit_code = 2


class CandidateMismatch(SnapshotError):
    """Raised when snapshots of different candidates are diffed."""


class NonIncreasingTimestamps(SnapshotError):
    """Raised when the older snapshot is not strictly older than the newer one."""


class CorruptSnapshot(SnapshotError):
    """Raised when a snapshot file has a bad header or a truncated payload."""


class UnsortedPayload(SnapshotError):
    """Raised when snapshot IDs are not strictly increasing."""


class ImageError(ElectorateException):
    """Base exception class for the image pipeline."""

    exit_code = 2


class MalformedImage(ImageError):
    """Raised when a pixel buffer is not an H x W x 3 array of 8-bit values."""


class LexiconError(ElectorateException):
    """Raised when a name lexicon cannot be loaded."""

    exit_code = 2


class EmptyClassError(ElectorateException):
    """Raised when balancing a training set that lacks one of the classes."""

    exit_code = 2


class NetworkError(ElectorateException):
    """Base exception class for the gender network."""


class ShapeMismatch(NetworkError):
    """Raised when a batch or a parameter set has the wrong shape."""

    exit_code = 2


class EmptyBatchError(NetworkError):
    """Raised when a loss, gradient or evaluation is requested for no examples."""

    exit_code = 2


class NonFiniteLoss(NetworkError):
    """Raised when training diverges.

    Parameters
    ----------
    message: str
        The message to display.
    context: str
        Diagnostics: epoch, batch and the offending loss value.
    """


class CorruptModel(NetworkError):
    """Raised when a model file has a bad header or payload."""

    exit_code = 2


class ModelError(ElectorateException):
    """Base exception class for the affinity model."""


class DivergentRatio(ModelError):
    """Raised when the female term of a gender ratio underflows to zero."""


class StatsError(ElectorateException):
    """Base exception class for statistical tests."""

    exit_code = 2


class EmptyCohort(StatsError):
    """Raised when a tested composition has no members."""


class InfeasiblePooledProportion(StatsError):
    """Raised when no pooled proportion in (0, 1) reproduces a published z value."""


class ConfigError(ElectorateException):
    """Raised for invalid configuration files or CLI inputs."""

    exit_code = 2


def get_exit_code(error: BaseException) -> int:
    """Gets the CLI exit code for an error.

    Parameters
    ----------
    error: BaseException
        The error.

    Returns
    -------
    int
        ``2`` for bad input, ``1`` for internal errors.
    """
    if isinstance(error, ElectorateException):
        return error.exit_code
    if isinstance(error, (FileNotFoundError, IsADirectoryError, PermissionError)):
        return 2
    return 1

import datetime
import enum
import logging
import os
import pathlib
import sys
import typing as t

from .constants import LOG_DIR_ENV

__all__: t.Tuple[str, ...] = (
    "Logger",
    "FileHandler",
    "Formatter",
    "get_logger",
    "PROGRESS",
)
PROGRESS: int = 25


class LogLevelColors(enum.Enum):
    """Colors for the log levels."""

    DEBUG = "\033[96m"
    INFO = "\033[92m"
    PROGRESS = "\033[95m"
    WARNING = "\033[93m"
    ERROR = "\033[33m"
    CRITICAL = "\033[91m"
    ENDC = "\033[0m"


class RelativePathFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        """Filter the log record."""
        record.pathname = record.pathname.replace(os.getcwd(), "~")
        return True


class Formatter(logging.Formatter):
    """Format the log record.

    Parameters
    ----------
    colored : bool
        Wrap each record in its level color.
    """

    def __init__(self, *, colored: bool = False) -> None:
        super().__init__(
            "[%(asctime)s] | %(pathname)s:%(lineno)d | %(levelname)s | %(message)s",
            style="%",
        )
        self.colored = colored

    def format(self, record: logging.LogRecord) -> str:
        """Format the log record."""
        text = super().format(record)
        if not self.colored or record.levelname not in LogLevelColors.__members__:
            return text
        return f"{LogLevelColors[record.levelname].value}{text}{LogLevelColors.ENDC.value}"


class FileHandler(logging.FileHandler):
    """Emit a log record into a file named after the current date.

    Parameters
    ----------
    ext : str
        The file name suffix.
    folder : pathlib.Path | str
        The folder to save the logs in. Defaults to "logs".
    """

    _last_entry: datetime.datetime = datetime.datetime.today()

    def __init__(self, *, ext: str, folder: t.Union[pathlib.Path, str] = "logs") -> None:
        """Create a new file handler."""
        self.folder = pathlib.Path(folder)
        self.ext = ext
        self.folder.mkdir(parents=True, exist_ok=True)
        super().__init__(
            self.folder / f"{datetime.datetime.today().strftime('%Y-%m-%d')}-{ext}.log",
            encoding="utf-8",
        )
        self.setFormatter(Formatter())

    def emit(self, record: logging.LogRecord) -> None:
        """Emit a log record, rolling over to a new file on date change."""
        if self._last_entry.date() != datetime.datetime.today().date():
            self._last_entry = datetime.datetime.today()
            self.close()
            self.baseFilename = (self.folder / f"{self._last_entry.strftime('%Y-%m-%d')}-{self.ext}.log").as_posix()
            self.stream = self._open()
        super().emit(record)


class Logger(logging.Logger):
    """
    The logger used across the pipeline stages.

    Parameters
    ----------
    name : str
        The name of the logger.
    level : int
        The level of the logger.
    log_dir : pathlib.Path | str | None
        Folder for dated log files. No file logging when None.

    Attributes
    ----------
    _handler : logging.StreamHandler
        The stream handler used to log to stderr.
    _file_handler : t.Optional[FileHandler]
        The file handler used to log to a file.

    Examples
    --------

    >>> logs = Logger(name="electorate")
    >>> logs.progress("fetch", 3, 10)
    [2016-04-26 17:05:32,000] | electorate/logger.py:160 | PROGRESS | fetch: 3/10 (30.0%)
    """

    def __init__(
        self,
        *,
        name: str,
        level: int = logging.INFO,
        log_dir: t.Optional[t.Union[pathlib.Path, str]] = None,
    ) -> None:
        super().__init__(name, level)
        logging.addLevelName(PROGRESS, "PROGRESS")
        self._handler = logging.StreamHandler(sys.stderr)
        self._handler.addFilter(RelativePathFilter())
        self._handler.setFormatter(Formatter(colored=sys.stderr.isatty()))
        self.addHandler(self._handler)
        self._file_handler: t.Optional[FileHandler] = None
        if log_dir is not None:
            self._file_handler = FileHandler(ext=name, folder=log_dir)
            self._file_handler.addFilter(RelativePathFilter())
            self.addHandler(self._file_handler)

    def progress(self, stage: str, done: int, total: int) -> None:
        """Record progress of a batch stage."""
        share = 100.0 * done / total if total else 100.0
        self.log(PROGRESS, "%s: %d/%d (%.1f%%)", stage, done, total, share)


_LOGGER: t.Optional[Logger] = None


def get_logger() -> Logger:
    """
    Gets the shared package logger, creating it on first use.

    File logging is enabled when the ``ELECTORATE_LOG_DIR`` environment variable is set.

    Returns
    -------
    Logger
        The logger.
    """
    global _LOGGER
    if _LOGGER is None:
        _LOGGER = Logger(name="electorate", log_dir=os.environ.get(LOG_DIR_ENV) or None)
    return _LOGGER

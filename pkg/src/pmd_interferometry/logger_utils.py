# Standard libraries
import logging
import sys
import traceback
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Union, Optional
# Third-party libraries
import colorlog
import colorama

colorama.init()

PACKAGE_LOGGER_NAME = "pmd_interferometry"
_DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
_LEVEL_COLORS = {
    'DEBUG': 'cyan', 'INFO': 'green', 'WARNING': 'yellow',
    'ERROR': 'red', 'CRITICAL': 'red,bold',
}


class _LevelInitialFilter(logging.Filter):
    """Adds 'levelinitial' attribute to log records."""
    def filter(self, record):
        record.levelinitial = record.levelname[0].upper() if record.levelname else '?'
        return True


class _ConsoleHandler(logging.StreamHandler):
    """Stream handler that always writes to the current sys.stdout or sys.stderr."""
    def __init__(self, stream_name: str):
        self._stream_name = stream_name
        super().__init__()

    @property
    def stream(self):
        return getattr(sys, self._stream_name)

    @stream.setter
    def stream(self, value):
        pass


def _separator() -> str:
    encoding = (getattr(sys.stdout, "encoding", None) or "").lower().replace("-", "")
    return '»' if encoding == "utf8" else '>'


class LoggerUtils:
    """
    Retrieves or configures the package loggers.

    Every logger is colored on the console (stdout below ERROR, stderr from
    ERROR up) and may also write to a rotating file. The last requested name
    is remembered for the uncaught-exception hook.
    """
    _last_logger_name: Optional[str] = None

    @staticmethod
    def get_logger(name: Optional[str] = None,
                   level: int = logging.INFO,
                   file_path: Optional[Union[str, Path]] = None,
                   file_max_bytes: int = 1024 * 1024,
                   file_backup_count: int = 1
                   ) -> logging.Logger:
        """
        Returns a configured logger, creating it on first use.

        Args:
            name: Logger name. If None, the last requested logger is reused,
                  falling back to the package logger.
            level: Minimum level for a newly configured logger.
            file_path: Optional log file for a newly configured logger.
            file_max_bytes: Rotation size of the log file.
            file_backup_count: Number of rotated files to keep.

        Returns:
            logging.Logger: The configured logger.
        """
        if name is None:
            name = LoggerUtils._last_logger_name or PACKAGE_LOGGER_NAME
        LoggerUtils._last_logger_name = name
        logger = logging.getLogger(name)
        if logger.handlers:
            return logger

        logger.setLevel(level)
        logger.addFilter(_LevelInitialFilter())
        log_format = f'[%(asctime)s][%(levelinitial)s] {_separator()} %(message)s'
        console_formatter = colorlog.ColoredFormatter(
            f'%(log_color)s{log_format}%(reset)s',
            datefmt=_DATE_FORMAT, log_colors=_LEVEL_COLORS, reset=True
        )

        stdout_handler = _ConsoleHandler("stdout")
        stdout_handler.setFormatter(console_formatter)
        stdout_handler.addFilter(lambda record: record.levelno < logging.ERROR)
        logger.addHandler(stdout_handler)

        stderr_handler = _ConsoleHandler("stderr")
        stderr_handler.setFormatter(console_formatter)
        stderr_handler.setLevel(logging.ERROR)
        logger.addHandler(stderr_handler)

        if file_path is not None:
            LoggerUtils.add_file_handler(logger, file_path, file_max_bytes, file_backup_count)

        if logger.name != "root":
            logger.propagate = False
        return logger

    @staticmethod
    def add_file_handler(logger: logging.Logger, file_path: Union[str, Path],
                         file_max_bytes: int = 1024 * 1024, file_backup_count: int = 1) -> None:
        """Attaches a rotating plain-text file handler to `logger`."""
        path = Path(file_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            filename=path, maxBytes=file_max_bytes,
            backupCount=file_backup_count, encoding='utf-8'
        )
        file_handler.setFormatter(logging.Formatter(
            f'[%(asctime)s][%(levelinitial)s] {_separator()} %(message)s', datefmt=_DATE_FORMAT))
        logger.addHandler(file_handler)

    @staticmethod
    def configure(level: Union[int, str] = logging.INFO,
                  file_path: Optional[Union[str, Path]] = None) -> logging.Logger:
        """
        Sets the level of the package logger and optionally adds a log file.

        Used by the command-line front end, where the level comes from a flag.
        A file handler left by an earlier call is closed and replaced.
        """
        logger = LoggerUtils.get_logger(PACKAGE_LOGGER_NAME)
        if isinstance(level, str):
            level = logging.getLevelName(level.upper())
        logger.setLevel(level)
        for handler in [h for h in logger.handlers if isinstance(h, RotatingFileHandler)]:
            logger.removeHandler(handler)
            handler.close()
        if file_path is not None:
            LoggerUtils.add_file_handler(logger, file_path)
        return logger


def _handle_uncaught_exception(exc_type, exc_value, exc_traceback):
    """Logs uncaught exceptions with the last requested logger."""
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_traceback)
        return
    logger = LoggerUtils.get_logger(name=LoggerUtils._last_logger_name)
    traceback_str = "".join(traceback.format_exception(exc_type, exc_value, exc_traceback))
    logger.critical(f"Uncaught exception:\n{traceback_str}")


sys.excepthook = _handle_uncaught_exception


if __name__ == "__main__":
    # Example usage
    logger = LoggerUtils.get_logger()
    logger.info("[CLI] Package logger ready.")
    logger.debug("[CLI] Hidden at the default INFO level.")

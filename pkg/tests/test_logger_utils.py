import logging
from logging.handlers import RotatingFileHandler

from pmd_interferometry import LoggerUtils


def file_handlers(logger):
    return [h for h in logger.handlers if isinstance(h, RotatingFileHandler)]


def test_configure_keeps_a_single_log_file(tmp_path):
    first, second = tmp_path / "first.log", tmp_path / "second.log"
    logger = LoggerUtils.configure("INFO", first)
    LoggerUtils.configure("INFO", second)
    logger.info("[CLI] written once")
    assert len(file_handlers(logger)) == 1
    assert second.read_text(encoding="utf-8").count("[CLI] written once") == 1
    assert "[CLI] written once" not in first.read_text(encoding="utf-8")

    LoggerUtils.configure("WARNING")
    assert file_handlers(logger) == []
    assert logger.level == logging.WARNING
    LoggerUtils.configure("INFO")

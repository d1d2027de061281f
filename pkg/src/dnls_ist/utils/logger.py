# src/dnls_ist/utils/logger.py
"""
Loggers for the dnls_ist modules.

Every module calls setup_logger(__name__) once at import. Records at DEBUG
and above go to a daily file, the console shows the configured level.
"""
import logging
import os
from datetime import datetime
from pathlib import Path

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_DIR_ENV = "DNLS_IST_LOG_DIR"


def log_directory() -> Path:
    """`logs/` at the repository root unless DNLS_IST_LOG_DIR points elsewhere."""
    default = Path(__file__).parent.parent.parent.parent / "logs"
    return Path(os.environ.get(LOG_DIR_ENV, default))


def setup_logger(name: str, log_level: str = "INFO") -> logging.Logger:
    """
    Logger for one toolkit module, with a daily file and a console stream.

    Handlers are attached on the first call for a name only, so repeated
    imports do not duplicate output.

    Args:
        name: Module name, normally __name__
        log_level: Console level (DEBUG, INFO, WARNING, ERROR)

    Returns:
        The module logger
    """
    log_dir = log_directory()
    log_dir.mkdir(parents=True, exist_ok=True)

    level = getattr(logging, log_level.upper())
    logger = logging.getLogger(name)
    logger.setLevel(level)
    if logger.handlers:
        return logger

    formatter = logging.Formatter(LOG_FORMAT)

    file_handler = logging.FileHandler(log_dir / f"dnls_ist_{datetime.now().strftime('%Y%m%d')}.log")
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(formatter)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)
    return logger


def set_console_level(log_level: str) -> None:
    """Apply a console level to every toolkit logger created so far."""
    level = getattr(logging, log_level.upper())
    for name, candidate in logging.Logger.manager.loggerDict.items():
        if not name.startswith("dnls_ist") or not isinstance(candidate, logging.Logger):
            continue
        candidate.setLevel(level)
        for handler in candidate.handlers:
            if not isinstance(handler, logging.FileHandler):
                handler.setLevel(level)

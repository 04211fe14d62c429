"""
Logging configuration for the toolkit
"""

import logging
import sys

from pythonjsonlogger import jsonlogger

from app.core.config import settings

_HANDLER_NAME = "dspkit"


def setup_logging() -> None:
    """Configure logging for the application"""

    # Create formatter
    if settings.LOG_JSON:
        formatter: logging.Formatter = jsonlogger.JsonFormatter(settings.LOG_FORMAT)
    else:
        formatter = logging.Formatter(settings.LOG_FORMAT)

    # stdout carries JSON results, diagnostics go to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.set_name(_HANDLER_NAME)
    console_handler.setFormatter(formatter)
    console_handler.setLevel(settings.LOG_LEVEL)

    # Configure root logger, replacing a handler from an earlier call
    root_logger = logging.getLogger()
    root_logger.setLevel(settings.LOG_LEVEL)
    for handler in list(root_logger.handlers):
        if handler.get_name() == _HANDLER_NAME:
            root_logger.removeHandler(handler)
    root_logger.addHandler(console_handler)

    # Route uvicorn through our handler
    for name in ("uvicorn", "uvicorn.access"):
        uvicorn_logger = logging.getLogger(name)
        uvicorn_logger.handlers = [console_handler]
        uvicorn_logger.setLevel(settings.LOG_LEVEL)
        uvicorn_logger.propagate = False


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance"""
    return logging.getLogger(name)

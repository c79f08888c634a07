"""Structured logging for exactdom with GitHub Actions annotation support."""

from __future__ import annotations

import logging
import os
import sys
from contextlib import contextmanager
from typing import Iterator


def annotations_enabled() -> bool:
    """True when running inside a GitHub Actions job."""
    return os.environ.get("GITHUB_ACTIONS", "").strip().lower() == "true"


class AnnotationFormatter(logging.Formatter):
    """Formatter that maps log levels to GitHub annotations or plain prefixes."""

    _ANNOTATIONS = {
        logging.WARNING: "::warning::",
        logging.ERROR: "::error::",
        logging.CRITICAL: "::error::",
    }
    _PLAIN = {
        logging.WARNING: "WARNING: ",
        logging.ERROR: "ERROR: ",
        logging.CRITICAL: "ERROR: ",
    }

    def __init__(self, fmt: str = "%(message)s", github: bool | None = None):
        super().__init__(fmt)
        self.github = annotations_enabled() if github is None else github

    def format(self, record: logging.LogRecord) -> str:
        table = self._ANNOTATIONS if self.github else self._PLAIN
        prefix = table.get(record.levelno, "")
        return f"{prefix}{super().format(record)}"


def get_logger(name: str = "exactdom", verbose: bool = False) -> logging.Logger:
    """Create or retrieve the exactdom logger.

    Writes to stderr so that reports printed on stdout stay machine-readable.
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        if verbose:
            logger.setLevel(logging.DEBUG)
        return logger

    logger.setLevel(logging.DEBUG if verbose else logging.INFO)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(AnnotationFormatter("%(message)s"))
    logger.addHandler(handler)

    logger.propagate = False
    return logger


@contextmanager
def log_group(title: str, logger: logging.Logger | None = None) -> Iterator[None]:
    """Fold the enclosed log lines into a collapsible group on GitHub."""
    target = logger or log
    if annotations_enabled():
        target.info("::group::%s", title)
        try:
            yield
        finally:
            target.info("::endgroup::")
    else:
        target.info("== %s", title)
        yield


# Module-level convenience instance
log = get_logger()

"""Unit tests for the logger module."""

import logging

from exactdom.logger import AnnotationFormatter, annotations_enabled, get_logger, log_group


class TestGetLogger:
    def test_returns_logger(self):
        logger = get_logger("test_exactdom_logger")
        assert isinstance(logger, logging.Logger)

    def test_default_level_is_info(self):
        logger = get_logger("test_info_level")
        assert logger.level == logging.INFO

    def test_verbose_level_is_debug(self):
        logger = get_logger("test_debug_level", verbose=True)
        assert logger.level == logging.DEBUG

    def test_idempotent(self):
        logger1 = get_logger("test_idem")
        logger2 = get_logger("test_idem")
        assert logger1 is logger2
        assert len(logger1.handlers) == 1

    def test_verbose_upgrades_existing(self):
        get_logger("test_upgrade")
        assert get_logger("test_upgrade", verbose=True).level == logging.DEBUG


def _record(level, msg):
    return logging.LogRecord("test", level, "", 0, msg, (), None)


class TestAnnotationFormatter:
    def test_error_annotation(self):
        formatter = AnnotationFormatter("%(message)s", github=True)
        assert formatter.format(_record(logging.ERROR, "bad thing")) == "::error::bad thing"

    def test_warning_annotation(self):
        formatter = AnnotationFormatter("%(message)s", github=True)
        assert formatter.format(_record(logging.WARNING, "careful")) == "::warning::careful"

    def test_plain_prefixes(self):
        formatter = AnnotationFormatter("%(message)s", github=False)
        assert formatter.format(_record(logging.ERROR, "bad thing")) == "ERROR: bad thing"
        assert formatter.format(_record(logging.WARNING, "careful")) == "WARNING: careful"

    def test_info_no_prefix(self):
        for github in (True, False):
            formatter = AnnotationFormatter("%(message)s", github=github)
            assert formatter.format(_record(logging.INFO, "just info")) == "just info"

    def test_detects_actions_environment(self, monkeypatch):
        monkeypatch.setenv("GITHUB_ACTIONS", "true")
        assert annotations_enabled()
        assert AnnotationFormatter().github
        monkeypatch.delenv("GITHUB_ACTIONS")
        assert not annotations_enabled()


class _ListHandler(logging.Handler):
    def __init__(self):
        super().__init__()
        self.messages = []

    def emit(self, record):
        self.messages.append(record.getMessage())


class TestLogGroup:
    def _logger(self, name):
        logger = logging.getLogger(name)
        logger.setLevel(logging.INFO)
        handler = _ListHandler()
        logger.addHandler(handler)
        return logger, handler

    def test_github_group(self, monkeypatch):
        monkeypatch.setenv("GITHUB_ACTIONS", "true")
        logger, handler = self._logger("test_group_github")
        with log_group("preset halfplane-identity", logger):
            logger.info("inside")
        assert handler.messages == ["::group::preset halfplane-identity", "inside", "::endgroup::"]

    def test_plain_heading(self, monkeypatch):
        monkeypatch.delenv("GITHUB_ACTIONS", raising=False)
        logger, handler = self._logger("test_group_plain")
        with log_group("preset halfplane-identity", logger):
            logger.info("inside")
        assert handler.messages == ["== preset halfplane-identity", "inside"]

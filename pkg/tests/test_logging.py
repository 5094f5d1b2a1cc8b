import logging

from _pytest.logging import LogCaptureFixture

from ehcavity.logging import PACKAGE_LOGGER, get_logger, set_verbose


def test_get_logger() -> None:
    """Name module loggers after the file stem, below the package logger."""
    logger = get_logger("/some/path/resonance.py")
    assert logger.name == "ehcavity.resonance"
    package = logging.getLogger(PACKAGE_LOGGER)
    assert len(package.handlers) == 1
    get_logger(__file__)
    assert len(package.handlers) == 1


def test_set_verbose(caplog: LogCaptureFixture) -> None:
    """Lower the level to DEBUG and announce it."""
    logger = logging.getLogger(f"{PACKAGE_LOGGER}.verbose-test")
    with caplog.at_level(logging.DEBUG, logger=logger.name):
        logger.setLevel(logging.INFO)
        set_verbose(logger)
        assert logger.level == logging.DEBUG
    assert "Verbose mode: setting log level to DEBUG" in caplog.text

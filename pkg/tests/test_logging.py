import logging

import pytest

from xrdfilter.errors import UsageError
from xrdfilter.main import main
from xrdfilter.utils.logging import PACKAGE, get_logger, set_level


@pytest.fixture
def restore_level():
    root = logging.getLogger(PACKAGE)
    level = root.level
    yield root
    root.setLevel(level)


def test_module_loggers_share_the_package_handler(restore_level):
    logger = get_logger("xrdfilter.services.example")
    assert logger.propagate and logger.level == logging.NOTSET
    assert not logger.handlers
    assert len(restore_level.handlers) == 1
    assert get_logger("plugin").name == f"{PACKAGE}.plugin"


def test_set_level_accepts_names_and_numbers(restore_level):
    set_level("debug")
    assert get_logger("xrdfilter.cli").getEffectiveLevel() == logging.DEBUG
    set_level(logging.ERROR)
    assert get_logger("xrdfilter.cli").getEffectiveLevel() == logging.ERROR


def test_unknown_level_is_a_usage_error(restore_level, tmp_path, capsys):
    with pytest.raises(UsageError):
        set_level("chatty")
    assert main(["nsr", "--in", str(tmp_path / "missing.dat"), "--log-level", "chatty"]) == 2
    assert "USAGE" in capsys.readouterr().err

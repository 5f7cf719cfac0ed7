# utils/logging_utils.py
import logging
import os
from typing import Optional, Union

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
_DEFAULT_LEVEL = os.environ.get("QUAKESEG_LOG_LEVEL", "INFO")


def configure_logging(level: Optional[Union[int, str]] = None) -> None:
    """Install a single stream handler on the root logger."""
    if level is None:
        level = _DEFAULT_LEVEL
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)

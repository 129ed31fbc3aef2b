"""
Logging setup for the command-line runs
Console only; numerical inner loops log at DEBUG
"""

import logging
from typing import Optional

from spdcopt.config import settings

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: Optional[str] = None) -> None:
    """
    Configure root logging once per process

    Args:
        level: Level name; falls back to settings.LOG_LEVEL
    """
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO),
        format=LOG_FORMAT,
    )

import logging
from typing import Optional

from polyconsensus.core.config import settings

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: Optional[str] = None) -> None:
    """Install a single stream handler on the package logger (idempotent)."""
    logger = logging.getLogger("polyconsensus")
    logger.setLevel((level or settings.log_level).upper())
    if not any(getattr(h, "_polyconsensus", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._polyconsensus = True
        logger.addHandler(handler)

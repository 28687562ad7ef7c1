"""Runtime configuration read from the environment.

Every setting has a module-level default; command-line flags override them.
"""

import logging
import logging.handlers
import os
import sys

import psutil

log = logging.getLogger("hyperpersist.config")

DEFAULT_FIELD = 2
HYPERPERSIST_LOG_DIR = os.environ.get("HYPERPERSIST_LOG_DIR", "")
HYPERPERSIST_LOG_LEVEL = os.environ.get("HYPERPERSIST_LOG_LEVEL", "WARNING").upper()

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"
LOG_FILE_NAME = "hyperpersist.log"


def env_field():
    """Prime modulus from HYPERPERSIST_FIELD, or the default when unset or not an integer.

    Primality is checked later, when the field is built.
    """
    raw = os.environ.get("HYPERPERSIST_FIELD", "")
    if not raw.strip():
        return DEFAULT_FIELD
    try:
        return int(raw)
    except ValueError:
        log.warning("Ignoring HYPERPERSIST_FIELD=%r: not an integer", raw)
        return DEFAULT_FIELD


HYPERPERSIST_FIELD = env_field()


def default_workers():
    """Worker count for concurrent snapshot pairs.

    Uses HYPERPERSIST_WORKERS when set, otherwise the logical CPU count.
    """
    raw = os.environ.get("HYPERPERSIST_WORKERS", "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("Ignoring HYPERPERSIST_WORKERS=%r: not an integer", raw)
    try:
        return psutil.cpu_count(logical=True) or 1
    except Exception:
        return 1


class _StderrHandler(logging.StreamHandler):
    """Stream handler bound to whatever sys.stderr is at emit time."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def setup_logging(verbose=False):
    """Attach handlers to the ``hyperpersist`` logger once and return it."""
    logger = logging.getLogger("hyperpersist")
    level = logging.DEBUG if verbose else getattr(logging, HYPERPERSIST_LOG_LEVEL, logging.WARNING)
    logger.setLevel(level)

    if getattr(logger, "_hyperpersist_configured", False):
        return logger

    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT)

    stream = _StderrHandler()
    stream.setFormatter(formatter)
    logger.addHandler(stream)

    if HYPERPERSIST_LOG_DIR:
        os.makedirs(HYPERPERSIST_LOG_DIR, exist_ok=True)
        handler = logging.handlers.RotatingFileHandler(
            os.path.join(HYPERPERSIST_LOG_DIR, LOG_FILE_NAME),
            maxBytes=1024 * 1024,
            backupCount=3,
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    logger.propagate = False
    logger._hyperpersist_configured = True
    return logger

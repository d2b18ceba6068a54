"""
Configuration module for Ontoprobe
Loads environment variables and provides configuration values
"""
import os
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv
from loguru import logger

from ontoprobe.constants import DEFAULT_LIMITS_S, DEFAULT_MAX_ROW_ARITY


def setup_logging(level: str = "INFO", log_file: Optional[Path] = None) -> None:
    """Route all diagnostics to stderr and, optionally, to a rotating log file."""
    logger.remove()  # Remove default handler
    logger.add(sys.stderr, colorize=True, level=level)
    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.add(str(log_file), rotation="500 MB", encoding="utf-8", level="DEBUG")
    logger.level("WARNING", color="<cyan>")


setup_logging()

# Initialize variables
WORKDIR = Path("work")
WORKERS = os.cpu_count() or 1
MAX_ROW_ARITY = DEFAULT_MAX_ROW_ARITY
LIMITS_S: List[int] = list(DEFAULT_LIMITS_S)
PROVER_GRACE_S = 5.0
LOG_LEVEL = "INFO"
BUILTIN_STEPS_PER_SECOND = 2000
BUILTIN_MAX_CLAUSES = 50000
BUILTIN_SOS = True
FETCH_URL: Optional[str] = None


def _positive_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.error(f"{name} environment variable is not a valid integer. Using default of {default}.")
        return default
    if value < 1:
        logger.warning(f"{name} ({value}) is too small. Using default of {default}.")
        return default
    return value


def parse_limits(raw: str) -> List[int]:
    """Parse a comma-separated list of strictly increasing positive seconds."""
    limits = [int(part) for part in raw.split(",") if part.strip()]
    if not limits:
        raise ValueError("no time limits given")
    if any(limit <= 0 for limit in limits):
        raise ValueError(f"time limits must be positive: {raw}")
    if any(b <= a for a, b in zip(limits, limits[1:])):
        raise ValueError(f"time limits must be strictly increasing: {raw}")
    return limits


def load_config(override: bool = False) -> bool:
    """Load configuration from environment variables"""
    global WORKDIR, WORKERS, MAX_ROW_ARITY, LIMITS_S, PROVER_GRACE_S, LOG_LEVEL
    global BUILTIN_STEPS_PER_SECOND, BUILTIN_MAX_CLAUSES, BUILTIN_SOS, FETCH_URL

    # Load environment variables
    load_dotenv(override=override)

    WORKDIR = Path(os.getenv("ONTOPROBE_WORKDIR", "work"))
    WORKERS = _positive_int("ONTOPROBE_WORKERS", os.cpu_count() or 1)
    MAX_ROW_ARITY = _positive_int("ONTOPROBE_MAX_ROW_ARITY", DEFAULT_MAX_ROW_ARITY)
    BUILTIN_STEPS_PER_SECOND = _positive_int("ONTOPROBE_BUILTIN_STEPS_PER_SECOND", 2000)
    BUILTIN_MAX_CLAUSES = _positive_int("ONTOPROBE_BUILTIN_MAX_CLAUSES", 50000)
    BUILTIN_SOS = os.getenv("ONTOPROBE_BUILTIN_SOS", "true").lower() == "true"
    FETCH_URL = os.getenv("ONTOPROBE_FETCH_URL") or None

    LOG_LEVEL = os.getenv("ONTOPROBE_LOG_LEVEL", "INFO").upper()
    if LOG_LEVEL not in {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}:
        logger.error(f"ONTOPROBE_LOG_LEVEL ({LOG_LEVEL}) is not a loguru level. Using INFO.")
        LOG_LEVEL = "INFO"

    raw_limits = os.getenv("ONTOPROBE_LIMITS")
    LIMITS_S = list(DEFAULT_LIMITS_S)
    if raw_limits:
        try:
            LIMITS_S = parse_limits(raw_limits)
        except ValueError as e:
            logger.error(f"ONTOPROBE_LIMITS is invalid ({e}). Using default of {DEFAULT_LIMITS_S}.")
            LIMITS_S = list(DEFAULT_LIMITS_S)

    # Confirm the grace period is a valid number.
    try:
        PROVER_GRACE_S = float(os.getenv("ONTOPROBE_PROVER_GRACE_S", "5"))
        if PROVER_GRACE_S < 0:
            logger.warning(f"ONTOPROBE_PROVER_GRACE_S ({PROVER_GRACE_S}) is negative. Using 0 seconds.")
            PROVER_GRACE_S = 0.0
    except ValueError:
        logger.error("ONTOPROBE_PROVER_GRACE_S environment variable is not a valid number. Using default of 5 seconds.")
        PROVER_GRACE_S = 5.0

    # Validate required configuration
    if WORKDIR.exists() and not WORKDIR.is_dir():
        logger.error(f"ONTOPROBE_WORKDIR ({WORKDIR}) exists and is not a directory.")
        return False

    return True


# Initialize configuration
load_config()

"""
SolAut Configuration
Settings read from the environment, with defaults that suit desk-scale runs.

Environment Variables:
    SOLAUT_MAX_BETA:        Cap on the primitive-root unit scan (default 1000000).
    SOLAUT_ISO_LIMIT:       Largest group order the isomorphism test accepts (default 2048).
    SOLAUT_AXIOM_LIMIT:     Realizations up to this order get exhaustive associativity checks (default 64).
    SOLAUT_AXIOM_SAMPLES:   Random triples checked above that order (default 2000).
    SOLAUT_REVERSER_BOUND:  Entry bound of the brute-force reverser oracle (default 30).
    SOLAUT_LOG_LEVEL:       Logging level for the CLI and the API (default INFO).
"""

import os
import logging
from dataclasses import dataclass, replace
from typing import Optional

logger = logging.getLogger(__name__)


def _int_env(name: str, default: int) -> int:
    raw = os.environ.get(name, "")
    if not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


@dataclass(frozen=True)
class Settings:
    max_beta: int = 1_000_000
    iso_limit: int = 2048
    axiom_exhaustive_limit: int = 64
    axiom_samples: int = 2000
    reverser_oracle_bound: int = 30
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            max_beta=_int_env("SOLAUT_MAX_BETA", cls.max_beta),
            iso_limit=_int_env("SOLAUT_ISO_LIMIT", cls.iso_limit),
            axiom_exhaustive_limit=_int_env("SOLAUT_AXIOM_LIMIT", cls.axiom_exhaustive_limit),
            axiom_samples=_int_env("SOLAUT_AXIOM_SAMPLES", cls.axiom_samples),
            reverser_oracle_bound=_int_env("SOLAUT_REVERSER_BOUND", cls.reverser_oracle_bound),
            log_level=os.environ.get("SOLAUT_LOG_LEVEL", cls.log_level).upper(),
        )


# Singleton instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create the process-wide settings."""
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings


def override_settings(**changes) -> Settings:
    """Replace selected settings (used by the CLI flags and by tests)."""
    global _settings
    _settings = replace(get_settings(), **changes)
    return _settings


def reset_settings() -> None:
    global _settings
    _settings = None

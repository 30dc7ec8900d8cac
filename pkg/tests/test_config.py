"""
Settings tests: environment parsing and overrides.
"""

import os

from app.config import get_settings, override_settings, reset_settings


def test_defaults():
    settings = get_settings()
    assert settings.max_beta == 1_000_000
    assert settings.axiom_exhaustive_limit == 64
    assert settings.log_level == "INFO"


def test_environment(monkeypatch):
    monkeypatch.setenv("SOLAUT_ISO_LIMIT", "128")
    monkeypatch.setenv("SOLAUT_LOG_LEVEL", "debug")
    reset_settings()
    settings = get_settings()
    assert settings.iso_limit == 128
    assert settings.log_level == "DEBUG"


def test_bad_integer_falls_back(monkeypatch):
    monkeypatch.setenv("SOLAUT_MAX_BETA", "lots")
    reset_settings()
    assert get_settings().max_beta == 1_000_000


def test_override():
    override_settings(max_beta=5)
    assert get_settings().max_beta == 5
    assert get_settings().iso_limit == 2048


def test_oracle_settings_from_environment(monkeypatch):
    monkeypatch.setenv("SOLAUT_AXIOM_SAMPLES", "50")
    monkeypatch.setenv("SOLAUT_REVERSER_BOUND", "7")
    reset_settings()
    settings = get_settings()
    assert settings.axiom_samples == 50
    assert settings.reverser_oracle_bound == 7


def test_environment_is_clean_between_tests():
    """No SOLAUT_* variable survives from an earlier test or the calling shell."""
    assert not [k for k in os.environ if k.startswith("SOLAUT_")]
    settings = get_settings()
    assert settings.axiom_samples == 2000
    assert settings.reverser_oracle_bound == 30

"""
Tests for settings resolution and logging setup.
"""

import logging

import pytest

from config import DEFAULTS, VerifierSettings, configure_logging, load_settings, write_env_file


def test_defaults_without_environment():
    settings = load_settings(env={})
    assert settings == VerifierSettings()
    assert settings.to_dict()["level"] == "fast"


def test_environment_overrides():
    settings = load_settings(env={
        "VERIFIER_SEED": "7",
        "VERIFIER_JOBS": "2",
        "VERIFIER_LEVEL": "FULL",
        "VERIFIER_LOG_LEVEL": "debug",
        "VERIFIER_MAX_DIM": "256",
        "VERIFIER_API_PORT": "9000",
    })
    assert settings.seed == 7
    assert settings.jobs == 2
    assert settings.level == "full"
    assert settings.log_level == "DEBUG"
    assert settings.max_dim == 256
    assert settings.api_port == 9000


@pytest.mark.parametrize("name, value", [
    ("VERIFIER_SEED", "abc"),
    ("VERIFIER_SEED", "-1"),
    ("VERIFIER_JOBS", "0"),
    ("VERIFIER_LEVEL", "medium"),
    ("VERIFIER_LOG_LEVEL", "LOUD"),
    ("VERIFIER_MAX_DIM", "0"),
    ("VERIFIER_API_PORT", "70000"),
])
def test_invalid_values_name_the_variable(name, value):
    with pytest.raises(ValueError, match=name):
        load_settings(env={name: value})


def test_write_env_file(tmp_path):
    path = write_env_file(str(tmp_path / ".env"))
    text = path.read_text(encoding="utf-8")
    for key, value in DEFAULTS.items():
        assert f"{key}={value}" in text

    path.write_text("VERIFIER_SEED=1\n", encoding="utf-8")
    write_env_file(str(path))
    assert path.read_text(encoding="utf-8") == "VERIFIER_SEED=1\n"
    write_env_file(str(path), overwrite=True)
    assert "VERIFIER_JOBS=4" in path.read_text(encoding="utf-8")


def test_configure_logging_sets_root_level():
    configure_logging("debug")
    assert logging.getLogger().level == logging.DEBUG
    configure_logging("WARNING")
    assert logging.getLogger().level == logging.WARNING

"""
Configuration for the cluster braiding verifier.
Reads VERIFIER_* settings from the environment (and a .env file), configures
logging for the entry points and can write a default .env.
"""

import logging
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Mapping, Optional

from dotenv import load_dotenv

LEVELS = ("fast", "full")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

DEFAULTS: Dict[str, str] = {
    "VERIFIER_SEED": "42",
    "VERIFIER_JOBS": "4",
    "VERIFIER_LEVEL": "fast",
    "VERIFIER_LOG_LEVEL": "WARNING",
    "VERIFIER_MAX_DIM": "4096",
    "VERIFIER_API_HOST": "0.0.0.0",
    "VERIFIER_API_PORT": "8000",
}


@dataclass(frozen=True)
class VerifierSettings:
    """Resolved settings; CLI flags override these, these override DEFAULTS."""

    seed: int = 42
    jobs: int = 4
    level: str = "fast"
    log_level: str = "WARNING"
    max_dim: int = 4096
    api_host: str = "0.0.0.0"
    api_port: int = 8000

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def _int_setting(env: Mapping[str, str], name: str, minimum: int) -> int:
    raw = env.get(name, DEFAULTS[name])
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def _choice_setting(env: Mapping[str, str], name: str, choices) -> str:
    raw = str(env.get(name, DEFAULTS[name]))
    value = raw.upper() if name == "VERIFIER_LOG_LEVEL" else raw.lower()
    if value not in choices:
        raise ValueError(f"{name} must be one of {', '.join(choices)}, got {raw!r}")
    return value


def load_settings(env: Optional[Mapping[str, str]] = None, dotenv: bool = True) -> VerifierSettings:
    """
    Build settings from ``env`` (default: the process environment after load_dotenv).

    Raises:
        ValueError: Naming the variable with an invalid value
    """
    if env is None:
        if dotenv:
            load_dotenv()
        env = os.environ
    port = _int_setting(env, "VERIFIER_API_PORT", 1)
    if port > 65535:
        raise ValueError(f"VERIFIER_API_PORT must be <= 65535, got {port}")
    return VerifierSettings(
        seed=_int_setting(env, "VERIFIER_SEED", 0),
        jobs=_int_setting(env, "VERIFIER_JOBS", 1),
        level=_choice_setting(env, "VERIFIER_LEVEL", LEVELS),
        log_level=_choice_setting(env, "VERIFIER_LOG_LEVEL", LOG_LEVELS),
        max_dim=_int_setting(env, "VERIFIER_MAX_DIM", 1),
        api_host=str(env.get("VERIFIER_API_HOST", DEFAULTS["VERIFIER_API_HOST"])),
        api_port=port,
    )


def configure_logging(level: str = "WARNING"):
    """Root handler for the entry points; library modules only create loggers."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def write_env_file(path: str = ".env", overwrite: bool = False) -> Path:
    """Write DEFAULTS as a .env file unless one exists."""
    env_file = Path(path)
    if env_file.exists() and not overwrite:
        return env_file
    lines = ["# Environment variables for the cluster braiding verifier"]
    lines += [f"{key}={value}" for key, value in DEFAULTS.items()]
    env_file.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return env_file


def main():
    """Show the effective configuration."""
    print("🔧 Cluster Braiding Verifier - Configuration")
    print("=" * 60)
    env_file = Path(".env")
    if not env_file.exists():
        write_env_file()
        print(f"✅ Default settings written to {env_file}")
    try:
        settings = load_settings()
    except ValueError as e:
        print(f"❌ Invalid configuration: {e}")
        return
    for key, value in settings.to_dict().items():
        print(f"   {key:10s} = {value}")
    print("\n🚀 Run the fast suite with:")
    print("   python main_verifier.py checkall --level fast --pretty")


if __name__ == "__main__":
    main()

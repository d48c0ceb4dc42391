# src/core/config.py - Settings and run-configuration loading
import copy
import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from dotenv import load_dotenv

from src.core.exceptions import (
    ConfigurationException,
    InvalidConfigException,
    MissingConfigException,
)

PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent
DEFAULT_SETTINGS_PATH = PROJECT_ROOT / "config" / "settings.yaml"

logger = logging.getLogger(__name__)


def load_env_file() -> bool:
    """Load the first .env found at the project root or the working directory"""
    for env_path in (PROJECT_ROOT / ".env", Path.cwd() / ".env"):
        if env_path.exists():
            load_dotenv(env_path, override=False)
            logger.debug("Loaded environment from %s", env_path)
            return True
    return False


# Load environment variables
env_loaded = load_env_file()


def _read_yaml(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise MissingConfigException(str(path))
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigurationException(f"Cannot parse {path}: {e}", str(path)) from e
    if not isinstance(data, dict):
        raise InvalidConfigException(str(path), type(data).__name__, "mapping at top level")
    return data


class Settings:
    """Application settings: settings.yaml sections plus environment overrides"""

    def __init__(self, settings_path: Optional[Union[str, Path]] = None):
        path = Path(settings_path or os.getenv("FRACBUBBLE_SETTINGS") or DEFAULT_SETTINGS_PATH)
        self.settings_path = path
        raw = _read_yaml(path)
        self.raw = raw

        app = raw.get("app", {})
        self.app_name = app.get("name", "fracbubble")
        self.version = str(app.get("version", "0.0.0"))

        # Logging Configuration
        log_cfg = raw.get("logging", {})
        self.log_level = os.getenv("FRACBUBBLE_LOG_LEVEL", log_cfg.get("level", app.get("log_level", "INFO"))).upper()
        self.log_format = log_cfg.get("format", "%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        self.logger_levels = {
            name: spec.get("level", "WARNING")
            for name, spec in (log_cfg.get("loggers") or {}).items()
        }
        if self.log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise InvalidConfigException("logging.level", self.log_level, "DEBUG|INFO|WARNING|ERROR|CRITICAL")

        # Performance Configuration
        workers_raw = os.getenv("FRACBUBBLE_WORKERS", raw.get("performance", {}).get("max_workers", 4))
        try:
            self.workers = int(workers_raw)
        except (TypeError, ValueError):
            raise InvalidConfigException("FRACBUBBLE_WORKERS", workers_raw, "positive integer")
        if self.workers < 1:
            raise InvalidConfigException("FRACBUBBLE_WORKERS", workers_raw, "positive integer")

        # Numerical sections
        self.quadrature = dict(raw.get("quadrature", {}))
        self.monte_carlo = dict(raw.get("monte_carlo", {}))
        self.lattice = dict(raw.get("lattice", {}))
        self.regime = dict(raw.get("regime", {}))
        self.cutoff = dict(raw.get("cutoff", {}))
        self.critical_point = dict(raw.get("critical_point", {}))
        self.residual = dict(raw.get("residual", {}))
        self.checks = dict(raw.get("checks", {}))

    def section(self, name: str) -> Dict[str, Any]:
        """Return a copy of a raw settings section"""
        return copy.deepcopy(self.raw.get(name, {}))

    def threshold(self, check_name: str) -> float:
        """Acceptance threshold for a named check"""
        if check_name not in self.checks:
            raise MissingConfigException(f"checks.{check_name}")
        return float(self.checks[check_name])


settings = Settings()


def configure_logging(level: Optional[str] = None):
    """Apply the logging section of settings.yaml to the root logger"""
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper(), logging.INFO),
        format=settings.log_format,
    )
    for name, lvl in settings.logger_levels.items():
        logging.getLogger(name).setLevel(getattr(logging, str(lvl).upper(), logging.WARNING))


def load_run_config(path: Union[str, Path]):
    """Parse a YAML or JSON run file into a validated RunConfig"""
    from src.core.models import RunConfig

    path = Path(path)
    if not path.exists():
        raise MissingConfigException(str(path))
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        raise ConfigurationException(f"Cannot parse run config {path}: {e}", str(path)) from e
    if not isinstance(data, dict):
        raise InvalidConfigException("<root>", type(data).__name__, "mapping")
    return RunConfig.model_validate(data)


def dump_run_config(cfg) -> str:
    """Canonical JSON form of a RunConfig (sorted keys)"""
    return json.dumps(cfg.model_dump(mode="json"), sort_keys=True, indent=2)


def config_digest(cfg) -> str:
    """sha256 of the canonical JSON form"""
    return hashlib.sha256(dump_run_config(cfg).encode("utf-8")).hexdigest()


if __name__ == "__main__":
    print("✅ Configuration loaded successfully")
    print(f"   Settings file: {settings.settings_path}")
    print(f"   Log level: {settings.log_level}")
    print(f"   Workers: {settings.workers}")

"""
Configuration management with singleton pattern.

Loading priority (highest to lowest):
1. Init kwargs
2. User YAML file passed with the global ``--config`` CLI option
3. Default hp_landscape/config.yaml

Environment variables are deliberately not a source: every run must be fully
described by argv and input files.

Usage:
    from hp_landscape.core.config import get_settings

    settings = get_settings()
    print(settings.max_m)
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, ClassVar, Literal, Optional

import yaml
from pydantic.fields import FieldInfo
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

logger = logging.getLogger(__name__)

# Default config file shipped with the package
DEFAULT_CONFIG_FILE = Path(__file__).parent.parent / "config.yaml"

# Singleton instance
_settings: Optional["Settings"] = None

# User overlay set by the CLI callback (--config)
_user_config_file: Optional[Path] = None

# Track which config file was loaded for debugging
_loaded_config_file: Optional[str] = None


def _load_yaml_file(path: Path, encoding: str = "utf-8") -> dict[str, Any]:
    """Load a single YAML file if it exists."""
    if not path.exists():
        logger.info("Config file not found: %s", path)
        return {}
    content = path.read_text(encoding=encoding)
    return yaml.safe_load(content) or {}


class YamlSettingsSource(PydanticBaseSettingsSource):
    """Thin settings source that provides YAML config as lowest-priority layer."""

    def get_field_value(
        self, field: FieldInfo, field_name: str
    ) -> tuple[Any, str, bool]:
        yaml_data = self.settings_cls.load_yaml_data()
        field_value = yaml_data.get(field_name)
        return field_value, field_name, False

    def prepare_field_value(
        self, field_name: str, field: FieldInfo, value: Any, value_is_complex: bool
    ) -> Any:
        return value

    def __call__(self) -> dict[str, Any]:
        d: dict[str, Any] = {}
        for field_name, field in self.settings_cls.model_fields.items():
            field_value, field_key, value_is_complex = self.get_field_value(
                field, field_name
            )
            field_value = self.prepare_field_value(
                field_name, field, field_value, value_is_complex
            )
            if field_value is not None:
                d[field_key] = field_value
        return d


class Settings(BaseSettings):
    """Analysis and signal-processing defaults.
    Load order (first = lowest priority): YAML (default + --config), init.
    """

    _yaml_cache: ClassVar[dict[str, Any] | None] = None

    app_name: str = "hp-landscape"

    # Logging settings (stderr always; optional file)
    log_level: str = "WARNING"
    log_file: Optional[str] = None
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Worker parallelism for --jobs; None = all cores
    jobs: Optional[int] = None

    # Multiple-defaults search
    max_m: int = 25

    # Cross-version correlation
    correlation_method: Literal["pearson", "spearman"] = "pearson"

    # Windowing conventions
    window_length: int = 2048
    resample_window_length: int = 4096

    # Dataset-variant ladders
    resample_factors: list[int] = [2, 4, 8, 16]
    filter_cutoffs_hz: list[float] = [12000, 6000, 3000, 1500, 750, 375, 187, 93, 46]

    # Filter design
    lowpass_order: int = 8
    fir_stopband_db: float = 80.0
    fir_transition_start: float = 0.8

    # Train/test split
    train_fraction: float = 0.2

    model_config = SettingsConfigDict(case_sensitive=False)

    @classmethod
    def load_yaml_data(cls) -> dict[str, Any]:
        """Load default config.yaml and overlay the --config file if set. Cached per class."""
        global _loaded_config_file
        if cls._yaml_cache is not None:
            return cls._yaml_cache
        cls._yaml_cache = _load_yaml_file(DEFAULT_CONFIG_FILE)
        _loaded_config_file = str(DEFAULT_CONFIG_FILE)
        logger.debug("Loaded default config from: %s", DEFAULT_CONFIG_FILE)
        if _user_config_file is not None:
            if _user_config_file.exists():
                cls._yaml_cache.update(_load_yaml_file(_user_config_file))
                _loaded_config_file = str(_user_config_file.resolve())
                logger.info("Loaded user config from: %s", _loaded_config_file)
            else:
                logger.warning("Config file specified but not found: %s", _user_config_file)
        return cls._yaml_cache

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        """First = highest priority: init, YAML. Env and dotenv are ignored."""
        return (
            init_settings,
            YamlSettingsSource(settings_cls),
        )


def set_config_file(path: Optional[Path]) -> None:
    """Select the user YAML overlay and drop any cached settings."""
    global _user_config_file
    _user_config_file = path
    reset_settings()


def get_settings() -> Settings:
    """
    Get the singleton Settings instance.

    Creates the instance on first call, loading configuration from:
    1. Default hp_landscape/config.yaml
    2. The --config YAML (if set, overrides defaults)

    Returns:
        Settings: The singleton settings instance.
    """
    global _settings
    if _settings is None:
        _settings = Settings()
        logger.debug("Settings initialized")
    return _settings


def reset_settings() -> None:
    """
    Reset the singleton instance. Useful for testing.
    """
    global _settings, _loaded_config_file
    _settings = None
    _loaded_config_file = None
    Settings._yaml_cache = None


def setup_logging(level: Optional[str] = None) -> None:
    """
    Configure logging based on settings.

    Logs always go to stderr so stdout stays clean for CSV/JSON output; a file
    handler is added only when ``log_file`` is configured.
    """
    settings = get_settings()

    root_logger = logging.getLogger()
    level_name = (level or settings.log_level).upper()
    root_logger.setLevel(getattr(logging, level_name, logging.WARNING))

    # Clear existing handlers to avoid duplicates on repeated invocations
    root_logger.handlers.clear()

    formatter = logging.Formatter(settings.log_format)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if settings.log_file:
        log_path = Path(settings.log_file)
        if not log_path.is_absolute():
            log_path = Path.cwd() / log_path
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)
        logger.info("Logging to file: %s", log_path.resolve())


def get_config_info() -> dict[str, Any]:
    """Get information about the current configuration for debugging."""
    settings = get_settings()
    return {
        "app_name": settings.app_name,
        "config_file": _loaded_config_file,
        "log_level": settings.log_level,
        "log_file": settings.log_file,
        "jobs": settings.jobs,
        "max_m": settings.max_m,
    }

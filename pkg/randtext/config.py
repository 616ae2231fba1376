import os
from typing import Optional

import yaml
from pydantic import ValidationError

from .errors import ConfigurationError
from .logger import get_logger
from .schemas import Settings

logger = get_logger(__name__)

CONFIG_PATH_ENV = "RANDTEXT_CONFIG"
OUTPUT_DIR_ENV = "RANDTEXT_OUTPUT_DIR"
METRICS_FILE_ENV = "RANDTEXT_METRICS_FILE"
DEFAULT_CONFIG_PATH = "config.yaml"

# keys of `global` inherited by each command section that does not set them
SECTION_DEFAULTS = {
    "simulate": {"seed", "chunk_size", "max_parallel_jobs", "tracked_k_max", "max_word_length"},
    "analyze": {"tracked_k_max", "max_word_length"},
}


def read_config_file(config_path: str) -> dict:
    if not os.path.exists(config_path):
        logger.debug(f"No config file at '{config_path}', using defaults.")
        return {}

    with open(config_path, "r", encoding="utf-8") as f:
        try:
            yaml_config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            logger.error(f"Error parsing {config_path}: {e}")
            yaml_config = {}

    if not isinstance(yaml_config, dict):
        logger.error(f"Ignoring {config_path}: top level must be a mapping.")
        return {}
    return yaml_config


def apply_global_defaults(config_data: dict) -> dict:
    global_config = config_data.get("global") or {}
    for section, keys in SECTION_DEFAULTS.items():
        section_config = config_data.get(section) or {}
        for key, value in global_config.items():
            if key in keys and key not in section_config:
                logger.debug(f"Applying global default '{key}={value}' to section '{section}'.")
                section_config[key] = value
        config_data[section] = section_config
    return config_data


def apply_environment(config_data: dict) -> dict:
    output_dir = os.getenv(OUTPUT_DIR_ENV)
    if output_dir:
        config_data["global"] = dict(config_data.get("global") or {}, output_dir=output_dir)

    metrics_file = os.getenv(METRICS_FILE_ENV)
    if metrics_file:
        config_data["metrics"] = dict(config_data.get("metrics") or {}, textfile=metrics_file)
    return config_data


def load_config(config_path: Optional[str] = None) -> Settings:
    """
    Loads config.yaml (or $RANDTEXT_CONFIG), applies global defaults to the
    command sections and environment overrides, and validates the result.
    """
    config_path = config_path or os.getenv(CONFIG_PATH_ENV, DEFAULT_CONFIG_PATH)
    config_data = read_config_file(config_path)
    config_data = apply_environment(config_data)
    config_data = apply_global_defaults(config_data)

    try:
        settings = Settings.model_validate(config_data)
    except ValidationError as e:
        logger.error(f"Configuration validation failed: {e}")
        raise ConfigurationError(f"invalid configuration in {config_path}: {e}") from e

    logger.debug(f"Loaded settings: {settings.model_dump(by_alias=True, exclude={'storage'})}")
    return settings

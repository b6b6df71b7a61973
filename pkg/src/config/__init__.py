"""
Configuration module that loads settings from YAML files in the root/config directory.
Provides convenient access to configuration values via properties and builds
the RunConfig for a pipeline invocation.
"""
import os
import yaml
import logging
from src.utils.paths import get_config_path, get_logs_path
from src.config.run_config import RunConfig, load_key_value_file

# Configure module logger
logger = logging.getLogger(__name__)

DEFAULT_LOG_FORMAT = "%(asctime)s - %(levelname)s - [%(name)s] - %(message)s"


class ConfigManager:
    """
    Centralized configuration manager that provides property access
    to configuration values with appropriate defaults.
    """
    def __init__(self, config_dir=None):
        self._config_dir = config_dir or get_config_path()
        self._config = self._load_global_config()

    def _load_yaml_config(self, file_path):
        """Loads a YAML configuration file and returns its content as a dictionary."""
        if not os.path.exists(file_path):
            logger.warning(f"Configuration file not found: {file_path}")
            return {}

        try:
            with open(file_path, "r", encoding="utf-8") as file:
                return yaml.safe_load(file) or {}
        except yaml.YAMLError as e:
            logger.error(f"Error parsing YAML configuration: {e}")
            return {}
        except OSError as e:
            logger.error(f"Unexpected error loading config file {file_path}: {str(e)}")
            return {}

    def _load_global_config(self):
        """Loads the pipeline configuration file from the config directory."""
        config_file = os.path.join(self._config_dir, "pipeline_config.yaml")
        logger.debug(f"Loading configuration from: {config_file}")
        config = self._load_yaml_config(config_file)
        logger.debug(f"Loaded configuration sections: {list(config.keys())}")
        return config

    def get(self, *keys, default=None):
        """
        Get a configuration value by navigating through nested dictionaries.

        Args:
            *keys: A sequence of keys to navigate the nested dictionaries
            default: Value to return if the path doesn't exist

        Example:
            config.get("reports", "decimals", default=3)
        """
        current = self._config
        for key in keys:
            if isinstance(current, dict) and key in current:
                current = current[key]
            else:
                return default
        return current

    # Pipeline properties
    @property
    def pipeline_defaults(self):
        return dict(self._config.get("pipeline", {}) or {})

    def run_config(self, config_file=None, **overrides):
        """
        Build the RunConfig for one invocation.

        Args:
            config_file: Optional path to a key=value settings file
            **overrides: CLI values; None means "not given"
        """
        file_values = load_key_value_file(config_file) if config_file else {}
        return RunConfig.from_sources(self.pipeline_defaults, file_values, overrides)

    # Report properties
    @property
    def report_decimals(self):
        return int(self.get("reports", "decimals", default=3))

    @property
    def plot_config(self):
        plots = self.get("plots", default={}) or {}
        return {
            "width_in": float(plots.get("width_in", 7.0)),
            "height_in": float(plots.get("height_in", 4.5)),
            "svg_hashsalt": str(plots.get("svg_hashsalt", "coda-ratios")),
        }

    # Logging properties
    @property
    def logging_config(self):
        logging_section = self.get("logging", default={}) or {}
        return {
            "logs_dir": get_logs_path(),
            "level": logging_section.get("level", "INFO"),
            "format": logging_section.get("format", DEFAULT_LOG_FORMAT),
        }


# Create a singleton instance of the config manager
config = ConfigManager()

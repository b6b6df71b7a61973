import logging

# Re-export log_manager for easy access
from src.logger.log_manager import log_manager


def setup_logging(verbose=False, logs_dir=None):
    """Initialize the logging system using global configuration."""
    from src.config import config

    level = logging.DEBUG if verbose else config.logging_config.get("level", "INFO")
    log_manager.configure(console_level=level, logs_dir=logs_dir)
    logging.getLogger(__name__).debug(f"[LOGGER] Logging configured: {config.logging_config}")

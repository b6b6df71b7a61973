import os
import logging

from src.bootstrap import get_application_root

logger = logging.getLogger(__name__)


def get_config_path():
    """
    Get the path to the config directory: [repo_root]/config
    """
    return os.path.join(get_application_root(), 'config')


def get_logs_path(create=False):
    """
    Get the path to the logs directory: [repo_root]/logs

    The directory is only created when `create` is set, so importing the
    package never touches the filesystem.
    """
    logs_path = os.path.join(get_application_root(), 'logs')
    if create:
        os.makedirs(logs_path, exist_ok=True)
    return logs_path


def ensure_output_dir(out_dir):
    """
    Create the report directory if needed and check it is writable.

    Raises:
        DataError: if the path exists as a file or cannot be written to.
    """
    from src.errors import DataError

    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as e:
        raise DataError(f"Cannot create output directory {out_dir}: {e}") from e
    if not os.access(out_dir, os.W_OK):
        raise DataError(f"Output directory is not writable: {out_dir}")
    logger.debug(f"Output directory ready: {out_dir}")
    return out_dir

"""Manages logging setup and the per-session log directory"""
import os
import logging
import sys
import queue
import threading
import atexit
from datetime import datetime
from logging.handlers import QueueHandler, QueueListener

from src.config import config

# --- Configuration ---
LOG_FORMAT = config.logging_config.get("format")
ROOT_LOG_LEVEL = logging.DEBUG  # Let root logger capture everything
FILE_LOG_LEVEL = logging.DEBUG  # File level - capture everything in files
ERROR_LOG_LEVEL = logging.WARNING  # Error file level
# --- End Configuration ---


class LogManager:
    _instance = None
    _lock = threading.Lock()  # Lock for thread-safe singleton creation

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                # Double-check locking
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._configured = False
                    cls._instance.session_dir = None
                    cls._instance.queue_listener = None
                    cls._instance.log_queue = None
        return cls._instance

    def configure(self, console_level=None, logs_dir=None):
        """
        Route all records through a queue to console and (optionally) file handlers.

        Args:
            console_level: Level name or number for the stderr handler
            logs_dir: Base directory for session logs; None disables file logging
        """
        with self._lock:
            self._stop_listener()
            root_logger = logging.getLogger()
            for handler in root_logger.handlers[:]:
                root_logger.removeHandler(handler)
                handler.close()

            formatter = logging.Formatter(LOG_FORMAT)
            handlers_for_listener = []

            # 1. Console handler
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setFormatter(formatter)
            console_handler.setLevel(console_level or config.logging_config.get("level", logging.INFO))
            handlers_for_listener.append(console_handler)

            # 2. Session file handlers (coda.log, error.log)
            if logs_dir:
                timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
                self.session_dir = os.path.join(logs_dir, f"session_{timestamp}")
                os.makedirs(self.session_dir, exist_ok=True)

                main_file_handler = logging.FileHandler(
                    os.path.join(self.session_dir, "coda.log"), mode='a', encoding='utf-8')
                main_file_handler.setFormatter(formatter)
                main_file_handler.setLevel(FILE_LOG_LEVEL)
                handlers_for_listener.append(main_file_handler)

                error_file_handler = logging.FileHandler(
                    os.path.join(self.session_dir, "error.log"), mode='a', encoding='utf-8')
                error_file_handler.setFormatter(formatter)
                error_file_handler.setLevel(ERROR_LOG_LEVEL)
                handlers_for_listener.append(error_file_handler)

            self.log_queue = queue.Queue(-1)
            self.queue_listener = QueueListener(
                self.log_queue,
                *handlers_for_listener,
                respect_handler_level=True
            )
            root_logger.addHandler(QueueHandler(self.log_queue))
            root_logger.setLevel(ROOT_LOG_LEVEL)

            # Third-party chatter
            logging.getLogger('matplotlib').setLevel(logging.WARNING)
            logging.getLogger('PIL').setLevel(logging.WARNING)

            self.queue_listener.start()
            if not self._configured:
                atexit.register(self.shutdown)
            self._configured = True

        logging.getLogger(__name__).debug(f"[LOG MANAGER {os.getpid()}] Session directory: {self.session_dir}")

    def _stop_listener(self):
        if self.queue_listener:
            self.queue_listener.stop()
            self.queue_listener = None

    def shutdown(self):
        """Stops the QueueListener, flushing queued records. Registered via atexit."""
        with self._lock:
            self._stop_listener()


# --- Instantiate the Singleton ---
log_manager = LogManager()

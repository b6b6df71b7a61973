import hashlib

# Re-export paths functions for easy access throughout the app
from src.utils.paths import get_config_path, get_logs_path, ensure_output_dir


def sha256_file(path, chunk_size=1 << 16):
    """Hex SHA-256 of a file's bytes, read in chunks."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sha256_text(text):
    """Hex SHA-256 of a UTF-8 string."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()

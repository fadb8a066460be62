"""
Runner settings from the environment.
A local .env file is loaded first; real environment variables win.
"""
import os
from typing import Optional

from dotenv import load_dotenv


class AppSettings:
    """Runner settings with environment variable support."""

    def __init__(self):
        load_dotenv(override=False)
        self.output_dir: str = os.getenv("RSCLAB_OUTPUT_DIR", "./rsclab_artifacts")
        self.threads: int = max(1, int(os.getenv("RSCLAB_THREADS", "1")))
        self.log_level: str = os.getenv("RSCLAB_LOG_LEVEL", "INFO").upper()
        key = (os.getenv("RSCLAB_MANIFEST_SIGNING_KEY") or "").strip()
        self.signing_key: Optional[bytes] = key.encode("utf-8") if key else None


def get_settings() -> AppSettings:
    """Fresh settings; the CLI reads them once per invocation."""
    return AppSettings()

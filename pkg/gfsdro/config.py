import os
from pathlib import Path
from typing import Any, Dict, Optional

import appdirs
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

from gfsdro.utils import get_logger

logger = get_logger(__name__)


class RuntimeConfig(BaseModel):
    """Process-wide runtime knobs read from the environment"""

    threads: int = Field(
        0, ge=0, description="Worker cap for per-anchor sampling (0 = serial)"
    )


class PathConfig(BaseModel):
    """Configuration for file paths"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    project_root: Path
    output_dir: Path
    log_dir: Optional[Path] = None


class Config:
    """Centralized configuration for the gfsdro application"""

    def __init__(self):
        # Load environment variables
        logger.debug("Initializing configuration")
        load_dotenv()
        self.env_vars: Dict[str, str] = dict(os.environ)

        self.initialize_paths()
        self.initialize_runtime()
        logger.debug("Configuration initialization completed")

    def initialize_paths(self) -> None:
        """Resolve output and log directories (created lazily by their users)"""
        project_root = Path(__file__).parent

        if self.env_vars.get("GFSDRO_OUTPUT_DIR"):
            output_dir = Path(self.env_vars["GFSDRO_OUTPUT_DIR"])
            logger.debug(f"Using custom output dir: {output_dir}")
        else:
            output_dir = Path(appdirs.user_data_dir("gfsdro", "gfsdro")) / "runs"
            logger.debug(f"Using default output dir: {output_dir}")

        log_dir = None
        if self.env_vars.get("GFSDRO_LOG_DIR"):
            log_dir = Path(self.env_vars["GFSDRO_LOG_DIR"])

        self.paths = PathConfig(
            project_root=project_root, output_dir=output_dir, log_dir=log_dir
        )

    def initialize_runtime(self) -> None:
        """Read worker parallelism settings"""
        raw_threads = self.env_vars.get("GFSDRO_THREADS", "0")
        try:
            threads = int(raw_threads)
        except ValueError:
            logger.warning(f"Ignoring non-integer GFSDRO_THREADS={raw_threads!r}")
            threads = 0
        if threads < 0:
            logger.warning(f"Ignoring negative GFSDRO_THREADS={threads}")
            threads = 0
        logger.debug(f"{threads=}")
        self.runtime = RuntimeConfig(threads=threads)

    def get_runtime_config(self) -> dict[str, Any]:
        """Return runtime configuration as a dictionary"""
        return self.runtime.model_dump()


# Create a singleton instance for easy import
config = Config()


def get_threads() -> int:
    """Current worker cap; re-read so tests can patch the environment."""
    raw = os.environ.get("GFSDRO_THREADS")
    if raw is None:
        return config.runtime.threads
    try:
        return max(int(raw), 0)
    except ValueError:
        return config.runtime.threads


OUTPUT_DIR = config.paths.output_dir

"""Run artifacts: metric CSVs, theta checkpoints, spec echo and a metadata sidecar.

CSV bodies depend only on the spec; timestamps and versions live in
``metadata.json``.
"""

import json
import platform
from dataclasses import dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from gfsdro.utils import get_logger, get_timestamp

logger = get_logger(__name__)

FLOAT_FORMAT = "%.9g"
TRACKED_PACKAGES = ("gfsdro", "numpy", "scipy", "pandas", "pydantic")


@dataclass
class RunArtifact:
    """Everything one experiment run produced"""

    output_dir: Path
    spec_text: str
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    checkpoints: List[Path] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def table_path(self, name: str) -> Path:
        return self.output_dir / name


def write_table(frame: pd.DataFrame, path: Path) -> Path:
    """Write a metric table with 9 significant digits and LF line endings."""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Saved {len(frame)} rows to {path}")
    return path


def write_checkpoints(thetas: Sequence[np.ndarray], directory: Path) -> List[Path]:
    """One ``theta_epoch_XXX.npy`` per epoch, numbered from 1."""
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for epoch, theta in enumerate(thetas, start=1):
        path = directory / f"theta_epoch_{epoch:03d}.npy"
        np.save(path, theta)
        paths.append(path)
    return paths


def _package_versions() -> Dict[str, Optional[str]]:
    versions = {}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = version(name)
        except PackageNotFoundError:
            versions[name] = None
    return versions


def write_metadata(path: Path, seed: int, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    metadata = {
        "timestamp": get_timestamp("%Y-%m-%dT%H:%M:%SZ"),
        "seed": seed,
        "python": platform.python_version(),
        "platform": platform.platform(),
        "packages": _package_versions(),
        **(extra or {}),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(metadata, f, ensure_ascii=False, indent=4, default=str)
    return metadata


def write_artifact(artifact: RunArtifact, seed: int) -> RunArtifact:
    """Persist every table, the spec echo and the metadata sidecar of ``artifact``."""
    artifact.output_dir.mkdir(parents=True, exist_ok=True)
    (artifact.output_dir / "spec.toml").write_text(artifact.spec_text, encoding="utf-8")
    for name, frame in artifact.tables.items():
        write_table(frame, artifact.table_path(name))
    artifact.metadata = write_metadata(
        artifact.output_dir / "metadata.json", seed, artifact.metadata
    )
    return artifact

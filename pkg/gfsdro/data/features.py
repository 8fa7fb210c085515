"""Reader and writer for pre-extracted feature files.

Format (plain 7-bit text)::

    gfsdro-features v1 n=<int> d=<int> classes=<int>
    <d space-separated floats> <integer label in [0, classes)>
    ...

Floats are written with the shortest decimal that round-trips.
"""

import re
from pathlib import Path
from typing import Union

import numpy as np

from gfsdro.data.models import LabeledDataset
from gfsdro.utils import FeatureParseError, InvalidArgumentError, get_logger

logger = get_logger(__name__)

HEADER_PATTERN = re.compile(r"^gfsdro-features v1 n=(\d+) d=(\d+) classes=(\d+)$")


def load_features(path: Union[str, Path]) -> LabeledDataset:
    """
    Load a feature file.

    Args:
        path: Path of the feature file

    Returns:
        Dataset with integer class labels

    Raises:
        FeatureParseError: Malformed header, ragged row, bad number, label
            out of range, a non-ASCII byte, or a row count that disagrees
            with the header
        OSError: The file cannot be read
    """
    path = Path(path)
    lines = []
    for number, raw in enumerate(path.read_bytes().splitlines(), start=1):
        try:
            lines.append(raw.decode("ascii"))
        except UnicodeDecodeError as e:
            raise FeatureParseError(path, number, f"non-ASCII byte at column {e.start + 1}") from e

    if not lines:
        raise FeatureParseError(path, 1, "missing header")
    match = HEADER_PATTERN.match(lines[0].strip())
    if match is None:
        raise FeatureParseError(path, 1, f"malformed header {lines[0]!r}")
    n, d, classes = (int(g) for g in match.groups())
    if d < 1:
        raise FeatureParseError(path, 1, "d must be >= 1")
    if classes < 1:
        raise FeatureParseError(path, 1, "classes must be >= 1")

    rows = [(number, line) for number, line in enumerate(lines[1:], start=2) if line.strip()]
    if not rows:
        raise FeatureParseError(path, 2, "empty data section")
    if len(rows) != n:
        line = rows[n][0] if len(rows) > n else len(lines) + 1
        raise FeatureParseError(path, line, f"header declares n={n}, found {len(rows)} rows")

    features = np.empty((n, d))
    labels = np.empty(n, dtype=np.int64)
    for k, (number, line) in enumerate(rows):
        tokens = line.split()
        if len(tokens) != d + 1:
            raise FeatureParseError(path, number, f"expected {d + 1} fields, found {len(tokens)}")
        try:
            features[k] = [float(t) for t in tokens[:d]]
        except ValueError as e:
            raise FeatureParseError(path, number, f"bad float: {e}") from e
        try:
            label = int(tokens[d])
        except ValueError as e:
            raise FeatureParseError(path, number, f"bad label {tokens[d]!r}") from e
        if not 0 <= label < classes:
            raise FeatureParseError(path, number, f"label {label} outside [0, {classes})")
        labels[k] = label

    logger.debug(f"Loaded {n} x {d} features ({classes} classes) from {path}")
    return LabeledDataset(
        features=features,
        labels=labels,
        name=path.stem,
        params={"n": n, "d": d, "classes": classes, "source": str(path)},
    )


def save_features(dataset: LabeledDataset, path: Union[str, Path]) -> Path:
    """Write ``dataset`` in the feature-file format and return the path."""
    if dataset.labels is None:
        raise InvalidArgumentError("Feature files need integer labels")
    classes = dataset.n_classes
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    lines = [f"gfsdro-features v1 n={dataset.n} d={dataset.d} classes={classes}"]
    for row, label in zip(dataset.features, dataset.labels):
        values = " ".join(repr(float(v)) for v in row)
        lines.append(f"{values} {int(label)}")
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
    return path

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional

import numpy as np

from gfsdro.utils import DimensionMismatchError, InvalidArgumentError, Vector


@dataclass(frozen=True)
class LabeledDataset:
    """Empirical distribution: n feature rows plus an optional label per row.

    Labels are integer classes (or +-1 for the raw circle data). Datasets with
    no label, like the uncertain least-squares draws, carry ``labels=None``.
    """

    features: np.ndarray
    labels: Optional[np.ndarray]
    name: str = "dataset"
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[0] < 1:
            raise InvalidArgumentError(
                f"Dataset features must be an (n, d) array with n >= 1, got {self.features.shape}"
            )
        if self.labels is not None and self.labels.shape != (self.features.shape[0],):
            raise DimensionMismatchError(
                "labels", (self.features.shape[0],), self.labels.shape
            )

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> Optional[int]:
        if "classes" in self.params:
            return int(self.params["classes"])
        if self.labels is None:
            return None
        return int(np.max(self.labels)) + 1

    def label(self, index: int):
        return None if self.labels is None else self.labels[index]

    def subset(self, indices) -> "LabeledDataset":
        indices = np.asarray(indices)
        labels = None if self.labels is None else self.labels[indices]
        return replace(self, features=self.features[indices], labels=labels)

    @property
    def metadata(self) -> Dict[str, Any]:
        return {"name": self.name, "seed": self.seed, **self.params}


@dataclass(frozen=True)
class UncertainLsInstance:
    """Least squares with A(xi) = A0 + xi A1; xi is the perturbed variable."""

    A0: np.ndarray
    A1: np.ndarray
    b: np.ndarray
    train_xi: Vector
    delta_grid: Vector
    seed: Optional[int] = None

    def oracle(self):
        from gfsdro.losses import UncertainLeastSquaresLoss

        return UncertainLeastSquaresLoss(self.A0, self.A1, self.b)

    def train_dataset(self) -> LabeledDataset:
        return LabeledDataset(
            features=self.train_xi[:, None].copy(),
            labels=None,
            name="uncertain-ls",
            params={"n": int(self.train_xi.size)},
            seed=self.seed,
        )

    def sample_test(self, delta: float, n: int, rng: np.random.Generator) -> np.ndarray:
        """Shifted test draws xi ~ U[-0.5 (1 + delta), 0.5 (1 + delta)], shape (n, 1)."""
        if delta < 0:
            raise InvalidArgumentError(f"delta must be >= 0, got {delta}")
        half_width = 0.5 * (1.0 + delta)
        return rng.uniform(-half_width, half_width, size=(n, 1))

"""l2 PGD attack and adversarial error curves."""

from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from gfsdro.data import LabeledDataset
from gfsdro.losses import LossOracle
from gfsdro.utils import InvalidArgumentError, LabelInput, PointInput, Vector, get_logger

logger = get_logger(__name__)


class AttackConfig(BaseModel):
    """PGD settings. The radius at level delta is delta times the mean l2 norm of the test features."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    delta_grid: Tuple[float, ...] = Field((0.0,), min_length=1)
    steps: int = Field(40, ge=1)
    step_scale: float = Field(2.5, gt=0)
    norm_reference: Literal["mean-l2-of-test-features"] = "mean-l2-of-test-features"

    @field_validator("delta_grid")
    @classmethod
    def nonnegative(cls, value):
        if any(v < 0 for v in value):
            raise ValueError("delta_grid entries must be >= 0")
        return value


def pgd_attack_l2(
    oracle: LossOracle,
    theta: Vector,
    x: PointInput,
    y: LabelInput,
    radius: float,
    steps: int = 40,
    step_scale: float = 2.5,
) -> np.ndarray:
    """
    Projected gradient ascent on the loss inside the l2 ball of ``radius``.

    Each iterate moves alpha = step_scale * radius / steps along the
    normalized input gradient and is projected back onto the ball around the
    clean point. A zero gradient leaves that row in place. Rows of a batch
    are attacked independently.

    Args:
        oracle: Loss family
        theta: Model parameters
        x: Clean point (d,) or batch (n, d)
        y: Label(s)
        radius: Ball radius (>= 0)
        steps: Iteration count (>= 1)
        step_scale: Step multiplier

    Returns:
        Adversarial points with the shape of ``x``
    """
    if radius < 0:
        raise InvalidArgumentError(f"radius must be >= 0, got {radius}")
    if steps < 1:
        raise InvalidArgumentError(f"steps must be >= 1, got {steps}")
    x0 = np.asarray(x, dtype=np.float64)
    if radius == 0:
        return x0.copy()

    single = x0.ndim == 1
    origin = x0[None, :] if single else x0
    alpha = step_scale * radius / steps
    current = origin.copy()
    for _ in range(steps):
        grad = np.atleast_2d(oracle.grad_input(theta, current, y))
        norms = np.linalg.norm(grad, axis=1, keepdims=True)
        direction = np.divide(grad, norms, out=np.zeros_like(grad), where=norms > 0)
        current = current + alpha * direction

        delta = current - origin
        dist = np.linalg.norm(delta, axis=1, keepdims=True)
        shrink = np.where(dist > radius, radius / np.maximum(dist, 1e-300), 1.0)
        current = origin + delta * shrink

    return current[0] if single else current


def misclassification_rate(
    oracle: LossOracle, theta: Vector, dataset: LabeledDataset, features: Optional[np.ndarray] = None
) -> float:
    """Fraction of rows whose predicted class differs from the label (ties go to the lower class)."""
    if dataset.labels is None:
        raise InvalidArgumentError(f"Dataset '{dataset.name}' has no labels")
    points = dataset.features if features is None else features
    predictions = oracle.predict(theta, points)
    return float(np.mean(predictions != dataset.labels))


def reference_norm(features: np.ndarray) -> float:
    return float(np.mean(np.linalg.norm(features, axis=1)))


def robustness_curve(
    oracle: LossOracle, theta: Vector, dataset: LabeledDataset, attack: AttackConfig
) -> np.ndarray:
    """Misclassification rate under PGD at every level of ``attack.delta_grid``."""
    scale = reference_norm(dataset.features)
    rates = []
    for delta in attack.delta_grid:
        radius = delta * scale
        adversarial = pgd_attack_l2(
            oracle, theta, dataset.features, dataset.labels, radius, attack.steps, attack.step_scale
        )
        rates.append(misclassification_rate(oracle, theta, dataset, adversarial))
        logger.debug(f"delta={delta}: radius={radius:.4g}, error={rates[-1]:.4f}")
    return np.asarray(rates)


def mean_test_loss(
    oracle: LossOracle, theta: Vector, features: np.ndarray, labels: LabelInput = None
) -> float:
    return float(np.mean(oracle.value(theta, np.atleast_2d(features), labels)))

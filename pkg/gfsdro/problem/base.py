"""DRO problem definition, tilted potential and the particle cloud state."""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import logsumexp

from gfsdro.losses.base import LossOracle
from gfsdro.utils import (
    DegenerateWeightsError,
    DimensionMismatchError,
    InvalidArgumentError,
    Label,
    PointInput,
    Vector,
    get_logger,
)

logger = get_logger(__name__)

SIMPLEX_TOL = 1e-12


class RobustnessParams(BaseModel):
    """Penalty and entropy weights of the penalized objective.

    ``tau`` weighs the transport cost by 1/(2 tau); ``epsilon`` is the entropic
    regularization. ``epsilon = 0`` selects the deterministic (WRM) limit.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    tau: float = Field(..., gt=0, description="Transport penalty parameter")
    epsilon: float = Field(..., ge=0, description="Entropic regularization")


class CostFunction(BaseModel):
    """Squared Euclidean transport cost on the feature block.

    The label-constrained kind forbids label transport; it is realized by
    samplers never touching labels, so both kinds share one formula.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["squared-euclidean", "squared-euclidean-with-fixed-label"] = (
        "squared-euclidean"
    )
    dim: Optional[int] = Field(None, gt=0, description="Feature dimension, if pinned")

    def value(self, y: PointInput, x: Vector) -> Any:
        diff = np.asarray(y, dtype=np.float64) - x
        return np.sum(diff * diff, axis=-1)

    def grad(self, y: PointInput, x: Vector) -> np.ndarray:
        """Gradient in the first argument."""
        return 2.0 * (np.asarray(y, dtype=np.float64) - x)


@dataclass(frozen=True)
class RobustProblem:
    """Loss oracle, transport cost and (tau, epsilon)."""

    loss: LossOracle
    params: RobustnessParams
    cost: CostFunction = field(default_factory=CostFunction)

    def __post_init__(self):
        if self.cost.dim is not None and self.cost.dim != self.loss.input_dim:
            raise DimensionMismatchError(
                "cost dimension", self.loss.input_dim, self.cost.dim
            )

    @property
    def tau(self) -> float:
        return self.params.tau

    @property
    def epsilon(self) -> float:
        return self.params.epsilon

    @property
    def dim(self) -> int:
        return self.loss.input_dim


@dataclass(frozen=True)
class ParticleCloud:
    """Weighted particles approximating the conditional worst-case law at ``anchor``.

    Weights live in the log domain; ``weights`` exposes normalized probabilities.
    The label is carried unchanged from the anchor.
    """

    positions: np.ndarray
    log_weights: np.ndarray
    anchor: np.ndarray
    label: Label = None
    stats: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.positions.ndim != 2 or self.positions.shape[0] < 1:
            raise InvalidArgumentError(
                f"Particle positions must be an (m, d) array with m >= 1, got {self.positions.shape}"
            )
        if self.log_weights.shape != (self.positions.shape[0],):
            raise DimensionMismatchError(
                "log-weights", (self.positions.shape[0],), self.log_weights.shape
            )
        if self.anchor.shape != (self.positions.shape[1],):
            raise DimensionMismatchError(
                "anchor", (self.positions.shape[1],), self.anchor.shape
            )

    @classmethod
    def at_anchor(cls, anchor: Vector, m: int, label: Label = None) -> "ParticleCloud":
        """m copies of the anchor with uniform weights."""
        anchor = np.asarray(anchor, dtype=np.float64)
        positions = np.tile(anchor, (m, 1))
        return cls(positions, np.full(m, -np.log(m)), anchor.copy(), label)

    @classmethod
    def from_weights(
        cls, positions, weights, anchor, label: Label = None
    ) -> "ParticleCloud":
        """Build a normalized cloud from raw nonnegative weights."""
        weights = np.asarray(weights, dtype=np.float64)
        if np.any(weights < 0):
            raise InvalidArgumentError("Particle weights must be nonnegative")
        with np.errstate(divide="ignore"):
            log_weights = np.log(weights)
        cloud = cls(
            np.asarray(positions, dtype=np.float64),
            log_weights,
            np.asarray(anchor, dtype=np.float64),
            label,
        )
        return normalize_weights(cloud)

    @property
    def m(self) -> int:
        return self.positions.shape[0]

    @property
    def d(self) -> int:
        return self.positions.shape[1]

    @property
    def weights(self) -> np.ndarray:
        return np.exp(normalize_log_weights(self.log_weights))

    def weighted_mean(self) -> np.ndarray:
        return self.weights @ self.positions

    def on_simplex(self, tol: float = SIMPLEX_TOL) -> bool:
        w = np.exp(self.log_weights)
        return bool(np.all(w >= 0) and abs(w.sum() - 1.0) <= tol)


def normalize_log_weights(log_weights: np.ndarray) -> np.ndarray:
    """Shift log-weights so their exponentials sum to one (log-sum-exp).

    A ``(B, m)`` array is normalized row by row.
    """
    log_weights = np.asarray(log_weights, dtype=np.float64)
    if log_weights.size == 0 or np.any(np.all(np.isneginf(log_weights), axis=-1)):
        raise DegenerateWeightsError()
    return log_weights - logsumexp(log_weights, axis=-1, keepdims=True)


def normalize_weights(cloud: ParticleCloud) -> ParticleCloud:
    """Return ``cloud`` with log-weights normalized onto the simplex."""
    return replace(cloud, log_weights=normalize_log_weights(cloud.log_weights))


def _check_point(problem: RobustProblem, anchor: Vector, y: PointInput):
    anchor = np.asarray(anchor, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    d = problem.dim
    if y.ndim not in (1, 2) or y.shape[-1] != d:
        raise DimensionMismatchError("evaluation point", f"(..., {d})", y.shape)
    # one anchor for every point, or one per row of a batch
    if anchor.shape != (d,) and not (y.ndim == 2 and anchor.shape == y.shape):
        raise DimensionMismatchError("anchor", (d,), anchor.shape)
    return anchor, y


def tilted_potential(
    problem: RobustProblem,
    theta: Vector,
    anchor: Vector,
    y: PointInput,
    label: Label = None,
):
    """Evaluate V(y) = -loss(theta, y) + c(y, anchor) / (2 tau).

    ``y`` may be a single point ``(d,)`` or a batch ``(m, d)``.
    """
    anchor, y = _check_point(problem, anchor, y)
    loss = problem.loss.value(theta, y, label)
    return -loss + problem.cost.value(y, anchor) / (2.0 * problem.tau)


def tilted_gradient(
    problem: RobustProblem,
    theta: Vector,
    anchor: Vector,
    y: PointInput,
    label: Label = None,
) -> np.ndarray:
    """Gradient of the tilted potential in y: -grad_y loss + (y - anchor) / tau."""
    anchor, y = _check_point(problem, anchor, y)
    grad_loss = problem.loss.grad_input(theta, y, label)
    return -grad_loss + problem.cost.grad(y, anchor) / (2.0 * problem.tau)

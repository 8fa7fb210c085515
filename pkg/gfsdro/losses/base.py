from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, List, Literal, Optional, Tuple

import numpy as np

from gfsdro.utils import (
    DimensionMismatchError,
    InvalidArgumentError,
    Label,
    LabelInput,
    PointInput,
    Vector,
    get_logger,
    relative_error,
)

logger = get_logger(__name__)

LossFamily = Literal["mlp-bce", "softmax-logistic", "uncertain-ls", "linear"]

FD_STEP = 1e-5


class LossOracle(ABC):
    """Abstract base class for parameterized loss families.

    An oracle carries only shape metadata and is immutable; the parameter
    vector theta is passed to every call, so evaluation from several threads
    is safe. Points are feature vectors; labels travel separately and are
    never differentiated.

    Every evaluation accepts either one point ``(d,)`` or a batch ``(m, d)``:
    ``value`` returns a scalar or ``(m,)``, ``grad_input`` the shape of the
    input, ``grad_theta`` ``(p,)`` or ``(m, p)``.

    Example:
        ```python
        class QuadraticLoss(LossOracle):
            family = "quadratic"
            ...
        ```
    """

    family: str = ""

    @property
    @abstractmethod
    def input_dim(self) -> int:
        pass

    @property
    @abstractmethod
    def n_params(self) -> int:
        pass

    @abstractmethod
    def _value(self, theta: Vector, x: np.ndarray, labels: Optional[np.ndarray]) -> np.ndarray:
        pass

    @abstractmethod
    def _grad_theta(self, theta: Vector, x: np.ndarray, labels: Optional[np.ndarray]) -> np.ndarray:
        pass

    @abstractmethod
    def _grad_input(self, theta: Vector, x: np.ndarray, labels: Optional[np.ndarray]) -> np.ndarray:
        pass

    @abstractmethod
    def init_params(self, rng: np.random.Generator) -> Vector:
        pass

    def random_params(self, rng: np.random.Generator) -> Vector:
        """Generic parameter draw used by gradient checks."""
        return rng.normal(scale=0.5, size=self.n_params)

    def random_label(self, rng: np.random.Generator) -> Label:
        return None

    def random_point(self, rng: np.random.Generator) -> Tuple[Vector, Label]:
        return rng.normal(size=self.input_dim), self.random_label(rng)

    def predict(self, theta: Vector, x: PointInput) -> np.ndarray:
        raise InvalidArgumentError(f"Loss family '{self.family}' is not a classifier")

    def value(self, theta: Vector, x: PointInput, label: LabelInput = None):
        theta, batch, labels, single = self._prepare(theta, x, label)
        out = self._value(theta, batch, labels)
        return float(out[0]) if single else out

    def grad_theta(self, theta: Vector, x: PointInput, label: LabelInput = None) -> np.ndarray:
        theta, batch, labels, single = self._prepare(theta, x, label)
        out = self._grad_theta(theta, batch, labels)
        return out[0] if single else out

    def grad_input(self, theta: Vector, x: PointInput, label: LabelInput = None) -> np.ndarray:
        theta, batch, labels, single = self._prepare(theta, x, label)
        out = self._grad_input(theta, batch, labels)
        return out[0] if single else out

    def _prepare(self, theta, x, label):
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.n_params,):
            raise DimensionMismatchError("parameter vector", (self.n_params,), theta.shape)
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        batch = x[None, :] if single else x
        if batch.ndim != 2 or batch.shape[1] != self.input_dim:
            raise DimensionMismatchError("point", f"(..., {self.input_dim})", x.shape)
        labels = None
        if label is not None:
            labels = np.broadcast_to(np.asarray(label), (batch.shape[0],))
        return theta, batch, labels, single

    def _require_labels(self, labels: Optional[np.ndarray]) -> np.ndarray:
        if labels is None:
            raise InvalidArgumentError(f"Loss family '{self.family}' needs a label")
        return labels


@dataclass
class GradCheckReport:
    """Worst relative errors of analytic gradients against central differences"""

    family: str
    n_points: int
    theta_errors: List[float] = field(default_factory=list)
    input_errors: List[float] = field(default_factory=list)

    @property
    def max_theta_error(self) -> Optional[float]:
        return max(self.theta_errors) if self.theta_errors else None

    @property
    def max_input_error(self) -> Optional[float]:
        return max(self.input_errors) if self.input_errors else None

    def passed(self, tolerance: float = 1e-5) -> bool:
        return all(e < tolerance for e in self.theta_errors + self.input_errors)


def _central_difference(f, point: np.ndarray, step: float) -> np.ndarray:
    grad = np.empty_like(point)
    for k in range(point.size):
        up = point.copy()
        down = point.copy()
        up[k] += step
        down[k] -= step
        grad[k] = (f(up) - f(down)) / (2.0 * step)
    return grad


def finite_diff_check(
    oracle: LossOracle, n_points: int, seed: int, step: float = FD_STEP
) -> GradCheckReport:
    """
    Compare analytic gradients with central differences at random points.

    Args:
        oracle: Loss family to check
        n_points: Number of random (theta, point) pairs
        seed: Seed for the random draws
        step: Central difference step

    Returns:
        Report with the relative error of grad_theta and grad_input per point
    """
    report = GradCheckReport(family=oracle.family, n_points=n_points)
    rng = np.random.default_rng(seed)

    for _ in range(n_points):
        theta = oracle.random_params(rng)
        x, label = oracle.random_point(rng)

        fd_theta = _central_difference(lambda t: oracle.value(t, x, label), theta, step)
        fd_input = _central_difference(lambda z: oracle.value(theta, z, label), x, step)

        report.theta_errors.append(
            relative_error(oracle.grad_theta(theta, x, label), fd_theta)
        )
        report.input_errors.append(
            relative_error(oracle.grad_input(theta, x, label), fd_input)
        )

    logger.debug(
        f"Gradient check {oracle.family}: theta={report.max_theta_error}, "
        f"input={report.max_input_error}"
    )
    return report


def get_loss_oracle(family: LossFamily, **shape: Any) -> LossOracle:
    """
    Get the loss oracle for the specified family.

    Args:
        family: The loss family (e.g., 'mlp-bce')
        **shape: Shape metadata forwarded to the family's constructor

    Returns:
        An instance of the requested loss oracle
    """
    # Conditional imports to avoid circular import
    if family == "mlp-bce":
        from gfsdro.losses.mlp import MlpBceLoss

        return MlpBceLoss(**shape)
    elif family == "softmax-logistic":
        from gfsdro.losses.softmax import SoftmaxLogisticLoss

        return SoftmaxLogisticLoss(**shape)
    elif family == "uncertain-ls":
        from gfsdro.losses.least_squares import UncertainLeastSquaresLoss

        return UncertainLeastSquaresLoss(**shape)
    elif family == "linear":
        from gfsdro.losses.linear import LinearLoss

        return LinearLoss(**shape)
    else:
        raise InvalidArgumentError(f"Unknown loss family: {family}")

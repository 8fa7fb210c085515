"""Multiclass logistic regression: h_B(x, y) = -y^T B^T x + log(1^T exp(B^T x))."""

import numpy as np
from scipy.special import logsumexp, softmax

from gfsdro.losses.base import LossOracle
from gfsdro.utils import InvalidArgumentError, Label, PointInput, Vector


class SoftmaxLogisticLoss(LossOracle):
    """Negative log-likelihood of a bias-free linear softmax classifier.

    ``theta`` is ``B.ravel()`` with ``B`` of shape ``(input_dim, n_classes)``.
    """

    family = "softmax-logistic"

    def __init__(self, input_dim: int, n_classes: int):
        if input_dim < 1 or n_classes < 2:
            raise InvalidArgumentError(
                f"softmax-logistic needs input_dim >= 1 and n_classes >= 2, "
                f"got {input_dim} and {n_classes}"
            )
        self._input_dim = input_dim
        self.n_classes = n_classes

    @property
    def input_dim(self) -> int:
        return self._input_dim

    @property
    def n_params(self) -> int:
        return self._input_dim * self.n_classes

    def matrix(self, theta: Vector) -> np.ndarray:
        return theta.reshape(self._input_dim, self.n_classes)

    def init_params(self, rng: np.random.Generator) -> Vector:
        return np.zeros(self.n_params)

    def random_label(self, rng: np.random.Generator) -> Label:
        return int(rng.integers(0, self.n_classes))

    def _one_hot(self, labels) -> np.ndarray:
        labels = self._require_labels(labels).astype(int)
        if np.any((labels < 0) | (labels >= self.n_classes)):
            raise InvalidArgumentError(f"Class labels must lie in [0, {self.n_classes})")
        return np.eye(self.n_classes)[labels]

    def scores(self, theta: Vector, x: PointInput) -> np.ndarray:
        theta, batch, _, single = self._prepare(theta, x, None)
        out = batch @ self.matrix(theta)
        return out[0] if single else out

    def predict(self, theta: Vector, x: PointInput) -> np.ndarray:
        # argmax returns the first maximum, so ties go to the lower class
        return np.argmax(np.atleast_2d(self.scores(theta, x)), axis=1)

    def _value(self, theta, x, labels):
        Y = self._one_hot(labels)
        logits = x @ self.matrix(theta)
        return logsumexp(logits, axis=1) - np.sum(Y * logits, axis=1)

    def _residual(self, theta, x, labels):
        Y = self._one_hot(labels)
        return softmax(x @ self.matrix(theta), axis=1) - Y

    def _grad_theta(self, theta, x, labels):
        R = self._residual(theta, x, labels)
        return (x[:, :, None] * R[:, None, :]).reshape(x.shape[0], -1)

    def _grad_input(self, theta, x, labels):
        R = self._residual(theta, x, labels)
        return R @ self.matrix(theta).T

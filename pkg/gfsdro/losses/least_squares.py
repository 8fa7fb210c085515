"""Least squares with an uncertain system matrix A(xi) = A0 + xi A1.

The perturbed variable is the scalar xi, so points are 1-vectors and there is
no label.
"""

import numpy as np

from gfsdro.losses.base import LossOracle
from gfsdro.utils import DimensionMismatchError, Vector


class UncertainLeastSquaresLoss(LossOracle):
    family = "uncertain-ls"

    def __init__(self, A0, A1, b):
        self.A0 = np.asarray(A0, dtype=np.float64)
        self.A1 = np.asarray(A1, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        if self.A0.shape != self.A1.shape or self.A0.ndim != 2:
            raise DimensionMismatchError("A1", self.A0.shape, self.A1.shape)
        if self.b.shape != (self.A0.shape[0],):
            raise DimensionMismatchError("b", (self.A0.shape[0],), self.b.shape)

    @property
    def input_dim(self) -> int:
        return 1

    @property
    def n_params(self) -> int:
        return self.A0.shape[1]

    def init_params(self, rng: np.random.Generator) -> Vector:
        return np.zeros(self.n_params)

    def system_matrix(self, xi: float) -> np.ndarray:
        return self.A0 + xi * self.A1

    def _residual(self, theta, x):
        xi = x[:, 0]
        return (self.A0 @ theta)[None, :] + xi[:, None] * (self.A1 @ theta)[None, :] - self.b

    def _value(self, theta, x, labels):
        r = self._residual(theta, x)
        return np.sum(r * r, axis=1)

    def _grad_theta(self, theta, x, labels):
        r = self._residual(theta, x)
        xi = x[:, 0]
        return 2.0 * (r @ self.A0 + xi[:, None] * (r @ self.A1))

    def _grad_input(self, theta, x, labels):
        r = self._residual(theta, x)
        return 2.0 * (r @ (self.A1 @ theta))[:, None]

import numpy as np

from gfsdro.losses.base import LossOracle
from gfsdro.utils import InvalidArgumentError, Vector


class LinearLoss(LossOracle):
    """loss(theta, y) = theta . y

    With theta = a the conditional worst-case law is N(x + tau a, (eps/2) I),
    which makes this family the closed-form reference for every sampler.
    """

    family = "linear"

    def __init__(self, input_dim: int):
        if input_dim < 1:
            raise InvalidArgumentError(f"input_dim must be >= 1, got {input_dim}")
        self._input_dim = input_dim

    @property
    def input_dim(self) -> int:
        return self._input_dim

    @property
    def n_params(self) -> int:
        return self._input_dim

    def init_params(self, rng: np.random.Generator) -> Vector:
        return np.zeros(self._input_dim)

    def _value(self, theta, x, labels):
        return x @ theta

    def _grad_theta(self, theta, x, labels):
        return x.copy()

    def _grad_input(self, theta, x, labels):
        return np.broadcast_to(theta, x.shape).copy()

"""ReLU multilayer perceptron with a sigmoid cross-entropy head."""

from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.special import expit

from gfsdro.losses.base import LossOracle
from gfsdro.utils import Label, PointInput, Vector


class MlpArchitecture(BaseModel):
    """Layer widths of a scalar-logit ReLU network"""

    model_config = ConfigDict(frozen=True)

    input_dim: int = Field(..., gt=0, description="Width of the input layer")
    hidden: Tuple[int, ...] = Field(..., description="Hidden layer widths")

    @field_validator("hidden")
    def needs_hidden_layer(cls, v):
        if len(v) < 1 or any(w < 1 for w in v):
            raise ValueError("MLP needs at least one hidden layer of positive width")
        return tuple(v)

    @property
    def layer_sizes(self) -> List[int]:
        return [self.input_dim, *self.hidden, 1]

    @property
    def n_params(self) -> int:
        sizes = self.layer_sizes
        return sum(n_out * n_in + n_out for n_in, n_out in zip(sizes[:-1], sizes[1:]))


class MlpBceLoss(LossOracle):
    """
    Binary cross-entropy of a ReLU MLP with labels in {0, 1}.

    Parameters are flattened layer by layer as ``W`` (out x in, row-major)
    followed by ``b``.
    """

    family = "mlp-bce"

    def __init__(self, input_dim: int, hidden: Tuple[int, ...] = (4,)):
        self.architecture = MlpArchitecture(input_dim=input_dim, hidden=tuple(hidden))

    @property
    def input_dim(self) -> int:
        return self.architecture.input_dim

    @property
    def n_params(self) -> int:
        return self.architecture.n_params

    def unpack(self, theta: Vector) -> List[Tuple[np.ndarray, np.ndarray]]:
        layers = []
        offset = 0
        sizes = self.architecture.layer_sizes
        for n_in, n_out in zip(sizes[:-1], sizes[1:]):
            W = theta[offset : offset + n_out * n_in].reshape(n_out, n_in)
            offset += n_out * n_in
            b = theta[offset : offset + n_out]
            offset += n_out
            layers.append((W, b))
        return layers

    def init_params(self, rng: np.random.Generator) -> Vector:
        """He initialisation: W ~ N(0, 2 / fan_in), zero biases."""
        chunks = []
        sizes = self.architecture.layer_sizes
        for n_in, n_out in zip(sizes[:-1], sizes[1:]):
            chunks.append(rng.normal(scale=np.sqrt(2.0 / n_in), size=n_out * n_in))
            chunks.append(np.zeros(n_out))
        return np.concatenate(chunks)

    def random_label(self, rng: np.random.Generator) -> Label:
        return int(rng.integers(0, 2))

    def _forward(self, theta: Vector, x: np.ndarray):
        layers = self.unpack(theta)
        activations = [x]
        pre_activations = []
        a = x
        for k, (W, b) in enumerate(layers):
            z = a @ W.T + b
            pre_activations.append(z)
            a = z if k == len(layers) - 1 else np.maximum(z, 0.0)
            activations.append(a)
        return layers, activations, pre_activations

    def logits(self, theta: Vector, x: PointInput) -> np.ndarray:
        theta, batch, _, single = self._prepare(theta, x, None)
        _, activations, _ = self._forward(theta, batch)
        out = activations[-1][:, 0]
        return out[0] if single else out

    def predict(self, theta: Vector, x: PointInput) -> np.ndarray:
        # logit 0 goes to class 0
        return (np.atleast_1d(self.logits(theta, x)) > 0).astype(int)

    def _value(self, theta, x, labels):
        y = self._require_labels(labels).astype(np.float64)
        _, activations, _ = self._forward(theta, x)
        z = activations[-1][:, 0]
        return np.logaddexp(0.0, z) - y * z

    def _backward(self, theta, x, labels):
        y = self._require_labels(labels).astype(np.float64)
        layers, activations, pre_activations = self._forward(theta, x)
        z = activations[-1][:, 0]
        delta = (expit(z) - y)[:, None]

        grads = []
        for k in range(len(layers) - 1, -1, -1):
            W, _ = layers[k]
            a_prev = activations[k]
            dW = delta[:, :, None] * a_prev[:, None, :]
            grads.append((dW.reshape(x.shape[0], -1), delta))
            delta = delta @ W
            if k > 0:
                delta = delta * (pre_activations[k - 1] > 0)
        grads.reverse()
        return grads, delta

    def _grad_theta(self, theta, x, labels):
        grads, _ = self._backward(theta, x, labels)
        return np.concatenate([piece for dW, db in grads for piece in (dW, db)], axis=1)

    def _grad_input(self, theta, x, labels):
        _, dx = self._backward(theta, x, labels)
        return dx

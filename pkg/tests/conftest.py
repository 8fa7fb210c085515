import numpy as np
import pytest

from gfsdro.losses import LinearLoss
from gfsdro.problem import RobustnessParams, RobustProblem


@pytest.fixture(autouse=True)
def serial_workers(monkeypatch):
    """Keep tests serial unless a test opts into threads."""
    monkeypatch.setenv("GFSDRO_THREADS", "0")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def linear_problem():
    """loss = a . y with tau = eps = 0.5: worst case N(x + a/2, 0.25 I)."""
    return RobustProblem(LinearLoss(2), RobustnessParams(tau=0.5, epsilon=0.5))


@pytest.fixture
def direction():
    return np.array([1.0, 0.0])


def central_difference(f, point, step=1e-5):
    grad = np.empty_like(point)
    for k in range(point.size):
        up, down = point.copy(), point.copy()
        up[k] += step
        down[k] -= step
        grad[k] = (f(up) - f(down)) / (2 * step)
    return grad

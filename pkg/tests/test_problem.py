import numpy as np
import pytest
from pydantic import ValidationError

from conftest import central_difference
from gfsdro.data import gen_uncertain_ls
from gfsdro.losses import LinearLoss, MlpBceLoss, SoftmaxLogisticLoss
from gfsdro.problem import (
    CostFunction,
    ParticleCloud,
    RobustnessParams,
    RobustProblem,
    normalize_log_weights,
    normalize_weights,
    tilted_gradient,
    tilted_potential,
)
from gfsdro.utils import DegenerateWeightsError, DimensionMismatchError, InvalidArgumentError, relative_error


def _problem(oracle, tau=0.7, epsilon=0.3):
    return RobustProblem(oracle, RobustnessParams(tau=tau, epsilon=epsilon))


ORACLES = [
    LinearLoss(3),
    MlpBceLoss(2, (4,)),
    MlpBceLoss(3, (16,)),
    SoftmaxLogisticLoss(4, 3),
    gen_uncertain_ls(0).oracle(),
]


def test_params_reject_nonpositive_tau():
    with pytest.raises(ValidationError):
        RobustnessParams(tau=-1.0, epsilon=0.1)
    with pytest.raises(ValidationError):
        RobustnessParams(tau=1.0, epsilon=-0.1)
    assert RobustnessParams(tau=1.0, epsilon=0.0).epsilon == 0.0


def test_cost_is_zero_on_diagonal_and_symmetric():
    cost = CostFunction()
    x = np.array([1.0, -2.0])
    y = np.array([0.5, 3.0])
    assert cost.value(x, x) == 0.0
    assert cost.value(x, y) == cost.value(y, x) > 0


def test_problem_rejects_mismatched_cost_dimension():
    with pytest.raises(DimensionMismatchError):
        RobustProblem(LinearLoss(2), RobustnessParams(tau=1, epsilon=0), CostFunction(dim=3))


class TestTiltedPotential:
    def test_zero_loss_at_anchor(self):
        problem = _problem(LinearLoss(2), tau=0.5)
        assert tilted_potential(problem, np.zeros(2), np.zeros(2), np.zeros(2)) == 0.0

    def test_linear_loss_value(self):
        problem = _problem(LinearLoss(2), tau=0.5)
        value = tilted_potential(problem, np.array([1.0, 0.0]), np.zeros(2), np.array([1.0, 0.0]))
        assert value == pytest.approx(0.0, abs=1e-15)

    def test_cost_only(self):
        problem = _problem(LinearLoss(2), tau=0.5)
        value = tilted_potential(problem, np.zeros(2), np.zeros(2), np.array([3.0, 4.0]))
        assert value == pytest.approx(25.0, rel=1e-12)

    def test_batch_matches_single_points(self, rng):
        problem = _problem(SoftmaxLogisticLoss(4, 3))
        theta = rng.normal(size=12)
        anchor = rng.normal(size=4)
        ys = rng.normal(size=(5, 4))
        batch = tilted_potential(problem, theta, anchor, ys, 2)
        singles = [tilted_potential(problem, theta, anchor, y, 2) for y in ys]
        np.testing.assert_allclose(batch, singles, rtol=1e-12)

    @pytest.mark.parametrize("oracle", ORACLES, ids=lambda o: o.family)
    def test_at_anchor_equals_negative_loss(self, oracle, rng):
        problem = _problem(oracle)
        for _ in range(5):
            theta = oracle.random_params(rng)
            anchor, label = oracle.random_point(rng)
            value = tilted_potential(problem, theta, anchor, anchor, label)
            assert value == pytest.approx(-oracle.value(theta, anchor, label), rel=1e-12)

    def test_dimension_mismatch(self):
        problem = _problem(LinearLoss(2))
        with pytest.raises(InvalidArgumentError):
            tilted_potential(problem, np.zeros(2), np.zeros(3), np.zeros(2))
        with pytest.raises(InvalidArgumentError):
            tilted_potential(problem, np.zeros(2), np.zeros(2), np.zeros(3))

    def test_one_anchor_per_row(self, rng):
        oracle = MlpBceLoss(2, (4,))
        problem = _problem(oracle)
        theta = oracle.random_params(rng)
        anchors = rng.normal(size=(5, 2))
        points = rng.normal(size=(5, 2))
        labels = np.array([0, 1, 1, 0, 1])
        stacked = tilted_potential(problem, theta, anchors, points, labels)
        grads = tilted_gradient(problem, theta, anchors, points, labels)
        for k in range(5):
            assert stacked[k] == pytest.approx(
                tilted_potential(problem, theta, anchors[k], points[k], labels[k]), rel=1e-12
            )
            np.testing.assert_allclose(
                grads[k], tilted_gradient(problem, theta, anchors[k], points[k], labels[k]), rtol=1e-12
            )
        with pytest.raises(DimensionMismatchError):
            tilted_potential(problem, theta, anchors[:3], points, labels)


class TestTiltedGradient:
    def test_zero_at_anchor_without_loss(self):
        problem = _problem(LinearLoss(2))
        grad = tilted_gradient(problem, np.zeros(2), np.ones(2), np.ones(2))
        np.testing.assert_array_equal(grad, np.zeros(2))

    def test_linear_loss_value(self):
        problem = _problem(LinearLoss(2), tau=1.0)
        grad = tilted_gradient(problem, np.array([1.0, 0.0]), np.zeros(2), np.array([2.0, 0.0]))
        np.testing.assert_allclose(grad, [1.0, 0.0])

    @pytest.mark.parametrize("oracle", ORACLES, ids=lambda o: o.family)
    def test_matches_finite_differences(self, oracle, rng):
        problem = _problem(oracle)
        for _ in range(20):
            theta = oracle.random_params(rng)
            anchor, label = oracle.random_point(rng)
            y, _ = oracle.random_point(rng)
            numeric = central_difference(
                lambda z: tilted_potential(problem, theta, anchor, z, label), y
            )
            analytic = tilted_gradient(problem, theta, anchor, y, label)
            assert relative_error(analytic, numeric) < 1e-5


class TestNormalizeWeights:
    def test_uniform(self):
        cloud = ParticleCloud.from_weights(np.zeros((2, 1)), [2.0, 2.0], np.zeros(1))
        np.testing.assert_allclose(cloud.weights, [0.5, 0.5])

    def test_tiny_log_weights_do_not_underflow(self):
        w = np.exp(normalize_log_weights(np.array([-1000.0, -1001.0])))
        e = np.e
        np.testing.assert_allclose(w, [e / (1 + e), 1 / (1 + e)], rtol=1e-12)

    def test_single_particle(self):
        cloud = ParticleCloud.at_anchor(np.zeros(3), 1)
        assert normalize_weights(cloud).weights[0] == 1.0

    def test_idempotent_and_scale_invariant(self, rng):
        raw = rng.uniform(0.1, 2.0, size=6)
        positions = rng.normal(size=(6, 2))
        once = ParticleCloud.from_weights(positions, raw, np.zeros(2))
        twice = normalize_weights(once)
        scaled = ParticleCloud.from_weights(positions, 7.5 * raw, np.zeros(2))
        np.testing.assert_allclose(twice.weights, once.weights, rtol=1e-12)
        np.testing.assert_allclose(scaled.weights, once.weights, rtol=1e-12)
        assert once.on_simplex()

    def test_all_zero_weights_are_degenerate(self):
        with pytest.raises(DegenerateWeightsError):
            normalize_log_weights(np.array([-np.inf, -np.inf]))

    def test_cloud_shape_checks(self):
        with pytest.raises(DimensionMismatchError):
            ParticleCloud(np.zeros((2, 2)), np.zeros(3), np.zeros(2))
        with pytest.raises(DimensionMismatchError):
            ParticleCloud(np.zeros((2, 2)), np.zeros(2), np.zeros(3))

    def test_rows_are_normalized_independently(self):
        log_w = np.log(np.array([[1.0, 3.0], [2.0, 2.0]]))
        np.testing.assert_allclose(np.exp(normalize_log_weights(log_w)), [[0.25, 0.75], [0.5, 0.5]])
        with pytest.raises(DegenerateWeightsError):
            normalize_log_weights(np.array([[0.0, 0.0], [-np.inf, -np.inf]]))

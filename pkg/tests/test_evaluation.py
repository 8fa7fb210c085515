import numpy as np
import pytest
from pydantic import ValidationError

from gfsdro.data import LabeledDataset, gen_two_moons
from gfsdro.evaluation import (
    AttackConfig,
    InnerCurve,
    inner_objective_curve,
    mean_test_loss,
    misclassification_rate,
    pgd_attack_l2,
    reference_norm,
    robustness_curve,
    quadrant_fraction,
)
from gfsdro.evaluation.inner import _record_points
from gfsdro.losses import LinearLoss, MlpBceLoss, SoftmaxLogisticLoss
from gfsdro.problem import ParticleCloud, RobustnessParams, RobustProblem
from gfsdro.samplers import SamplerConfig
from gfsdro.utils import InvalidArgumentError


class TestPgd:
    def test_zero_radius_is_identity(self, rng):
        oracle = MlpBceLoss(2, (4,))
        x = rng.normal(size=(5, 2))
        out = pgd_attack_l2(oracle, oracle.random_params(rng), x, np.ones(5, dtype=int), 0.0)
        np.testing.assert_array_equal(out, x)
        assert out is not x

    def test_stays_in_ball(self, rng):
        oracle = MlpBceLoss(2, (8,))
        theta = oracle.random_params(rng)
        x = rng.normal(size=(20, 2))
        labels = rng.integers(0, 2, size=20)
        out = pgd_attack_l2(oracle, theta, x, labels, 0.3)
        assert np.all(np.linalg.norm(out - x, axis=1) <= 0.3 + 1e-12)

    def test_linear_loss_moves_along_parameters(self):
        oracle = LinearLoss(2)
        theta = np.array([3.0, 4.0])
        x = np.array([1.0, 1.0])
        out = pgd_attack_l2(oracle, theta, x, None, 0.5, steps=1, step_scale=1.0)
        assert oracle.value(theta, out) - oracle.value(theta, x) == pytest.approx(0.5 * 5.0)

    def test_zero_gradient_rows_stay(self):
        oracle = MlpBceLoss(2, (4,))
        theta = np.zeros(oracle.n_params)
        x = np.array([[0.2, 0.1]])
        np.testing.assert_array_equal(pgd_attack_l2(oracle, theta, x, [1], 1.0), x)

    def test_negative_radius(self):
        with pytest.raises(InvalidArgumentError):
            pgd_attack_l2(LinearLoss(2), np.ones(2), np.zeros(2), None, -1.0)


class TestErrorRates:
    def test_constant_prediction(self):
        oracle = SoftmaxLogisticLoss(2, 3)
        data = LabeledDataset(np.ones((4, 2)), np.array([0, 1, 2, 0]))
        assert misclassification_rate(oracle, np.zeros(6), data) == 0.5

    def test_needs_labels(self):
        data = LabeledDataset(np.ones((2, 2)), None)
        with pytest.raises(InvalidArgumentError):
            misclassification_rate(SoftmaxLogisticLoss(2, 3), np.zeros(6), data)

    def test_curve_starts_at_clean_error(self, rng):
        oracle = MlpBceLoss(2, (4,))
        theta = oracle.random_params(rng)
        data = gen_two_moons(n=40, seed=1)
        attack = AttackConfig(delta_grid=(0.0, 0.1, 0.5), steps=10)
        curve = robustness_curve(oracle, theta, data, attack)
        assert curve.shape == (3,)
        assert curve[0] == misclassification_rate(oracle, theta, data)
        assert np.all((curve >= 0) & (curve <= 1))

    def test_reference_norm(self):
        assert reference_norm(np.array([[3.0, 4.0], [0.0, 1.0]])) == 3.0

    def test_attack_grid_validation(self):
        with pytest.raises(ValidationError):
            AttackConfig(delta_grid=(-0.1,))
        with pytest.raises(ValidationError):
            AttackConfig(delta_grid=())

    def test_mean_test_loss(self):
        value = mean_test_loss(LinearLoss(1), np.array([2.0]), np.array([[1.0], [3.0]]))
        assert value == 4.0


class TestInnerCurve:
    def test_record_points(self):
        assert _record_points(25, 10) == [0, 10, 20, 25]
        assert _record_points(20, 10) == [0, 10, 20]
        assert _record_points(0, 5) == [0]

    def test_deterministic_descent_reaches_minimum(self):
        # V is quadratic with minimum -theta . x - tau |theta|^2 / 2 at x + tau theta
        problem = RobustProblem(LinearLoss(2), RobustnessParams(tau=0.5, epsilon=0.0))
        theta = np.array([1.0, 0.0])
        data = LabeledDataset(np.array([[0.0, 0.0], [2.0, 1.0]]), None)
        config = SamplerConfig(method="wrm", eta=0.05, T=300)
        curve = inner_objective_curve(problem, theta, data, config, record_every=10)
        assert curve.iterations[-1] == 300
        assert curve.values[0] == pytest.approx(-1.0)
        assert np.all(np.diff(curve.values) <= 1e-12)
        assert curve.values[-1] == pytest.approx(-1.0 - 0.25, abs=1e-8)
        assert curve.first_reaching(1.2) > 0
        assert curve.first_reaching(5.0) == -1

    def test_same_seed_same_curve(self):
        problem = RobustProblem(LinearLoss(2), RobustnessParams(tau=0.5, epsilon=0.5))
        data = LabeledDataset(np.random.default_rng(0).normal(size=(3, 2)), None)
        config = SamplerConfig(method="wfr", eta=0.05, T=20, m=4, eta_w=0.5)
        a = inner_objective_curve(problem, np.ones(2), data, config, 5, seed=2)
        b = inner_objective_curve(problem, np.ones(2), data, config, 5, seed=2)
        np.testing.assert_array_equal(a.values, b.values)


class TestQuadrantFraction:
    def test_weighted_share(self):
        first = ParticleCloud.from_weights(
            np.array([[1.0, 1.0], [-1.0, 1.0]]), [0.25, 0.75], np.zeros(2)
        )
        second = ParticleCloud.at_anchor(np.array([0.5, 0.5]), 3)
        assert quadrant_fraction([first, second]) == pytest.approx((0.25 + 1.0) / 2)

    def test_needs_planar_clouds(self):
        with pytest.raises(InvalidArgumentError):
            quadrant_fraction([ParticleCloud.at_anchor(np.zeros(3), 2)])
        with pytest.raises(InvalidArgumentError):
            quadrant_fraction([])

import numpy as np
import pytest

from gfsdro.data import gen_uncertain_ls
from gfsdro.losses import (
    LinearLoss,
    MlpArchitecture,
    MlpBceLoss,
    SoftmaxLogisticLoss,
    UncertainLeastSquaresLoss,
    finite_diff_check,
    get_loss_oracle,
)
from gfsdro.utils import DimensionMismatchError, InvalidArgumentError


class TestSoftmaxLogistic:
    def test_zero_matrix(self):
        oracle = SoftmaxLogisticLoss(3, 4)
        theta = np.zeros(12)
        x = np.array([1.0, -2.0, 0.5])
        assert oracle.value(theta, x, 2) == pytest.approx(np.log(4), rel=1e-12)
        expected = np.outer(x, np.full(4, 0.25) - np.eye(4)[2]).ravel()
        np.testing.assert_allclose(oracle.grad_theta(theta, x, 2), expected, atol=1e-15)
        np.testing.assert_array_equal(oracle.grad_input(theta, x, 2), np.zeros(3))

    def test_invariant_to_shared_logit_shift(self, rng):
        oracle = SoftmaxLogisticLoss(3, 4)
        B = rng.normal(size=(3, 4))
        shift = rng.normal(size=(3, 1))
        x = rng.normal(size=(6, 3))
        labels = rng.integers(0, 4, size=6)
        base = oracle.value(B.ravel(), x, labels)
        shifted = oracle.value((B + shift).ravel(), x, labels)
        np.testing.assert_allclose(shifted, base, rtol=1e-10)

    def test_label_out_of_range(self):
        oracle = SoftmaxLogisticLoss(2, 3)
        with pytest.raises(InvalidArgumentError):
            oracle.value(np.zeros(6), np.zeros(2), 3)

    def test_missing_label(self):
        oracle = SoftmaxLogisticLoss(2, 3)
        with pytest.raises(InvalidArgumentError):
            oracle.value(np.zeros(6), np.zeros(2))

    def test_predict_breaks_ties_to_lower_class(self):
        oracle = SoftmaxLogisticLoss(2, 3)
        assert oracle.predict(np.zeros(6), np.ones(2)).tolist() == [0]


class TestUncertainLeastSquares:
    def test_zero_parameters(self):
        instance = gen_uncertain_ls(seed=3)
        oracle = instance.oracle()
        xi = np.array([0.3])
        theta = np.zeros(oracle.n_params)
        assert oracle.value(theta, xi) == pytest.approx(instance.b @ instance.b, rel=1e-12)
        expected = -2.0 * oracle.system_matrix(0.3).T @ instance.b
        np.testing.assert_allclose(oracle.grad_theta(theta, xi), expected, rtol=1e-12)

    def test_quadratic_in_xi(self, rng):
        oracle = gen_uncertain_ls(seed=5).oracle()
        theta = rng.normal(size=oracle.n_params)
        values = [oracle.value(theta, np.array([xi])) for xi in (-1.0, 0.0, 1.0, 2.0)]
        # third finite difference of a quadratic vanishes
        third = values[3] - 3 * values[2] + 3 * values[1] - values[0]
        assert abs(third) < 1e-8 * max(1.0, max(values))

    def test_quadratic_in_theta(self, rng):
        oracle = gen_uncertain_ls(seed=2).oracle()
        xi = np.array([0.7])
        theta = rng.normal(size=oracle.n_params)
        zero = np.zeros(oracle.n_params)
        remainder = (
            oracle.value(theta, xi)
            - oracle.value(zero, xi)
            - theta @ oracle.grad_theta(zero, xi)
        )
        A = oracle.system_matrix(0.7)
        assert remainder == pytest.approx(np.sum((A @ theta) ** 2), rel=1e-10)

    def test_shape_checks(self):
        with pytest.raises(DimensionMismatchError):
            UncertainLeastSquaresLoss(np.eye(2), np.eye(3), np.zeros(2))
        with pytest.raises(DimensionMismatchError):
            UncertainLeastSquaresLoss(np.eye(2), np.eye(2), np.zeros(3))


class TestMlp:
    def test_architecture_counts(self):
        arch = MlpArchitecture(input_dim=2, hidden=(4,))
        assert arch.layer_sizes == [2, 4, 1]
        assert arch.n_params == 2 * 4 + 4 + 4 + 1
        assert MlpBceLoss(3, (16,)).n_params == 3 * 16 + 16 + 16 + 1

    def test_needs_hidden_layer(self):
        with pytest.raises(ValueError):
            MlpArchitecture(input_dim=2, hidden=())

    def test_zero_weights(self):
        oracle = MlpBceLoss(2, (4,))
        theta = np.zeros(oracle.n_params)
        x = np.array([0.7, -1.2])
        assert oracle.value(theta, x, 1) == pytest.approx(np.log(2), rel=1e-12)
        assert oracle.value(theta, x, 0) == pytest.approx(np.log(2), rel=1e-12)
        np.testing.assert_array_equal(oracle.grad_input(theta, x, 1), np.zeros(2))

    def test_logit_is_homogeneous_in_last_layer(self, rng):
        oracle = MlpBceLoss(2, (4,))
        theta = rng.normal(size=oracle.n_params)
        x = rng.normal(size=(5, 2))
        scaled = theta.copy()
        # last layer occupies the final 4 + 1 entries
        scaled[-5:] *= 3.0
        np.testing.assert_allclose(
            oracle.logits(scaled, x), 3.0 * oracle.logits(theta, x), rtol=1e-12
        )

    def test_unpack_layout(self):
        oracle = MlpBceLoss(2, (3,))
        theta = np.arange(oracle.n_params, dtype=float)
        (W1, b1), (W2, b2) = oracle.unpack(theta)
        assert W1.shape == (3, 2) and b1.tolist() == [6.0, 7.0, 8.0]
        assert W2.shape == (1, 3) and b2.tolist() == [12.0]

    def test_predict_zero_logit_is_class_zero(self):
        oracle = MlpBceLoss(2, (4,))
        assert oracle.predict(np.zeros(oracle.n_params), np.ones((3, 2))).tolist() == [0, 0, 0]


class TestLinear:
    def test_value_and_gradients(self):
        oracle = LinearLoss(3)
        theta = np.array([1.0, -2.0, 0.5])
        x = np.array([2.0, 1.0, 4.0])
        assert oracle.value(theta, x) == pytest.approx(2.0)
        np.testing.assert_array_equal(oracle.grad_theta(theta, x), x)
        np.testing.assert_array_equal(oracle.grad_input(theta, x), theta)

    def test_not_a_classifier(self):
        with pytest.raises(InvalidArgumentError):
            LinearLoss(2).predict(np.zeros(2), np.zeros(2))


def test_batch_matches_single_evaluation(rng):
    oracle = MlpBceLoss(3, (5,))
    theta = oracle.random_params(rng)
    x = rng.normal(size=(4, 3))
    labels = np.array([0, 1, 1, 0])
    batch_grads = oracle.grad_theta(theta, x, labels)
    for k in range(4):
        np.testing.assert_allclose(batch_grads[k], oracle.grad_theta(theta, x[k], labels[k]))
        assert oracle.value(theta, x[k], labels[k]) == pytest.approx(
            oracle.value(theta, x, labels)[k]
        )


def test_parameter_shape_is_checked():
    with pytest.raises(DimensionMismatchError):
        LinearLoss(2).value(np.zeros(3), np.zeros(2))
    with pytest.raises(DimensionMismatchError):
        LinearLoss(2).value(np.zeros(2), np.zeros(3))


@pytest.mark.parametrize(
    "oracle",
    [
        MlpBceLoss(2, (4,)),
        MlpBceLoss(3, (16,)),
        SoftmaxLogisticLoss(5, 3),
        gen_uncertain_ls(0).oracle(),
        LinearLoss(3),
    ],
    ids=lambda o: o.family,
)
def test_analytic_gradients_match_finite_differences(oracle):
    report = finite_diff_check(oracle, n_points=20, seed=0)
    assert len(report.theta_errors) == 20
    assert report.passed(1e-5), (report.max_theta_error, report.max_input_error)


def test_empty_gradient_check():
    report = finite_diff_check(LinearLoss(2), n_points=0, seed=0)
    assert report.max_theta_error is None
    assert report.passed()


class _BrokenLinear(LinearLoss):
    def _grad_theta(self, theta, x, labels):
        return 2.0 * x


def test_gradient_check_detects_wrong_gradient():
    report = finite_diff_check(_BrokenLinear(3), n_points=5, seed=1)
    assert report.max_theta_error > 1e-2
    assert not report.passed()


def test_factory():
    assert isinstance(get_loss_oracle("mlp-bce", input_dim=2), MlpBceLoss)
    assert isinstance(get_loss_oracle("softmax-logistic", input_dim=4, n_classes=3), SoftmaxLogisticLoss)
    assert isinstance(get_loss_oracle("linear", input_dim=2), LinearLoss)
    with pytest.raises(InvalidArgumentError):
        get_loss_oracle("hinge", input_dim=2)

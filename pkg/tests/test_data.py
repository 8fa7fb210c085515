import numpy as np
import pytest

from gfsdro.data import (
    LabeledDataset,
    gen_biased_circle,
    gen_synthetic_features,
    gen_two_moons,
    gen_uncertain_ls,
    load_features,
    save_features,
    split_dataset,
    to_binary_labels,
)
from gfsdro.utils import FeatureParseError, InvalidArgumentError


class TestBiasedCircle:
    def test_margin_and_missing_quadrant(self):
        data = gen_biased_circle(n_raw=500, seed=1)
        radius = np.linalg.norm(data.features, axis=1)
        assert data.n == 500
        assert np.all((radius <= np.sqrt(2) / 1.3) | (radius >= 1.3 * np.sqrt(2)))
        assert not np.any((data.features[:, 0] > 0) & (data.features[:, 1] > 0))
        np.testing.assert_array_equal(data.labels, np.where(radius > np.sqrt(2), 1, -1))

    def test_inner_class_dominates(self):
        data = gen_biased_circle(n_raw=2000, seed=0)
        negatives = np.mean(data.labels == -1)
        assert 0.5 < negatives < 0.75

    def test_unbiased_version_covers_quadrant(self):
        data = gen_biased_circle(n_raw=400, seed=2, biased=False)
        assert np.any((data.features[:, 0] > 0) & (data.features[:, 1] > 0))
        assert data.name == "circle"

    def test_deterministic(self):
        a = gen_biased_circle(n_raw=50, seed=7)
        b = gen_biased_circle(n_raw=50, seed=7)
        np.testing.assert_array_equal(a.features, b.features)

    def test_binary_labels(self):
        data = to_binary_labels(gen_biased_circle(n_raw=30, seed=0))
        assert set(np.unique(data.labels).tolist()) <= {0, 1}
        assert data.n_classes == 2


class TestTwoMoons:
    def test_counts_and_order(self):
        data = gen_two_moons(n=200, positive_fraction=0.9, seed=0)
        assert data.n == 200
        assert np.sum(data.labels == 1) == 180
        assert np.all(data.labels[:180] == 1) and np.all(data.labels[180:] == 0)

    def test_noiseless_geometry(self):
        data = gen_two_moons(n=50, noise_sigma=0.0, positive_fraction=0.6, seed=3)
        upper = data.features[data.labels == 1]
        lower = data.features[data.labels == 0]
        np.testing.assert_allclose(np.linalg.norm(upper, axis=1), 1.0)
        assert np.all(upper[:, 1] >= 0)
        np.testing.assert_allclose(np.linalg.norm(lower - [1.0, 0.5], axis=1), 1.0)
        assert np.all(lower[:, 1] <= 0.5)

    def test_invalid_fraction(self):
        with pytest.raises(InvalidArgumentError):
            gen_two_moons(n=10, positive_fraction=1.0)


class TestUncertainLs:
    def test_shapes_and_range(self):
        instance = gen_uncertain_ls(seed=0)
        assert instance.A0.shape == instance.A1.shape == (10, 10)
        assert instance.b.shape == (10,)
        assert np.all(np.abs(instance.train_xi) <= 0.5)
        assert instance.train_dataset().features.shape == (10, 1)
        assert instance.train_dataset().labels is None

    def test_shifted_test_draws(self, rng):
        instance = gen_uncertain_ls(seed=0)
        draws = instance.sample_test(3.0, 1000, rng)
        assert draws.shape == (1000, 1)
        assert np.all(np.abs(draws) <= 2.0)
        assert np.max(np.abs(draws)) > 1.5
        with pytest.raises(InvalidArgumentError):
            instance.sample_test(-0.1, 5, rng)


class TestSyntheticFeatures:
    def test_balanced_classes(self):
        data = gen_synthetic_features(n=103, d=12, classes=10, margin=4.0, seed=0)
        counts = np.bincount(data.labels, minlength=10)
        assert counts.max() - counts.min() <= 1
        assert data.n_classes == 10

    def test_needs_room_for_classes(self):
        with pytest.raises(InvalidArgumentError):
            gen_synthetic_features(n=10, d=3, classes=4, margin=1.0)

    def test_class_means_are_separated(self):
        data = gen_synthetic_features(n=4000, d=4, classes=2, margin=4.0, seed=1, noise=0.5)
        means = np.stack([data.features[data.labels == c].mean(axis=0) for c in range(2)])
        assert np.linalg.norm(means[0] - means[1]) == pytest.approx(4.0, abs=0.1)


def test_split_is_disjoint_and_complete():
    data = gen_synthetic_features(n=50, d=3, classes=3, margin=2.0)
    train, test = split_dataset(data, 0.2, seed=4)
    assert (train.n, test.n) == (40, 10)
    rows = np.concatenate([train.features, test.features])
    assert np.unique(rows, axis=0).shape[0] == 50


class TestFeatureFiles:
    def test_round_trip(self, tmp_path):
        data = gen_synthetic_features(n=20, d=5, classes=3, margin=2.0, seed=2)
        path = save_features(data, tmp_path / "features.txt")
        loaded = load_features(path)
        np.testing.assert_array_equal(loaded.features, data.features)
        np.testing.assert_array_equal(loaded.labels, data.labels)
        assert loaded.n_classes == 3
        assert b"\r" not in path.read_bytes()

    @pytest.mark.parametrize(
        "text, line",
        [
            ("not a header\n1.0 0\n", 1),
            ("gfsdro-features v1 n=1 d=1 classes=2\n", 2),
            ("gfsdro-features v1 n=2 d=1 classes=2\n0.5 1\n", 3),
            ("gfsdro-features v1 n=1 d=2 classes=2\n0.5 1\n", 2),
            ("gfsdro-features v1 n=1 d=1 classes=2\nabc 1\n", 2),
            ("gfsdro-features v1 n=1 d=1 classes=2\n0.5 x\n", 2),
            ("gfsdro-features v1 n=2 d=1 classes=2\n0.5 1\n0.1 2\n", 3),
        ],
    )
    def test_malformed_files(self, tmp_path, text, line):
        path = tmp_path / "bad.txt"
        path.write_text(text)
        with pytest.raises(FeatureParseError) as info:
            load_features(path)
        assert info.value.line == line

    def test_non_ascii_byte(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_bytes(b"gfsdro-features v1 n=1 d=3 classes=2\n1.0 \xff 2.0\n")
        with pytest.raises(FeatureParseError) as info:
            load_features(path)
        assert info.value.line == 2
        assert "non-ASCII" in str(info.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_features(tmp_path / "nope.txt")

    def test_unlabelled_dataset_cannot_be_saved(self, tmp_path):
        data = LabeledDataset(np.zeros((2, 2)), None)
        with pytest.raises(InvalidArgumentError):
            save_features(data, tmp_path / "x.txt")

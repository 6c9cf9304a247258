import numpy as np
import pytest

from nilmevents.errors import DatasetError
from nilmevents.models import DenseStateChangeClassifier, GruWindowClassifier
from nilmevents.nn import feedforward_parameter_count


def separable_data(n=600, seed=0, positive_watts=500.0, negative_watts=5.0):
    rng = np.random.default_rng(seed)
    y = (rng.random(n) < 0.3).astype(int)
    x = np.where(y == 1, positive_watts, negative_watts) + rng.normal(0, 0.5, n)
    return np.abs(x).reshape(-1, 1), y


class TestDenseClassifier:
    def test_default_geometry_reports_1244_parameters(self):
        clf = DenseStateChangeClassifier(epochs=0)
        X, y = separable_data(64)
        clf.fit(X, y)
        assert clf.n_parameters_ == 1244 == feedforward_parameter_count(18, 5)

    def test_learns_cleanly_separable_data(self):
        X, y = separable_data()
        clf = DenseStateChangeClassifier(epochs=30, random_state=1)
        clf.fit(X, y)
        assert clf.predict([[500.0]]).tolist() == [1]
        assert clf.predict([[5.0]]).tolist() == [0]

    def test_loss_decreases_after_first_epoch(self):
        X, y = separable_data()
        clf = DenseStateChangeClassifier(epochs=5, random_state=0)
        clf.fit(X, y)
        assert clf.history_[-1] < clf.history_[0]
        # the first epoch's mean loss already beats the untouched network
        untrained = DenseStateChangeClassifier(epochs=0, random_state=0).fit(X, y)
        initial_loss = untrained.network_.loss(X, y, mode="train") / len(y)
        assert clf.history_[0] < initial_loss

    def test_zero_epochs_keeps_initial_parameters(self):
        X, y = separable_data(128)
        a = DenseStateChangeClassifier(epochs=0, random_state=9).fit(X, y)
        fresh = a._build_network()
        for name, block in a.network_.trainable().items():
            np.testing.assert_array_equal(block, fresh.trainable()[name])
        assert a.history_ == []

    def test_training_is_seed_deterministic(self):
        X, y = separable_data()
        a = DenseStateChangeClassifier(epochs=8, random_state=5).fit(X, y)
        b = DenseStateChangeClassifier(epochs=8, random_state=5).fit(X, y)
        for name, block in a.network_.trainable().items():
            np.testing.assert_array_equal(block, b.network_.trainable()[name])
        assert a.history_ == b.history_

    def test_predictions_repeatable_and_probabilities_normalized(self):
        X, y = separable_data(200)
        clf = DenseStateChangeClassifier(epochs=3, random_state=2).fit(X, y)
        p1 = clf.predict_proba([[123.0]])
        p2 = clf.predict_proba([[123.0]])
        np.testing.assert_array_equal(p1, p2)
        assert np.abs(p1.sum(axis=1) - 1.0) < 1e-9
        # one sample inside a batch matches the lone prediction up to the
        # BLAS kernel's rounding (GEMV vs GEMM accumulation)
        batch = clf.predict_proba([[123.0], [1.0], [900.0]])
        np.testing.assert_allclose(batch[0], p1[0], rtol=1e-12)

    def test_negative_input_rejected(self):
        X, y = separable_data(100)
        clf = DenseStateChangeClassifier(epochs=0).fit(X, y)
        with pytest.raises(ValueError, match="non-negative"):
            clf.predict([[-3.0]])
        with pytest.raises(ValueError, match="non-negative"):
            DenseStateChangeClassifier(epochs=0).fit([[-1.0], [2.0]], [0, 1])

    def test_single_class_data_rejected(self):
        with pytest.raises(DatasetError, match="single class"):
            DenseStateChangeClassifier(epochs=0).fit([[1.0], [2.0]], [0, 0])

    def test_wrong_width_rejected(self):
        X, y = separable_data(50)
        clf = DenseStateChangeClassifier(epochs=0).fit(X, y)
        with pytest.raises(DatasetError, match="1 column"):
            clf.predict([[1.0, 2.0]])

    def test_sklearn_params_round_trip(self):
        clf = DenseStateChangeClassifier(hidden_width=7, epochs=13)
        params = clf.get_params()
        assert params["hidden_width"] == 7 and params["epochs"] == 13
        clone = DenseStateChangeClassifier(**params)
        assert clone.get_params() == params
        clf.set_params(hidden_width=9)
        assert clf.hidden_width == 9


class TestGruClassifier:
    def window_data(self, n=400, seed=3, window=2):
        rng = np.random.default_rng(seed)
        y = (rng.random(n) < 0.4).astype(int)
        final = np.where(y == 1, 500.0, 5.0) + rng.normal(0, 0.5, n)
        earlier = np.abs(rng.normal(5.0, 2.0, size=(n, window - 1)))
        return np.hstack([earlier, np.abs(final).reshape(-1, 1)]), y

    def test_learns_separable_windows(self):
        X, y = self.window_data()
        clf = GruWindowClassifier(window_length=2, epochs=40, learning_rate=3e-3,
                                  random_state=0)
        clf.fit(X, y)
        assert clf.predict([[4.0, 500.0]]).tolist() == [1]
        assert clf.predict([[4.0, 5.0]]).tolist() == [0]

    def test_window_length_enforced(self):
        X, y = self.window_data(window=3)
        clf = GruWindowClassifier(window_length=3, epochs=0).fit(X, y)
        with pytest.raises(DatasetError, match="3 column"):
            clf.predict([[1.0, 2.0]])

    def test_window2_and_window3_are_independent_models(self):
        X2, y2 = self.window_data(window=2)
        X3, y3 = self.window_data(window=3)
        two = GruWindowClassifier(window_length=2, epochs=1, random_state=7).fit(X2, y2)
        three = GruWindowClassifier(window_length=3, epochs=1, random_state=7).fit(X3, y3)
        assert two.network_ is not three.network_
        assert two.n_parameters_ == three.n_parameters_  # same geometry, no shared state

    def test_deterministic(self):
        X, y = self.window_data()
        a = GruWindowClassifier(epochs=4, random_state=11).fit(X, y)
        b = GruWindowClassifier(epochs=4, random_state=11).fit(X, y)
        for name, block in a.network_.trainable().items():
            np.testing.assert_array_equal(block, b.network_.trainable()[name])

    def test_probability_pair_sums_to_one(self):
        X, y = self.window_data()
        clf = GruWindowClassifier(epochs=2).fit(X, y)
        probs = clf.predict_proba(X[:20])
        assert np.all(np.abs(probs.sum(axis=1) - 1.0) < 1e-9)

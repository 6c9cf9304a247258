import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import array_shapes, arrays

from nilmevents.errors import ShapeMismatchError
from nilmevents.nn import (
    BatchNormParams,
    DenseLayerParams,
    batchnorm_forward,
    dense_forward,
    nll_loss,
    softmax,
    tanh_forward,
)
from oracles import direct_tanh, naive_dense

finite_floats = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


class TestDenseForward:
    def test_one_by_one(self):
        layer = DenseLayerParams(weights=[[2.0]], biases=[1.0])
        np.testing.assert_allclose(dense_forward(layer, [[3.0]]), [[7.0]])

    def test_identity(self):
        layer = DenseLayerParams(weights=np.eye(2), biases=np.zeros(2))
        out = dense_forward(layer, [[0.3, -0.5]])
        np.testing.assert_array_equal(out, [[0.3, -0.5]])

    def test_matches_naive_loop_oracle_exactly(self):
        rng = np.random.default_rng(7)
        weights = rng.normal(size=(4, 3))
        biases = rng.normal(size=4)
        x = rng.normal(size=(5, 3))
        layer = DenseLayerParams(weights=weights, biases=biases)
        expected = naive_dense(weights.tolist(), biases.tolist(), x.tolist())
        # BLAS may fuse/reorder the accumulation, so allow a couple of ulps
        np.testing.assert_allclose(dense_forward(layer, x), expected, rtol=5e-16, atol=1e-15)

    def test_dimension_mismatch_names_layer_and_shapes(self):
        layer = DenseLayerParams(weights=np.ones((4, 3)), biases=np.zeros(4))
        with pytest.raises(ShapeMismatchError, match=r"layer 2.*\(4, 3\)"):
            dense_forward(layer, np.ones((2, 5)), layer_index=2)

    def test_rejects_nonfinite_parameters(self):
        with pytest.raises(ValueError, match="finite"):
            DenseLayerParams(weights=[[np.nan]], biases=[0.0])


class TestTanh:
    def test_zero_maps_to_zero(self):
        assert tanh_forward(0.0) == 0.0

    def test_odd_symmetry(self):
        x = np.linspace(-4.0, 4.0, 33)
        np.testing.assert_array_equal(tanh_forward(x), -tanh_forward(-x))

    def test_matches_direct_exponential_formula(self):
        assert tanh_forward(1.0) == pytest.approx(direct_tanh(1.0), abs=1e-15)
        assert tanh_forward(1.0) == pytest.approx(0.7615941559557649)

    @given(arrays(np.float64, array_shapes(max_dims=2), elements=finite_floats))
    def test_output_bounded(self, x):
        out = tanh_forward(x)
        assert np.all(np.abs(out) <= 1.0)


class TestBatchNorm:
    def test_standardizes_mean_and_variance(self):
        params = BatchNormParams(gamma=np.ones(1), beta=np.zeros(1))
        out, stats = batchnorm_forward(params, [[1.0], [3.0]], mode="train")
        assert stats.mean == pytest.approx([2.0])
        assert out.mean(axis=0) == pytest.approx([0.0], abs=1e-12)
        # variance of the output is var/(var + eps), just shy of 1
        expected = stats.var / (stats.var + params.epsilon)
        assert out.var(axis=0) == pytest.approx(expected, abs=1e-12)

    def test_affine_scales_and_shifts(self):
        params = BatchNormParams(gamma=np.full(3, 2.0), beta=np.full(3, 5.0))
        rng = np.random.default_rng(0)
        x = rng.normal(size=(16, 3))
        out, stats = batchnorm_forward(params, x, mode="train")
        np.testing.assert_allclose(out, 2.0 * stats.normalized + 5.0)

    def test_train_mode_needs_two_samples(self):
        params = BatchNormParams(gamma=np.ones(2), beta=np.zeros(2))
        with pytest.raises(ValueError, match="at least 2"):
            batchnorm_forward(params, [[1.0, 2.0]], mode="train")

    def test_infer_is_stateless_and_repeatable(self):
        params = BatchNormParams(
            gamma=np.array([2.0]),
            beta=np.array([1.0]),
            running_mean=np.array([5.0]),
            running_var=np.array([4.0]),
        )
        x = np.array([[7.0]])
        first, stats = batchnorm_forward(params, x, mode="infer")
        assert stats is None
        second, _ = batchnorm_forward(params, x, mode="infer")
        np.testing.assert_array_equal(first, second)
        # same sample inside a larger batch gives the identical value
        batch, _ = batchnorm_forward(params, np.array([[7.0], [100.0], [-3.0]]), mode="infer")
        np.testing.assert_array_equal(batch[0], first[0])

    def test_train_mode_updates_running_stats_by_decay(self):
        params = BatchNormParams(gamma=np.ones(1), beta=np.zeros(1), decay=0.9)
        batchnorm_forward(params, [[1.0], [3.0]], mode="train")
        assert params.running_mean == pytest.approx([0.9 * 0.0 + 0.1 * 2.0])
        assert params.running_var == pytest.approx([0.9 * 1.0 + 0.1 * 1.0])

    @given(
        arrays(
            np.float64,
            st.tuples(st.integers(2, 12), st.integers(1, 4)),
            elements=finite_floats,
        )
    )
    @settings(max_examples=60)
    def test_standardization_property(self, x):
        params = BatchNormParams(gamma=np.ones(x.shape[1]), beta=np.zeros(x.shape[1]))
        out, stats = batchnorm_forward(params, x, mode="train")
        assert np.all(np.abs(out.mean(axis=0)) < 1e-9)
        expected_var = stats.var / (stats.var + params.epsilon)
        assert np.all(np.abs(out.var(axis=0) - expected_var) < 1e-6)


class TestSoftmax:
    def test_symmetric_pair(self):
        np.testing.assert_allclose(softmax([[0.0, 0.0]]), [[0.5, 0.5]])

    def test_shift_invariance(self):
        base = softmax([[1.0, -2.0]])
        shifted = softmax([[1.0 + 123.456, -2.0 + 123.456]])
        np.testing.assert_allclose(shifted, base, atol=1e-15)

    def test_large_inputs_do_not_overflow(self):
        out = softmax([[1000.0, 0.0]])
        assert np.all(np.isfinite(out))
        assert out[0, 0] == pytest.approx(1.0)
        assert out[0, 1] == pytest.approx(0.0, abs=1e-300)

    @given(
        arrays(
            np.float64,
            st.tuples(st.integers(1, 8), st.integers(2, 5)),
            elements=st.floats(min_value=-700.0, max_value=700.0, allow_nan=False),
        )
    )
    @settings(max_examples=80)
    def test_rows_are_distributions(self, x):
        out = softmax(x)
        assert np.all(out >= 0.0)
        assert np.all(np.abs(out.sum(axis=1) - 1.0) < 1e-12)
        # the input's argmax position attains the output maximum (ties allowed)
        rows = np.arange(x.shape[0])
        np.testing.assert_array_equal(out[rows, x.argmax(axis=1)], out.max(axis=1))


class TestNllLoss:
    def test_perfect_prediction_is_zero(self):
        assert nll_loss([[1.0, 0.0]], [0]) == 0.0

    def test_uniform_pair_is_ln2(self):
        assert nll_loss([[0.5, 0.5]], [1]) == pytest.approx(np.log(2.0))

    def test_batch_is_sum_of_per_sample_losses(self):
        probs = np.array([[0.9, 0.1], [0.2, 0.8], [0.5, 0.5]])
        labels = [0, 1, 0]
        total = nll_loss(probs, labels)
        per_sample = sum(nll_loss(probs[i : i + 1], labels[i : i + 1]) for i in range(3))
        assert total == pytest.approx(per_sample, rel=1e-15)

    def test_zero_probability_is_clamped(self):
        loss = nll_loss([[0.0, 1.0]], [0])
        assert np.isfinite(loss)
        assert loss == pytest.approx(-np.log(1e-12))

    def test_loss_is_nonnegative(self):
        rng = np.random.default_rng(3)
        logits = rng.normal(size=(50, 2)) * 5
        probs = softmax(logits)
        labels = rng.integers(0, 2, size=50)
        assert nll_loss(probs, labels) >= 0.0

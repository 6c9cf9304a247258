import numpy as np
import pytest

from nilmevents.errors import ShapeMismatchError
from nilmevents.nn import (
    GruCellParams,
    GruStackNet,
    gradient_check,
    gru_cell_forward,
    gru_stack_parameter_count,
)
from oracles import fd_gradient, max_relative_error


def zero_cell(hidden=3, input_size=2):
    z = lambda *shape: np.zeros(shape)
    return GruCellParams(
        update_w=z(hidden, input_size), update_u=z(hidden, hidden), update_b=z(hidden),
        reset_w=z(hidden, input_size), reset_u=z(hidden, hidden), reset_b=z(hidden),
        cand_w=z(hidden, input_size), cand_u=z(hidden, hidden), cand_b=z(hidden),
    )


def random_cell(hidden=3, input_size=2, seed=0):
    rng = np.random.default_rng(seed)
    shapes = {"w": (hidden, input_size), "u": (hidden, hidden), "b": (hidden,)}
    kwargs = {
        f"{gate}_{kind}": rng.normal(scale=0.6, size=shape)
        for gate in ("update", "reset", "cand")
        for kind, shape in shapes.items()
    }
    return GruCellParams(**kwargs)


class TestGruCellForward:
    def test_zero_parameters_halve_the_previous_state(self):
        # sigmoid(0) = 0.5 update gate, tanh(0) = 0 candidate, so
        # h_new = 0.5 * h_prev + 0.5 * 0
        cell = zero_cell()
        h_prev = np.array([0.4, -0.8, 0.2])
        h_new = gru_cell_forward(cell, np.array([1.0, 2.0]), h_prev)
        np.testing.assert_allclose(h_new, 0.5 * h_prev)

    def test_zero_state_and_zero_candidate_path_stay_zero(self):
        cell = random_cell()
        cell.cand_w[...] = 0.0
        cell.cand_u[...] = 0.0
        cell.cand_b[...] = 0.0
        h_new = gru_cell_forward(cell, np.array([0.7, -0.3]), np.zeros(3))
        np.testing.assert_array_equal(h_new, np.zeros(3))

    def test_state_stays_bounded(self):
        cell = random_cell(seed=3)
        rng = np.random.default_rng(8)
        h = np.zeros(3)
        for _ in range(100):
            h = gru_cell_forward(cell, rng.normal(size=2) * 10, h)
            assert np.all(np.abs(h) <= 1.0)

    def test_batched_matches_per_sample(self):
        cell = random_cell(seed=5)
        rng = np.random.default_rng(2)
        x = rng.normal(size=(4, 2))
        h = rng.uniform(-0.9, 0.9, size=(4, 3))
        batched = gru_cell_forward(cell, x, h)
        for i in range(4):
            np.testing.assert_allclose(batched[i], gru_cell_forward(cell, x[i], h[i]))

    def test_dimension_mismatch_raises(self):
        cell = random_cell()
        with pytest.raises(ShapeMismatchError, match="input size 2"):
            gru_cell_forward(cell, np.ones(5), np.zeros(3))
        with pytest.raises(ShapeMismatchError):
            gru_cell_forward(cell, np.ones(2), np.zeros(7))

    def test_inconsistent_gate_shapes_rejected(self):
        with pytest.raises(ShapeMismatchError, match="reset"):
            GruCellParams(
                update_w=np.zeros((3, 2)), update_u=np.zeros((3, 3)), update_b=np.zeros(3),
                reset_w=np.zeros((3, 2)), reset_u=np.zeros((2, 3)), reset_b=np.zeros(3),
                cand_w=np.zeros((3, 2)), cand_u=np.zeros((3, 3)), cand_b=np.zeros(3),
            )


class TestGruStack:
    def test_unrolled_gradients_match_finite_differences(self):
        net = GruStackNet.build(window_length=3, hidden_width=4, n_layers=2, seed=21)
        rng = np.random.default_rng(6)
        x = rng.uniform(0.0, 2.0, size=(5, 3))
        y = rng.integers(0, 2, size=5)
        _, analytic = net.loss_and_gradients(x, y)
        numeric = fd_gradient(lambda: net.loss(x, y), net.trainable())
        assert max_relative_error(analytic, numeric) < 1e-5

    def test_gradient_check_helper_works_on_rnn(self):
        net = GruStackNet.build(window_length=2, hidden_width=3, n_layers=2, seed=4)
        rng = np.random.default_rng(1)
        x = rng.uniform(0.0, 2.0, size=(4, 2))
        y = rng.integers(0, 2, size=4)
        report = gradient_check(net, x, y, tolerance=1e-5)
        assert report.passed

    def test_forward_probabilities_valid(self):
        net = GruStackNet.build(window_length=2, hidden_width=6, n_layers=4, seed=1)
        probs, _ = net.forward([[1.0, 2.0], [0.0, 0.0]], mode="infer")
        assert probs.shape == (2, 2)
        assert np.all(np.abs(probs.sum(axis=1) - 1.0) < 1e-12)

    def test_wrong_window_length_raises(self):
        net = GruStackNet.build(window_length=2, hidden_width=3, n_layers=1, seed=0)
        with pytest.raises(ShapeMismatchError, match="length 2"):
            net.forward([[1.0, 2.0, 3.0]])

    def test_parameter_count_matches_closed_form(self):
        for hidden, layers in [(18, 4), (3, 1), (8, 2)]:
            net = GruStackNet.build(window_length=2, hidden_width=hidden, n_layers=layers)
            assert net.n_parameters() == gru_stack_parameter_count(hidden, layers)

    def test_build_is_seed_deterministic(self):
        a = GruStackNet.build(window_length=3, hidden_width=5, n_layers=2, seed=77)
        b = GruStackNet.build(window_length=3, hidden_width=5, n_layers=2, seed=77)
        for name, block in a.trainable().items():
            np.testing.assert_array_equal(block, b.trainable()[name])

"""Scaled conjugate gradients and the feedforward network it trains."""

import numpy as np
import pytest

from forexkit.data import Dataset
from forexkit.scg import (MlpNetwork, ScgConfig, ScgDivergence, dump_network,
                          error, forward, get_params, gradient,
                          hessian_vector_approx, init_network, load_network,
                          scg_minimize, scg_train, set_params)

from oracles import central_difference_gradient


def _net(weights, biases, sizes):
    return MlpNetwork(tuple(sizes),
                      tuple(np.asarray(w, dtype=float) for w in weights),
                      tuple(np.asarray(b, dtype=float) for b in biases))


def _quadratic(A, b):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)

    def fun(w):
        return 0.5 * w @ A @ w - b @ w

    def grad(w):
        return A @ w - b

    return fun, grad


def _spd(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    return M @ M.T + n * np.eye(n)


class TestForward:
    def test_zero_weights_yield_bias(self):
        net = _net([np.zeros((1, 1))], [[0.75]], (1, 1))
        assert forward(net, np.array([3.0])) == 0.75

    def test_single_tanh_unit(self):
        net = _net([np.array([[0.5]]), np.array([[1.0]])],
                   [[0.0], [0.0]], (1, 1, 1))
        out = forward(net, np.array([1.0]))
        assert out == pytest.approx(0.46211715726000974, abs=1e-15)

    def test_output_layer_is_linear(self):
        net = _net([np.array([[100.0]])], [[0.0]], (1, 1))
        assert forward(net, np.array([2.0])) == 200.0  # no squashing

    def test_batch_matches_row_by_row(self):
        net = init_network((2, 3, 1), seed=0)
        X = np.random.default_rng(1).normal(size=(6, 2))
        batch = forward(net, X)
        singles = np.array([forward(net, row) for row in X])
        np.testing.assert_allclose(batch, singles, rtol=1e-12, atol=1e-14)

    def test_input_width_checked(self):
        net = init_network((2, 3, 1), seed=0)
        with pytest.raises(ValueError, match="expected 2 inputs"):
            forward(net, np.array([1.0]))


class TestInitAndParams:
    def test_init_bounds_scale_with_fan_in(self):
        net = init_network((4, 9, 1), seed=3)
        assert np.max(np.abs(net.weights[0])) <= 1.0 / np.sqrt(4)
        assert np.max(np.abs(net.weights[1])) <= 1.0 / np.sqrt(9)

    def test_init_is_deterministic(self):
        a = init_network((3, 5, 1), seed=11)
        b = init_network((3, 5, 1), seed=11)
        np.testing.assert_array_equal(get_params(a), get_params(b))

    def test_params_round_trip(self):
        net = init_network((2, 4, 2), seed=5)
        flat = get_params(net)
        assert flat.size == net.n_params == (2 * 4 + 4) + (4 * 2 + 2)
        clone = set_params(net, flat)
        np.testing.assert_array_equal(get_params(clone), flat)

    def test_set_params_checks_length(self):
        net = init_network((2, 2, 1), seed=0)
        with pytest.raises(ValueError, match="parameters"):
            set_params(net, np.zeros(3))

    def test_network_shape_validation(self):
        with pytest.raises(ValueError):
            MlpNetwork((1,), (), ())
        with pytest.raises(ValueError, match="weight 0 shape"):
            _net([np.zeros((2, 2))], [np.zeros(3)], (1, 3))


class TestGradient:
    def test_zero_at_perfect_fit(self):
        net = _net([np.array([[2.0]])], [[1.0]], (1, 1))
        x = np.linspace(-1, 1, 9)
        batch = Dataset(("x",), x[:, None], 2.0 * x + 1.0)
        assert error(net, batch) < 1e-28
        assert np.linalg.norm(gradient(net, batch)) < 1e-12

    def test_matches_central_differences(self):
        net = init_network((2, 4, 1), seed=7)
        rng = np.random.default_rng(8)
        batch = Dataset(("a", "b"), rng.normal(size=(12, 2)), rng.normal(size=12))
        w0 = get_params(net)
        analytic = gradient(net, batch)
        numeric = central_difference_gradient(
            lambda w: error(set_params(net, w), batch), w0, 1e-6)
        assert np.max(np.abs(analytic - numeric)) < 1e-7

    def test_linear_net_gradient_analytic(self):
        # E = 0.5 (w x + b - t)^2 -> dE/dw = (wx+b-t) x, dE/db = (wx+b-t)
        net = _net([np.array([[3.0]])], [[0.5]], (1, 1))
        batch = Dataset(("x",), np.array([[2.0]]), np.array([1.5]))
        resid = 3.0 * 2.0 + 0.5 - 1.5
        np.testing.assert_allclose(gradient(net, batch),
                                   [resid * 2.0, resid], atol=1e-14)

    def test_empty_batch_rejected(self):
        net = init_network((1, 1), seed=0)
        empty = Dataset(("x",), np.zeros((0, 1)), np.zeros(0))
        with pytest.raises(ValueError, match="empty"):
            error(net, empty)
        with pytest.raises(ValueError, match="empty"):
            gradient(net, empty)


class TestHessianVector:
    def test_exact_on_linear_network(self):
        # With identity activations the error is quadratic, so the finite
        # difference of gradients is exact for any sigma (up to rounding).
        net = _net([np.array([[1.0]])], [[0.0]], (1, 1))
        batch = Dataset(("x",), np.array([[1.0], [2.0]]), np.array([0.0, 0.0]))
        p = np.array([1.0, 1.0])
        # Hessian of 0.5*sum((w x + b)^2) is [[sum x^2, sum x], [sum x, n]]
        H = np.array([[5.0, 3.0], [3.0, 2.0]])
        got = hessian_vector_approx(net, batch, p, sigma_k=1e-5, lambda_k=0.0)
        np.testing.assert_allclose(got, H @ p, rtol=1e-6)

    def test_lambda_adds_scaled_direction(self):
        net = _net([np.array([[1.0]])], [[0.0]], (1, 1))
        batch = Dataset(("x",), np.array([[1.0]]), np.array([0.0]))
        p = np.array([2.0, 0.0])
        base = hessian_vector_approx(net, batch, p, sigma_k=1e-5, lambda_k=0.0)
        shifted = hessian_vector_approx(net, batch, p, sigma_k=1e-5, lambda_k=0.5)
        np.testing.assert_allclose(shifted - base, 0.5 * p, atol=1e-12)

    def test_error_shrinks_with_sigma(self):
        net = init_network((1, 6, 1), seed=2)
        rng = np.random.default_rng(3)
        x = rng.uniform(-1, 1, 20)
        batch = Dataset(("x",), x[:, None], np.sin(3 * x))
        p = rng.normal(size=net.n_params)

        def exact_times_p():
            eps = 1e-7
            w = get_params(net)
            gp = gradient(set_params(net, w + eps * p), batch)
            gm = gradient(set_params(net, w - eps * p), batch)
            return (gp - gm) / (2 * eps)

        ref = exact_times_p()
        err_big = np.linalg.norm(
            hessian_vector_approx(net, batch, p, sigma_k=1e-2, lambda_k=0.0) - ref)
        err_small = np.linalg.norm(
            hessian_vector_approx(net, batch, p, sigma_k=1e-4, lambda_k=0.0) - ref)
        assert err_small < err_big

    def test_argument_validation(self):
        net = init_network((1, 1), seed=0)
        batch = Dataset(("x",), np.array([[1.0]]), np.array([1.0]))
        with pytest.raises(ValueError, match="sigma_k"):
            hessian_vector_approx(net, batch, np.ones(net.n_params), sigma_k=0.0,
                                  lambda_k=0.0)
        with pytest.raises(ValueError, match="non-zero"):
            hessian_vector_approx(net, batch, np.zeros(net.n_params), sigma_k=1e-4,
                                  lambda_k=0.0)


class TestScgMinimize:
    def test_quadratic_surrogate(self):
        fun, grad = _quadratic([[4.0, 1.0], [1.0, 3.0]], [1.0, 2.0])
        res = scg_minimize(fun, grad, np.zeros(2), max_iterations=20)
        expected = np.linalg.solve([[4.0, 1.0], [1.0, 3.0]], [1.0, 2.0])
        np.testing.assert_allclose(res.w, expected, atol=1e-8)
        assert res.converged

    @pytest.mark.parametrize("n", [2, 5, 10])
    def test_conjugate_gradient_property_on_spd(self, n):
        A = _spd(n, seed=n)
        b = np.arange(1.0, n + 1.0)
        fun, grad = _quadratic(A, b)
        cfg = ScgConfig(lambda0=0.0, freeze_lambda=True)
        res = scg_minimize(fun, grad, np.zeros(n), max_iterations=n + 2, cfg=cfg)
        np.testing.assert_allclose(res.w, np.linalg.solve(A, b), atol=1e-8)

    def test_trace_is_monotone_nonincreasing(self):
        fun, grad = _quadratic(_spd(6, seed=1), np.ones(6))
        res = scg_minimize(fun, grad, np.full(6, 3.0), max_iterations=40)
        assert all(b <= a + 1e-12 for a, b in zip(res.trace, res.trace[1:]))

    def test_rejects_zero_iterations(self):
        fun, grad = _quadratic(np.eye(2), np.zeros(2))
        with pytest.raises(ValueError, match=">= 1"):
            scg_minimize(fun, grad, np.zeros(2), max_iterations=0)

    def test_divergence_raises_with_epoch(self):
        calls = {"n": 0}

        def fun(w):
            return float(w @ w)

        def grad(w):
            calls["n"] += 1
            if calls["n"] > 1:
                return np.array([np.nan, np.nan])
            return 2 * w

        with pytest.raises(ScgDivergence) as exc:
            scg_minimize(fun, grad, np.array([1.0, 1.0]), max_iterations=50)
        assert exc.value.epoch >= 1

    def test_nonfinite_trial_point_is_rejected_not_fatal(self):
        # A cliff beyond w=10 must not kill the run: the step is rejected,
        # lambda grows, and the minimizer still lands at the optimum.
        def fun(w):
            if w[0] > 10.0:
                return float("inf")
            return float((w[0] - 3.0) ** 2)

        def grad(w):
            return np.array([2.0 * (w[0] - 3.0)])

        res = scg_minimize(fun, grad, np.array([0.0]), max_iterations=100)
        assert abs(res.w[0] - 3.0) < 1e-6


class TestScgTrain:
    def test_sin_fit_reaches_small_rmse(self):
        rng = np.random.default_rng(7)
        x = np.sort(rng.uniform(-np.pi, np.pi, 80))
        train = Dataset(("x",), x[:, None], np.sin(x))
        net = init_network((1, 8, 1), seed=7)
        net, trace = scg_train(net, train, epochs=500)
        resid = forward(net, x[:, None]) - np.sin(x)
        assert float(np.sqrt(np.mean(resid ** 2))) < 0.02
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))

    def test_seed_reinitializes_deterministically(self):
        rng = np.random.default_rng(1)
        x = rng.uniform(-1, 1, 30)
        train = Dataset(("x",), x[:, None], x ** 2)
        base = init_network((1, 4, 1), seed=99)
        a, _ = scg_train(base, train, epochs=25, seed=5)
        b, _ = scg_train(init_network((1, 4, 1), seed=0), train, epochs=25, seed=5)
        np.testing.assert_array_equal(get_params(a), get_params(b))

    def test_epochs_validation(self):
        net = init_network((1, 1), seed=0)
        train = Dataset(("x",), np.array([[1.0]]), np.array([1.0]))
        with pytest.raises(ValueError, match="epochs"):
            scg_train(net, train, epochs=0)


class TestSerialization:
    def test_round_trip_bit_identical(self):
        net = init_network((2, 5, 3, 1), seed=13)
        clone = load_network(dump_network(net))
        assert clone.layer_sizes == net.layer_sizes
        X = np.random.default_rng(14).normal(size=(50, 2))
        np.testing.assert_array_equal(forward(net, X), forward(clone, X))
        assert dump_network(clone) == dump_network(net)

    def test_dump_header(self):
        net = init_network((2, 3, 1), seed=0)
        lines = dump_network(net).splitlines()
        assert lines[0] == "mlp-network v1"
        assert lines[1] == "layers 2 3 1"

    def test_load_rejects_bad_header(self):
        with pytest.raises(ValueError, match="mlp-network"):
            load_network("weights 0\n")

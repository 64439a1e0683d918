"""Adaptive regression splines: hinges, forward search, GCV pruning."""

import numpy as np
import pytest

from forexkit import mars
from forexkit.data import Dataset
from forexkit.mars import (Hinge, HingeBasis, MarsConfig, MarsModel,
                           backward_prune, eval_hinge, fit, forward_pass, gcv)

from oracles import gcv_score, normal_equations


def _dataset(x, y, names=("x",)):
    x = np.asarray(x, dtype=float)
    X = x[:, None] if x.ndim == 1 else x
    return Dataset(names[: X.shape[1]], X, np.asarray(y, dtype=float))


def _knots(model):
    return [(h.var, h.knot, h.direction) for b in model.bases for h in b.factors]


class TestHinge:
    def test_positive_and_mirror_values(self):
        assert eval_hinge(3.0, 1.0, "positive") == 2.0
        assert eval_hinge(0.5, 1.0, "positive") == 0.0
        assert eval_hinge(0.5, 1.0, "negative") == 0.5
        assert eval_hinge(3.0, 1.0, "negative") == 0.0

    def test_zero_exactly_at_knot(self):
        assert eval_hinge(1.0, 1.0, "positive") == 0.0
        assert eval_hinge(1.0, 1.0, "negative") == 0.0

    def test_vectorized(self):
        np.testing.assert_array_equal(
            eval_hinge(np.array([0.0, 1.0, 2.0]), 1.0, "positive"),
            np.array([0.0, 0.0, 1.0]))

    def test_rejects_unknown_direction(self):
        with pytest.raises(ValueError, match="direction"):
            eval_hinge(1.0, 0.0, "sideways")


class TestHingeBasis:
    def test_constant_basis_column(self):
        X = np.zeros((4, 2))
        np.testing.assert_array_equal(HingeBasis().column(X), np.ones(4))

    def test_product_of_factors(self):
        X = np.array([[2.0, 5.0], [0.0, 7.0]])
        b = HingeBasis((Hinge(0, 1.0, "positive"), Hinge(1, 4.0, "positive")))
        np.testing.assert_array_equal(b.column(X), np.array([1.0 * 1.0, 0.0]))
        assert b.degree == 2 and b.uses(0) and b.uses(1) and not b.uses(2)

    def test_variable_may_appear_once(self):
        with pytest.raises(ValueError, match="at most once"):
            HingeBasis((Hinge(0, 1.0, "positive"), Hinge(0, 2.0, "negative")))


class TestForwardPass:
    def test_capacity_counts_nonconstant_bases(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(0, 1, 50)
        ds = _dataset(x, np.sin(6 * x))
        for cap in (2, 4, 6):
            model = forward_pass(ds, MarsConfig(max_basis_functions=cap))
            assert len(model.bases) - 1 <= cap

    def test_cap_one_leaves_constant_model(self):
        rng = np.random.default_rng(1)
        x = rng.uniform(0, 1, 30)
        model = forward_pass(_dataset(x, x ** 2), MarsConfig(max_basis_functions=1))
        assert len(model.bases) == 1
        assert model.bases[0].degree == 0

    def test_constant_target_stays_constant(self):
        x = np.linspace(0, 1, 20)
        model = forward_pass(_dataset(x, np.full(20, 2.5)), MarsConfig())
        assert len(model.bases) == 1
        assert model.coefficients[0] == pytest.approx(2.5, abs=1e-12)

    def test_trace_is_nonincreasing(self):
        rng = np.random.default_rng(5)
        X = rng.uniform(-1, 1, size=(60, 2))
        y = np.maximum(0, X[:, 0] - 0.2) - 2 * np.maximum(0, 0.1 - X[:, 1]) \
            + 0.05 * rng.normal(size=60)
        model = forward_pass(Dataset(("a", "b"), X, y), MarsConfig(max_basis_functions=10))
        trace = model.forward_trace
        assert len(trace) >= 2
        for prev, cur in zip(trace, trace[1:]):
            assert cur <= prev * (1 + 1e-12)

    def test_interaction_bases_when_enabled(self):
        rng = np.random.default_rng(9)
        X = rng.uniform(0, 1, size=(120, 2))
        y = np.maximum(0, X[:, 0] - 0.5) * np.maximum(0, X[:, 1] - 0.5)
        cfg = MarsConfig(max_basis_functions=8, max_interaction=2)
        model = fit(Dataset(("a", "b"), X, y), cfg)
        assert any(b.degree == 2 for b in model.bases)
        assert all(b.degree <= 2 for b in model.bases)

    def test_degree_capped_at_max_interaction(self):
        rng = np.random.default_rng(10)
        X = rng.uniform(0, 1, size=(80, 3))
        y = X[:, 0] * X[:, 1] * X[:, 2]
        model = forward_pass(Dataset(("a", "b", "c"), X, y),
                             MarsConfig(max_basis_functions=12, max_interaction=1))
        assert all(b.degree <= 1 for b in model.bases)


class TestKnotRecovery:
    def test_single_hinge_recovered_exactly(self):
        x = np.linspace(0, 1, 81)  # 0.5 is an observed value
        y = 2.0 * np.maximum(0.0, x - 0.5)
        model = fit(_dataset(x, y), MarsConfig(max_basis_functions=6))
        assert (0, 0.5, "positive") in _knots(model)
        resid = mars.predict(model, x[:, None]) - y
        assert float(np.sqrt(np.mean(resid ** 2))) < 1e-10

    def test_linear_data_keeps_no_interior_knots(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(0, 1, 64)
        y = 3.0 * x + 1.0
        model = fit(_dataset(x, y), MarsConfig(max_basis_functions=6))
        interior = [k for _, k, _ in _knots(model) if x.min() < k < x.max()]
        assert interior == []
        resid = mars.predict(model, x[:, None]) - y
        assert float(np.sqrt(np.mean(resid ** 2))) < 1e-10

    def test_mirror_pair_spans_a_vee(self):
        x = np.linspace(-1, 1, 41)  # 0.0 observed
        y = np.abs(x)
        model = fit(_dataset(x, y), MarsConfig(max_basis_functions=4))
        directions = {d for _, k, d in _knots(model) if k == 0.0}
        assert directions == {"positive", "negative"}
        resid = mars.predict(model, x[:, None]) - y
        assert np.max(np.abs(resid)) < 1e-10


class TestGcvAndPruning:
    def test_gcv_matches_oracle(self):
        for mse, n, r in [(0.5, 100, 1), (0.25, 50, 5), (1.0, 30, 7)]:
            assert gcv(mse, n, r, 3.0) == pytest.approx(gcv_score(mse, n, r, 3.0))

    def test_gcv_saturated_model_is_infinite(self):
        assert gcv(0.1, 10, 10, 3.0) == float("inf")

    def test_prune_drops_pure_noise_basis(self):
        rng = np.random.default_rng(8)
        x = np.linspace(0, 1, 101)
        y = 2.0 * np.maximum(0.0, x - 0.5) + 0.01 * rng.normal(size=101)
        grown = forward_pass(_dataset(x, y), MarsConfig(max_basis_functions=12))
        pruned = backward_prune(grown, _dataset(x, y), MarsConfig(max_basis_functions=12))
        assert len(pruned.bases) < len(grown.bases)
        scores = [s for _, s in pruned.pruning_trace]
        best = min(scores)
        full_cols_mse = pruned.training_mse
        assert gcv(full_cols_mse, 101, len(pruned.bases), 3.0) == pytest.approx(best)

    def test_prune_trace_covers_every_subset_size(self):
        rng = np.random.default_rng(12)
        x = rng.uniform(0, 1, 60)
        y = np.sin(5 * x)
        model = fit(_dataset(x, y), MarsConfig(max_basis_functions=8))
        sizes = [size for size, _ in model.pruning_trace]
        assert sizes[0] >= sizes[-1] == 1
        assert sizes == sorted(sizes, reverse=True)

    def test_holdout_pruning_uses_holdout_mse(self):
        rng = np.random.default_rng(4)
        x = rng.uniform(0, 1, 80)
        y = 1.5 * np.maximum(0, x - 0.4) + 0.05 * rng.normal(size=80)
        xh = rng.uniform(0, 1, 40)
        yh = 1.5 * np.maximum(0, xh - 0.4) + 0.05 * rng.normal(size=40)
        cfg = MarsConfig(max_basis_functions=10, pruning="holdout")
        model = fit(_dataset(x, y), cfg, holdout=_dataset(xh, yh))
        resid = mars.predict(model, xh[:, None]) - yh
        assert float(np.mean(resid ** 2)) == pytest.approx(min(s for _, s in model.pruning_trace))

    def test_holdout_mode_requires_holdout(self):
        x = np.linspace(0, 1, 20)
        with pytest.raises(ValueError, match="holdout"):
            fit(_dataset(x, x), MarsConfig(pruning="holdout"))

    def test_coefficients_match_normal_equations(self):
        rng = np.random.default_rng(6)
        x = rng.uniform(0, 2, 70)
        y = np.maximum(0, x - 1.0) + 0.1 * rng.normal(size=70)
        model = fit(_dataset(x, y), MarsConfig(max_basis_functions=6))
        B = model.design_matrix(x[:, None])
        np.testing.assert_allclose(model.coefficients, normal_equations(B, y),
                                   rtol=1e-8, atol=1e-10)


class TestPredict:
    def test_scalar_and_batch_forms(self):
        model = MarsModel((HingeBasis(), HingeBasis((Hinge(0, 1.0, "positive"),))),
                          np.array([1.0, 2.0]), 1, 0.0)
        assert mars.predict(model, np.array([3.0])) == 5.0
        np.testing.assert_array_equal(
            mars.predict(model, np.array([[0.0], [2.0]])), np.array([1.0, 3.0]))

    def test_dimension_mismatch(self):
        model = MarsModel((HingeBasis(),), np.array([1.0]), 2, 0.0)
        with pytest.raises(ValueError, match="expected 2 features"):
            mars.predict(model, np.array([1.0]))


class TestValidation:
    def test_config_bounds(self):
        with pytest.raises(ValueError):
            MarsConfig(max_basis_functions=0)
        with pytest.raises(ValueError):
            MarsConfig(max_interaction=0)
        with pytest.raises(ValueError):
            MarsConfig(pruning="oob")

    def test_forward_needs_rows(self):
        with pytest.raises(ValueError, match="2 rows"):
            forward_pass(_dataset(np.array([1.0]), np.array([1.0])), MarsConfig())

"""Ridge readout and metrics against independent linear-algebra oracles."""

import numpy as np
import pytest

from pqrc.readout import (
    MetricsReport,
    SplitSpec,
    binary_accuracy,
    gram_effective_rank,
    memory_capacity,
    mse_score,
    predict,
    r2_score,
    ridge_fit,
)


def reference_ridge(X, y, alpha, washout):
    """Independent solve: explicit inverse of the penalized normal matrix."""
    Xa = np.hstack([X, np.ones((X.shape[0], 1))])[washout:]
    yw = y[washout:]
    penalty = np.eye(Xa.shape[1])
    penalty[-1, -1] = 0.0
    return np.linalg.inv(Xa.T @ Xa + alpha * penalty) @ Xa.T @ yw


class TestRidgeFit:
    def test_exact_interpolation_when_determined(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(size=(11, 10))
        y = rng.uniform(size=11)
        model = ridge_fit(X, y, alpha=0.0, washout=0)
        np.testing.assert_allclose(predict(model, X), y, atol=1e-10)

    def test_huge_alpha_kills_feature_weights(self):
        rng = np.random.default_rng(1)
        X = rng.uniform(size=(40, 6))
        y = rng.uniform(size=40)
        model = ridge_fit(X, y, alpha=1e12, washout=0)
        assert np.linalg.norm(model.weights[:-1]) < 1e-6
        # unpenalized bias absorbs the target mean
        assert model.weights[-1] == pytest.approx(y.mean(), abs=1e-6)

    def test_matches_independent_solve(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(20, 5))
        y = rng.normal(size=20)
        model = ridge_fit(X, y, alpha=0.1, washout=0)
        np.testing.assert_allclose(
            model.weights, reference_ridge(X, y, 0.1, 0), atol=1e-10
        )

    def test_washout_drops_training_rows(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(30, 4))
        y = rng.normal(size=30)
        direct = ridge_fit(X, y, alpha=0.01, washout=7)
        sliced = ridge_fit(X[7:], y[7:], alpha=0.01, washout=0)
        np.testing.assert_allclose(direct.weights, sliced.weights, atol=1e-12)

    def test_residual_always_small(self):
        rng = np.random.default_rng(4)
        for alpha in (0.0, 1e-25, 1e-9, 1e-3, 1.0, 1e6):
            X = rng.normal(size=(25, 6))
            y = rng.normal(size=25)
            model = ridge_fit(X, y, alpha=alpha, washout=2)
            assert model.residual < 1e-9

    def test_singular_system_falls_back_to_pseudoinverse(self):
        X = np.zeros((8, 3))
        X[:, 0] = np.arange(8.0)
        X[:, 1] = 2.0 * np.arange(8.0)  # collinear
        y = np.arange(8.0)
        model = ridge_fit(X, y, alpha=0.0, washout=0)
        assert model.used_pseudoinverse
        np.testing.assert_allclose(predict(model, X), y, atol=1e-9)

    def test_alpha_monotonically_shrinks_weights(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(50, 8))
        y = rng.normal(size=50)
        norms = [
            np.linalg.norm(ridge_fit(X, y, alpha=a, washout=0).weights[:-1])
            for a in np.logspace(-8, 4, 13)
        ]
        assert all(n2 <= n1 + 1e-12 for n1, n2 in zip(norms, norms[1:]))

    def test_validation(self):
        X = np.ones((5, 2))
        y = np.ones(5)
        with pytest.raises(ValueError, match="alpha"):
            ridge_fit(X, y, alpha=-1.0, washout=0)
        with pytest.raises(ValueError, match="washout"):
            ridge_fit(X, y, alpha=0.0, washout=5)
        with pytest.raises(ValueError, match="differ"):
            ridge_fit(X, np.ones(4), alpha=0.0, washout=0)


class TestPredict:
    def test_zero_weights_gives_bias(self):
        model = ridge_fit(np.zeros((5, 3)), np.full(5, 0.7), alpha=1e12, washout=0)
        np.testing.assert_allclose(predict(model, np.zeros((4, 3))), 0.7, atol=1e-6)

    def test_linearity_identity(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(12, 4))
        y = rng.normal(size=12)
        model = ridge_fit(X, y, alpha=0.05, washout=0)
        Xa = rng.normal(size=(6, 4))
        Xb = rng.normal(size=(6, 4))
        bias = model.weights[-1]
        np.testing.assert_allclose(
            predict(model, Xa + Xb),
            predict(model, Xa) + predict(model, Xb) - bias,
            atol=1e-12,
        )

    def test_dimension_mismatch(self):
        model = ridge_fit(np.ones((5, 3)), np.ones(5), alpha=1.0, washout=0)
        with pytest.raises(ValueError, match="does not match"):
            predict(model, np.ones((2, 4)))


class TestScores:
    def test_r2_perfect(self):
        y = np.array([0.1, 0.5, 0.9, 0.2])
        assert r2_score(y, y) == pytest.approx(1.0)

    def test_r2_sign_blind(self):
        y = np.array([0.1, 0.5, 0.9, 0.2])
        assert r2_score(-y, y) == pytest.approx(1.0)

    def test_r2_independent_vectors(self):
        rng = np.random.default_rng(42)
        a = rng.uniform(size=1000)
        b = rng.uniform(size=1000)
        assert r2_score(a, b) < 0.01

    def test_r2_affine_invariance(self):
        rng = np.random.default_rng(7)
        pred = rng.uniform(size=50)
        target = rng.uniform(size=50)
        base = r2_score(pred, target)
        assert r2_score(3.7 * pred + 0.2, target) == pytest.approx(base, abs=1e-12)

    def test_r2_degenerate_is_zero_with_warning(self):
        with pytest.warns(UserWarning, match="zero variance"):
            assert r2_score(np.full(5, 0.3), np.arange(5.0)) == 0.0

    def test_mse(self):
        assert mse_score(np.ones(4), np.ones(4)) == 0.0
        assert mse_score(np.ones(4) + 1.0, np.ones(4)) == 1.0
        assert mse_score(np.array([0.0, 0.0]), np.array([1.0, 3.0])) == 5.0

    def test_mse_zero_iff_equal(self):
        a = np.array([0.1, 0.2])
        b = np.array([0.1, 0.2000001])
        assert mse_score(a, b) > 0.0

    def test_memory_capacity(self):
        assert memory_capacity([0.0, 0.0]) == 0.0
        assert memory_capacity([1.0, 1.0, 0.0, 0.0]) == 2.0
        with pytest.raises(ValueError):
            memory_capacity([])

    def test_binary_accuracy(self):
        t = np.array([1.0, 0.0, 0.0, 0.0])
        assert binary_accuracy(t, t) == 1.0
        assert binary_accuracy(np.full(3, 0.49), np.ones(3)) == 0.0
        # hand rounding: (0.6, 0.2, 0.7, 0.1) -> (1, 0, 1, 0), three of four match
        assert binary_accuracy(np.array([0.6, 0.2, 0.7, 0.1]), t) == 0.75
        with pytest.raises(ValueError, match="binary"):
            binary_accuracy(np.ones(2), np.array([0.0, 0.5]))


class TestGramRank:
    def test_identical_rows(self):
        assert gram_effective_rank(np.tile([1.0, 2.0, 3.0], (6, 1))) == 1

    def test_identity_block(self):
        assert gram_effective_rank(np.eye(7)) == 7

    def test_matches_eigenvalue_oracle(self):
        rng = np.random.default_rng(8)
        # coarse enough that eigendecomposition round-off cannot flip counts
        tol = 1e-6
        for _ in range(50):
            rank = rng.integers(1, 5)
            X = rng.normal(size=(12, rank)) @ rng.normal(size=(rank, 6))
            eigs = np.linalg.eigvalsh(X.T @ X)
            svals = np.sqrt(np.clip(eigs, 0.0, None))
            want = int(np.sum(svals > tol * svals.max()))
            assert gram_effective_rank(X, tol) == want


class TestSplitSpec:
    def test_fraction_floor(self):
        split = SplitSpec.from_fraction(497, 0.8)
        assert (split.k_train, split.k_test) == (397, 100)
        assert SplitSpec.from_fraction(150, 0.8).k_train == 120

    def test_validation(self):
        with pytest.raises(ValueError):
            SplitSpec(k_train=0, k_test=5)
        with pytest.raises(ValueError):
            SplitSpec.from_fraction(100, 1.0)

    def test_total(self):
        assert SplitSpec(k_train=3, k_test=2).K == 5


class TestMetricsReport:
    def test_round_trip_dict(self):
        report = MetricsReport(
            mse=0.5, r2=0.9, gram_rank=4, accuracy=None,
            per_delay_r2=(1.0, 0.5), capacity=1.5, flags=("pseudoinverse",),
        )
        d = report.to_dict()
        assert d["capacity"] == 1.5
        assert d["per_delay_r2"] == [1.0, 0.5]
        assert "accuracy" not in d
        assert d["flags"] == ["pseudoinverse"]

"""Linear readout layer and figure-of-merit metrics.

The readout is closed-form ridge regression on the per-step probability
vectors, with a bias column appended (exempt from the penalty) and an
initial washout of training rows discarded so the reservoir forgets its
bootstrap transient.
"""

import warnings
from dataclasses import dataclass

import numpy as np

#: Relative residual bound enforced on every normal-equations solve.
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class ReadoutModel:
    """Trained ridge weights (bias last), with fit diagnostics."""

    weights: np.ndarray
    alpha: float
    washout: int
    used_pseudoinverse: bool = False
    residual: float = 0.0

    @property
    def n_features(self) -> int:
        return self.weights.size - 1


def _augment(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"feature matrix must be 2-d, got shape {X.shape}")
    return np.hstack([X, np.ones((X.shape[0], 1))])


def ridge_fit(X: np.ndarray, y: np.ndarray, alpha: float, washout: int) -> ReadoutModel:
    """Solve the penalized normal equations on the post-washout rows.

    The bias weight is not penalized.  A singular system (alpha = 0, or
    small enough that the normal matrix is numerically rank-deficient)
    falls back to the minimum-norm least-squares solution and is flagged.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if washout < 0:
        raise ValueError(f"washout must be >= 0, got {washout}")
    y = np.asarray(y, dtype=float)
    Xa = _augment(X)
    if y.shape[0] != Xa.shape[0]:
        raise ValueError(
            f"feature rows ({Xa.shape[0]}) and targets ({y.shape[0]}) differ"
        )
    if washout >= Xa.shape[0]:
        raise ValueError(f"washout {washout} leaves no training rows")
    Xa = Xa[washout:]
    y = y[washout:]

    penalty = np.eye(Xa.shape[1])
    penalty[-1, -1] = 0.0  # bias is exempt
    A = Xa.T @ Xa + alpha * penalty
    b = Xa.T @ y
    b_norm = np.linalg.norm(b)

    def normal_residual(weights):
        return np.linalg.norm(A @ weights - b) / (b_norm if b_norm > 0 else 1.0)

    # The system is consistent by construction (b lies in the range of A),
    # but reservoir feature matrices can be pathologically ill-conditioned,
    # and no single solver keeps the residual tight on all of them.  Try a
    # cascade and keep the best: plain solve, then the SVD-based
    # minimum-norm solve (the pseudoinverse route for singular systems),
    # then iterative refinement on it.
    def candidates():
        try:
            yield False, np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            pass
        w = np.linalg.lstsq(A, b, rcond=None)[0]
        yield True, w
        for _ in range(2):
            w = w + np.linalg.lstsq(A, b - A @ w, rcond=None)[0]
            yield True, w

    w, used_pinv, residual = None, False, np.inf
    for from_pinv, candidate in candidates():
        r = normal_residual(candidate)
        if r < residual:
            w, used_pinv, residual = candidate, from_pinv, r
        if residual < 1e-12:
            break
    if residual >= RESIDUAL_TOL:
        raise ArithmeticError(
            f"normal-equations residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}"
        )
    return ReadoutModel(
        weights=w,
        alpha=alpha,
        washout=washout,
        used_pseudoinverse=used_pinv,
        residual=float(residual),
    )


def predict(model: ReadoutModel, X: np.ndarray) -> np.ndarray:
    """Apply the trained readout: bias-augmented rows times weights."""
    Xa = _augment(X)
    if Xa.shape[1] != model.weights.size:
        raise ValueError(
            f"feature count {Xa.shape[1] - 1} does not match the "
            f"{model.n_features} the model was trained on"
        )
    return Xa @ model.weights


def r2_score(pred, target) -> float:
    """Squared Pearson correlation between predictions and targets.

    Lies in [0, 1]; invariant under positive affine transforms of either
    argument.  When either vector has zero variance the correlation is
    undefined and the score is reported as 0 with a warning.
    """
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape or pred.ndim != 1 or pred.size < 2:
        raise ValueError("r2_score expects two equal-length vectors (len >= 2)")
    vp = np.var(pred)
    vt = np.var(target)
    if vp == 0.0 or vt == 0.0:
        warnings.warn("zero variance in r2_score operand; returning 0", stacklevel=2)
        return 0.0
    cov = np.mean((pred - pred.mean()) * (target - target.mean()))
    return float(min(cov * cov / (vp * vt), 1.0))


def mse_score(pred, target) -> float:
    """Mean squared difference."""
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape or pred.size < 1:
        raise ValueError("mse_score expects two equal-length non-empty vectors")
    return float(np.mean((pred - target) ** 2))


def memory_capacity(per_delay_r2) -> float:
    """Total recall capacity: sum of per-delay determination coefficients."""
    values = list(per_delay_r2)
    if not values:
        raise ValueError("per-delay list must be non-empty")
    return float(np.sum(values))


def gram_effective_rank(X: np.ndarray, tol: float = 1e-10) -> int:
    """Effective rank of the Gram matrix X^T X.

    Counted as the number of singular values of ``X`` above ``tol`` times
    the largest one.
    """
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        raise ValueError("feature matrix must be non-empty")
    svals = np.linalg.svd(X, compute_uv=False)
    if svals[0] == 0.0:
        return 0
    return int(np.sum(svals > tol * svals[0]))


def binary_accuracy(pred, target) -> float:
    """Fraction of predictions that round to the binary target."""
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape or pred.size < 1:
        raise ValueError("binary_accuracy expects two equal-length vectors")
    if not np.all(np.isin(target, (0.0, 1.0))):
        raise ValueError("targets must be binary (0 or 1)")
    rounded = np.where(pred >= 0.5, 1.0, 0.0)
    return float(np.mean(rounded == target))


@dataclass(frozen=True)
class SplitSpec:
    """Chronological train/test split: train prefix, test suffix.

    ``shuffle`` applies one joint permutation to the dataset before the
    reservoir runs; it is a control that destroys temporal correlations
    and is only meant for memory-ablation experiments.
    """

    k_train: int
    k_test: int
    shuffle: bool = False
    shuffle_seed: int = 1

    def __post_init__(self):
        if self.k_train < 1 or self.k_test < 1:
            raise ValueError(
                f"split needs k_train >= 1 and k_test >= 1, "
                f"got {self.k_train}/{self.k_test}"
            )

    @property
    def K(self) -> int:
        return self.k_train + self.k_test

    @classmethod
    def from_fraction(cls, K: int, train_fraction: float, **kwargs) -> "SplitSpec":
        if not 0.0 < train_fraction < 1.0:
            raise ValueError(f"train fraction must be in (0, 1), got {train_fraction}")
        k_train = int(K * train_fraction)
        return cls(k_train=k_train, k_test=K - k_train, **kwargs)


@dataclass(frozen=True)
class MetricsReport:
    """Evaluation summary for one trained configuration."""

    mse: float
    r2: float
    gram_rank: int
    accuracy: float | None = None
    per_delay_r2: tuple[float, ...] | None = None
    capacity: float | None = None
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out = {"mse": self.mse, "r2": self.r2, "gram_rank": self.gram_rank}
        if self.accuracy is not None:
            out["accuracy"] = self.accuracy
        if self.per_delay_r2 is not None:
            out["per_delay_r2"] = list(self.per_delay_r2)
        if self.capacity is not None:
            out["capacity"] = self.capacity
        if self.flags:
            out["flags"] = list(self.flags)
        return out

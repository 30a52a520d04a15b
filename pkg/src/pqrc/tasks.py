"""Deterministic input/target generators for the benchmark tasks.

Every generator is a pure function of its arguments; stochastic tasks
take an explicit seed.  Inputs always lie in [0, 1] (the Mackey-Glass
signal is min-max normalized), and ``valid_from`` marks the first index
whose target is well defined given the task's lookback.
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from pqrc.errors import ConfigError, DivergenceError

TASK_KINDS = ("memory", "monomial", "polynomial", "xor", "narma", "mackey_glass")

#: Name of the swept parameter for each task family.
TASK_PARAM = {
    "memory": "d",
    "monomial": "n",
    "polynomial": "N",
    "xor": "d",
    "narma": "N",
    "mackey_glass": "t_f",
}

DIVERGENCE_LIMIT = 1e6


@dataclass(frozen=True)
class Dataset:
    """Input sequence, targets, and the first index with a valid target."""

    inputs: np.ndarray
    targets: np.ndarray
    valid_from: int = 0

    def __post_init__(self):
        if self.inputs.shape != self.targets.shape or self.inputs.ndim != 1:
            raise ValueError("inputs and targets must be equal-length vectors")
        if not np.all(np.isfinite(self.targets)):
            raise ValueError("targets contain non-finite values")

    @property
    def K(self) -> int:
        return self.inputs.size


@dataclass(frozen=True)
class NarmaParams:
    """Constants of the autoregressive benchmark recurrence."""

    alpha: float = 0.3
    beta: float = 0.05
    gamma: float = 50.0
    delta: float = 0.1
    mu: float = 0.0
    nu: float = 0.2


@dataclass(frozen=True)
class MackeyGlassParams:
    """Delay-differential benchmark and its integration settings.

    ``tau/h`` and ``dt_sample/h`` must be integers so the delay ring
    buffer and the subsampling grid stay aligned.  ``transient=None``
    defaults to ten delay times.
    """

    alpha: float = 0.2
    beta: float = 10.0
    gamma: float = 0.1
    tau: float = 17.0
    h: float = 0.1
    history: float = 1.2
    transient: float | None = None
    dt_sample: float = 1.0

    def __post_init__(self):
        if self.h <= 0:
            raise ConfigError(f"integration step must be > 0, got {self.h}")
        for name, value in (("tau", self.tau), ("dt_sample", self.dt_sample)):
            ratio = value / self.h
            if abs(ratio - round(ratio)) > 1e-9:
                raise ConfigError(
                    f"{name}={value} is not an integer multiple of h={self.h}"
                )

    @property
    def transient_time(self) -> float:
        return 10.0 * self.tau if self.transient is None else self.transient


def gen_memory(K: int, d: int, seed: int) -> Dataset:
    """Recall task: reproduce the input from ``d`` cycles earlier."""
    if not 0 <= d < K:
        raise ValueError(f"delay must satisfy 0 <= d < K, got d={d}, K={K}")
    s = np.random.default_rng(seed).uniform(0.0, 1.0, K)
    y = np.zeros(K)
    y[d:] = s[: K - d]
    return Dataset(inputs=s, targets=y, valid_from=d)


def _ordered_grid(K: int) -> np.ndarray:
    if K < 2:
        raise ValueError(f"grid tasks need K >= 2, got {K}")
    return np.arange(K) / (K - 1)


def gen_monomial(K: int, n: int) -> Dataset:
    """Reconstruct x**n over the ordered equispaced input grid."""
    if n < 1:
        raise ValueError(f"monomial degree must be >= 1, got {n}")
    s = _ordered_grid(K)
    return Dataset(inputs=s, targets=s**n)


def gen_polynomial(K: int, N: int) -> Dataset:
    """Reconstruct the alternating polynomial sum_{n=1..N} (-1)^n x**n."""
    if N < 1:
        raise ValueError(f"polynomial order must be >= 1, got {N}")
    s = _ordered_grid(K)
    y = np.zeros(K)
    for n in range(1, N + 1):
        y += (-1) ** n * s**n
    return Dataset(inputs=s, targets=y)


def gen_xor(K: int, d: int, seed: int) -> Dataset:
    """Temporal parity of binary inputs separated by ``d`` cycles."""
    if not 1 <= d < K:
        raise ValueError(f"delay must satisfy 1 <= d < K, got d={d}, K={K}")
    s = np.random.default_rng(seed).integers(0, 2, K).astype(float)
    y = np.zeros(K)
    y[d:] = np.logical_xor(s[d:], s[:-d]).astype(float)
    return Dataset(inputs=s, targets=y, valid_from=d)


def gen_narma(K: int, N: int, seed: int, params: NarmaParams = NarmaParams()) -> Dataset:
    """Autoregressive moving-average benchmark of order ``N``.

    The recurrence is seeded with zero history, so the first valid target
    is at index ``N``.  With the default constants the driving term is
    ``gamma * (u**3 + u**5)`` with ``u = mu + nu * s``; trajectories that
    exceed the divergence limit raise instead of emitting non-finite
    values.
    """
    if N < 1:
        raise ValueError(f"order must be >= 1, got {N}")
    if K <= N:
        raise ValueError(f"need K > N, got K={K}, N={N}")
    s = np.random.default_rng(seed).uniform(0.0, 1.0, K)
    u = params.mu + params.nu * s
    y = np.zeros(K)
    for k in range(N, K):
        y[k] = (
            params.alpha * y[k - 1]
            + params.beta * y[k - 1] * np.sum(y[k - N : k])
            + params.gamma * (u[k - 1] ** 3 + u[k - 1] ** 5)
            + params.delta
        )
        if not np.isfinite(y[k]) or abs(y[k]) > DIVERGENCE_LIMIT:
            raise DivergenceError(
                f"target diverged at step {k} (|y|={y[k]!r}) for order N={N}, "
                f"seed={seed}; check the recurrence constants"
            )
    return Dataset(inputs=s, targets=y, valid_from=N)


@lru_cache(maxsize=8)
def _integrate_delay_ode(params: MackeyGlassParams, n_steps: int) -> np.ndarray:
    """Fourth-order Runge-Kutta over a delay ring buffer.

    Delayed values at half steps come from cubic Hermite interpolation of
    the stored trajectory and its derivatives; delayed intervals that lie
    entirely inside the constant pre-history evaluate to the history value
    exactly (the derivative jump at t=0 would otherwise degrade the
    integrator to second order).  Cached: generators slice copies, never
    mutate the returned buffer.
    """
    a, b, g, h = params.alpha, params.beta, params.gamma, params.h
    lag = round(params.tau / h)

    def deriv(x: float, x_delayed: float) -> float:
        return a * x_delayed / (1.0 + x_delayed**b) - g * x

    s = np.empty(n_steps + lag + 1)
    f = np.empty(n_steps + lag + 1)
    s[: lag + 1] = params.history
    f[:lag] = 0.0
    f[lag] = deriv(params.history, params.history)
    for j in range(n_steps):
        i = j + lag
        sd0 = s[i - lag]
        sd1 = s[i - lag + 1]
        if i - lag + 1 <= lag:
            sd_mid = params.history
        else:
            sd_mid = 0.5 * (sd0 + sd1) + 0.125 * h * (f[i - lag] - f[i - lag + 1])
        x = s[i]
        k1 = deriv(x, sd0)
        k2 = deriv(x + 0.5 * h * k1, sd_mid)
        k3 = deriv(x + 0.5 * h * k2, sd_mid)
        k4 = deriv(x + h * k3, sd1)
        s[i + 1] = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        f[i + 1] = deriv(s[i + 1], s[i + 1 - lag])
    return s[lag:]


def mackey_glass_trajectory(params: MackeyGlassParams, n_samples: int) -> np.ndarray:
    """Raw (unnormalized) trajectory sampled every ``dt_sample`` time units,
    after discarding the startup transient."""
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    stride = round(params.dt_sample / params.h)
    skip = round(params.transient_time / params.h)
    n_steps = skip + (n_samples - 1) * stride
    full = _integrate_delay_ode(params, n_steps)
    return full[skip :: stride][:n_samples].copy()


def gen_mackey_glass(
    K: int, t_f: int, params: MackeyGlassParams = MackeyGlassParams()
) -> Dataset:
    """Chaotic forecasting task with prediction horizon ``t_f``.

    The trajectory is extended by ``t_f`` extra samples so every target
    ``y_k = s_{k+t_f}`` is defined; one min-max normalization over the
    whole sampled window maps the signal into [0, 1].
    """
    if t_f < 0:
        raise ValueError(f"prediction horizon must be >= 0, got {t_f}")
    raw = mackey_glass_trajectory(params, K + t_f)
    lo, hi = raw.min(), raw.max()
    if hi <= lo:
        raise DivergenceError("trajectory is constant; cannot normalize")
    x = (raw - lo) / (hi - lo)
    return Dataset(inputs=x[:K], targets=x[t_f : t_f + K])


def shuffle_dataset(ds: Dataset, seed: int) -> Dataset:
    """Jointly permute the (input, target) pairs of the valid region.

    Destroys temporal correlations while preserving the pointwise
    input-target relation; rows before ``valid_from`` stay in place.
    """
    perm = np.random.default_rng(seed).permutation(ds.K - ds.valid_from)
    idx = np.concatenate([np.arange(ds.valid_from), ds.valid_from + perm])
    return Dataset(
        inputs=ds.inputs[idx], targets=ds.targets[idx], valid_from=ds.valid_from
    )


def export_csv(ds: Dataset, path) -> None:
    """Write the dataset as ``k,s,y`` rows with full float precision."""
    with open(path, "w") as fh:
        fh.write("k,s,y\n")
        for k in range(ds.K):
            fh.write(
                f"{k},{format(float(ds.inputs[k]), '.17g')},"
                f"{format(float(ds.targets[k]), '.17g')}\n"
            )


@dataclass(frozen=True)
class TaskSpec:
    """Declarative description of one benchmark dataset."""

    kind: str
    K: int
    seed: int = 0
    d: int | None = None
    n: int | None = None
    N: int | None = None
    t_f: int | None = None
    narma: NarmaParams = field(default_factory=NarmaParams)
    mg: MackeyGlassParams = field(default_factory=MackeyGlassParams)

    def __post_init__(self):
        if self.kind not in TASK_KINDS:
            raise ConfigError(f"unknown task kind {self.kind!r}")
        if self.K < 10:
            raise ConfigError(f"K must be >= 10, got {self.K}")
        if self.param is None:
            raise ConfigError(
                f"task {self.kind!r} requires parameter {TASK_PARAM[self.kind]!r}"
            )

    @property
    def param_name(self) -> str:
        return TASK_PARAM[self.kind]

    @property
    def param(self) -> int | None:
        return getattr(self, self.param_name)

    def with_param(self, value: int) -> "TaskSpec":
        return replace(self, **{self.param_name: int(value)})

    def generate(self) -> Dataset:
        if self.kind == "memory":
            return gen_memory(self.K, self.d, self.seed)
        if self.kind == "monomial":
            return gen_monomial(self.K, self.n)
        if self.kind == "polynomial":
            return gen_polynomial(self.K, self.N)
        if self.kind == "xor":
            return gen_xor(self.K, self.d, self.seed)
        if self.kind == "narma":
            return gen_narma(self.K, self.N, self.seed, self.narma)
        return gen_mackey_glass(self.K, self.t_f, self.mg)

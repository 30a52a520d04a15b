"""Hyperparameter search over reservoir and readout settings.

Each task family gets its own optimized operating point: encoding and
feedback weights, the two outcome selectors driving the feedback loops,
the ridge strength, and the washout.  The default sampler is uniform
random search; a kernel-density sampler that exploits the top quantile
of past trials is available for budget-starved searches.  Trials are
independent; per-trial RNG streams derive from (seed, trial index), so a
log is reproducible regardless of execution order.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from pqrc.fock import PhotonInput, enumerate_basis
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
from pqrc.reservoir import MODE_COUNT, ReservoirConfig, feature_matrix, run_sequence
from pqrc.tasks import Dataset, TaskSpec, gen_memory

PARAM_NAMES = ("a_in", "a_fb_d", "a_fb_4", "mu_prime", "mu_dprime",
               "ridge_alpha", "washout")


@dataclass(frozen=True)
class SearchSpace:
    """Bounds and categorical choices for the tunable hyperparameters.

    The third-loop dimensions (``a_fb_b``, ``mu_tprime``) are searched
    only when ``third_loop`` is set, matching three-feedback reservoirs.
    """

    a_in: tuple[float, float] = (-math.pi, math.pi)
    a_fb_d: tuple[float, float] = (-math.pi, math.pi)
    a_fb_4: tuple[float, float] = (-math.pi, math.pi)
    mu_prime: tuple[int, ...] = ()
    mu_dprime: tuple[int, ...] = ()
    ridge_alpha: tuple[float, float] = (1e-25, 1e-1)
    washout: tuple[int, int] = (3, 50)
    third_loop: bool = False
    a_fb_b: tuple[float, float] = (-math.pi, math.pi)
    mu_tprime: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.mu_prime or not self.mu_dprime:
            raise ValueError("outcome selector choices must be non-empty")
        if self.third_loop and not self.mu_tprime:
            raise ValueError("third-loop search needs mu_tprime choices")

    def schema(self) -> dict:
        """Sampling recipe per parameter name."""
        entries = {
            "a_in": ("uniform", self.a_in),
            "a_fb_d": ("uniform", self.a_fb_d),
            "a_fb_4": ("uniform", self.a_fb_4),
            "mu_prime": ("choice", self.mu_prime),
            "mu_dprime": ("choice", self.mu_dprime),
            "ridge_alpha": ("log", self.ridge_alpha),
            "washout": ("int", self.washout),
        }
        if self.third_loop:
            entries["a_fb_b"] = ("uniform", self.a_fb_b)
            entries["mu_tprime"] = ("choice", self.mu_tprime)
        return entries

    def contains(self, params: dict) -> bool:
        for name, (kind, spec) in self.schema().items():
            value = params[name]
            if kind == "choice":
                if value not in spec:
                    return False
            elif not spec[0] <= value <= spec[1]:
                return False
        return True


def default_search_space(n_ph: int, third_loop: bool = False) -> SearchSpace:
    """Search space with outcome selectors sized to the photon basis."""
    dim = enumerate_basis(MODE_COUNT, n_ph).size
    outcomes = tuple(range(dim))
    return SearchSpace(
        mu_prime=outcomes,
        mu_dprime=outcomes,
        third_loop=third_loop,
        mu_tprime=outcomes if third_loop else (),
    )


@dataclass(frozen=True)
class Trial:
    """One evaluated point of the search."""

    number: int
    params: dict
    objective: float
    seed: int
    status: str
    duration: float = 0.0

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "params": self.params,
            "objective": self.objective,
            "seed": self.seed,
            "status": self.status,
            "duration": self.duration,
        }


def sample_params(space: SearchSpace, rng: np.random.Generator) -> dict:
    """Uniform draw: linear for phases, log-uniform for the ridge strength."""
    params = {}
    for name, (kind, spec) in space.schema().items():
        if kind == "uniform":
            params[name] = float(rng.uniform(*spec))
        elif kind == "log":
            lo, hi = np.log10(spec[0]), np.log10(spec[1])
            params[name] = float(10.0 ** rng.uniform(lo, hi))
        elif kind == "int":
            params[name] = int(rng.integers(spec[0], spec[1] + 1))
        else:  # choice
            params[name] = int(spec[rng.integers(len(spec))])
    return params


def _kde_draw_continuous(values, bounds, rng):
    values = np.asarray(values, dtype=float)
    spread = max(values.std(), (bounds[1] - bounds[0]) / 100.0)
    bw = 1.06 * spread * len(values) ** -0.2
    center = values[rng.integers(len(values))]
    return float(np.clip(rng.normal(center, bw), bounds[0], bounds[1]))


def _kde_draw_categorical(values, choices, rng):
    counts = np.array([1.0 + sum(v == c for v in values) for c in choices])
    return int(choices[rng.choice(len(choices), p=counts / counts.sum())])


def propose_kde(
    space: SearchSpace,
    completed: list[Trial],
    rng: np.random.Generator,
    top_fraction: float = 0.25,
    explore_prob: float = 0.1,
) -> dict:
    """Sample near the top quantile of past trials (exploit), with a
    residual uniform exploration probability."""
    if not completed or rng.uniform() < explore_prob:
        return sample_params(space, rng)
    ranked = sorted(completed, key=lambda t: t.objective)
    top = ranked[: max(1, math.ceil(top_fraction * len(ranked)))]
    params = {}
    for name, (kind, spec) in space.schema().items():
        values = [t.params[name] for t in top]
        if kind == "uniform":
            params[name] = _kde_draw_continuous(values, spec, rng)
        elif kind == "log":
            log_bounds = (np.log10(spec[0]), np.log10(spec[1]))
            drawn = _kde_draw_continuous(np.log10(values), log_bounds, rng)
            params[name] = float(10.0**drawn)
        elif kind == "int":
            params[name] = int(round(_kde_draw_continuous(values, spec, rng)))
        else:  # choice
            params[name] = _kde_draw_categorical(values, spec, rng)
    return params


def optimize(
    space: SearchSpace,
    objective,
    budget: int,
    seed: int,
    sampler: str = "random",
    jobs: int = 1,
) -> tuple[Trial, list[Trial]]:
    """Evaluate ``budget`` sampled points and return the argmin.

    Non-finite objective values mark the trial failed; failed trials
    count against the budget but are excluded from the argmin.  The
    random sampler draws every trial from ``default_rng([seed, i])`` and
    may evaluate in parallel (``jobs``); the KDE sampler is sequential
    because each proposal depends on earlier results.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    if sampler not in ("random", "kde"):
        raise ValueError(f"unknown sampler {sampler!r}")

    trials: list[Trial] = []
    if sampler == "random":
        all_params = [
            sample_params(space, np.random.default_rng([seed, i]))
            for i in range(budget)
        ]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                started = time.perf_counter()
                values = list(pool.map(objective, all_params))
                elapsed = (time.perf_counter() - started) / budget
            durations = [elapsed] * budget
        else:
            values, durations = [], []
            for params in all_params:
                t0 = time.perf_counter()
                values.append(objective(params))
                durations.append(time.perf_counter() - t0)
        for i, (params, value, duration) in enumerate(
            zip(all_params, values, durations)
        ):
            trials.append(_make_trial(i, params, value, seed, duration))
    else:
        n_startup = min(20, max(5, budget // 5))
        for i in range(budget):
            rng = np.random.default_rng([seed, i])
            completed = [t for t in trials if t.status == "ok"]
            if i < n_startup:
                params = sample_params(space, rng)
            else:
                params = propose_kde(space, completed, rng)
            t0 = time.perf_counter()
            value = objective(params)
            trials.append(_make_trial(i, params, value, seed,
                                      time.perf_counter() - t0))

    completed = [t for t in trials if t.status == "ok"]
    if not completed:
        raise RuntimeError("all trials failed; objective never returned finite")
    best = min(completed, key=lambda t: t.objective)
    return best, trials


def _make_trial(number, params, value, seed, duration) -> Trial:
    value = float(value)
    ok = math.isfinite(value)
    return Trial(
        number=number,
        params=params,
        objective=value if ok else math.inf,
        seed=seed,
        status="ok" if ok else "failed",
        duration=duration,
    )


# ---------------------------------------------------------------------------
# Full-pipeline evaluation
# ---------------------------------------------------------------------------


def shuffle_indices(K: int, valid_from: int, seed: int) -> np.ndarray:
    """Joint permutation used by the shuffled-control experiments."""
    perm = np.random.default_rng(seed).permutation(K - valid_from)
    return np.concatenate([np.arange(valid_from), valid_from + perm])


@dataclass(frozen=True)
class PipelineOutput:
    """Full artifacts of one pipeline evaluation.

    ``predictions`` covers every step (train prefix and test suffix); for
    memory tasks the prediction/target columns refer to the headline
    (largest) delay.
    """

    report: MetricsReport
    records: list
    inputs: np.ndarray
    targets: np.ndarray
    predictions: np.ndarray


def evaluate_config(
    task: TaskSpec,
    config: ReservoirConfig,
    photon: PhotonInput,
    split: SplitSpec,
    alpha: float,
    washout: int,
) -> MetricsReport:
    """Generate the dataset, run the reservoir, train and score the readout.

    Training uses the chronological prefix (after washout and the task's
    lookback); scoring uses the untouched suffix.  Memory tasks are
    scored at every delay from 0 up to the requested one, yielding the
    per-delay determination coefficients and their sum.
    """
    return evaluate_detailed(task, config, photon, split, alpha, washout).report


def evaluate_detailed(
    task: TaskSpec,
    config: ReservoirConfig,
    photon: PhotonInput,
    split: SplitSpec,
    alpha: float,
    washout: int,
) -> PipelineOutput:
    """Like :func:`evaluate_config` but keeps the step records and the
    full-sequence predictions for persistence."""
    ds, idx = _prepared_dataset(task, split)
    records = run_sequence(ds.inputs, config, photon)
    X = feature_matrix(records)
    if task.kind == "memory":
        report, targets, predictions = _score_memory(
            X, task, idx, split.k_train, alpha, washout
        )
    else:
        report, targets, predictions = _score_target(
            X, ds, task.kind, split.k_train, alpha, washout
        )
    return PipelineOutput(
        report=report,
        records=records,
        inputs=ds.inputs,
        targets=targets,
        predictions=predictions,
    )


def evaluate_grid(
    task: TaskSpec,
    values,
    config: ReservoirConfig,
    photon: PhotonInput,
    split: SplitSpec,
    alpha: float,
    washout: int,
) -> list[tuple[int, MetricsReport]]:
    """Evaluate one configuration across a task-parameter grid.

    When the input sequence does not depend on the swept parameter (all
    families except Mackey-Glass, whose normalization window moves with
    the horizon), the reservoir runs once and only the readout is
    retrained per grid value.
    """
    values = [int(v) for v in values]
    if task.kind in ("mackey_glass", "memory"):
        return [
            (v, evaluate_config(task.with_param(v), config, photon, split,
                                alpha, washout))
            for v in values
        ]
    raw_inputs = task.with_param(values[0]).generate().inputs
    ds0, idx = _prepared_dataset(task.with_param(values[0]), split)
    X = feature_matrix(run_sequence(ds0.inputs, config, photon))
    out = []
    for v in values:
        ds = task.with_param(v).generate()
        if not np.array_equal(ds.inputs, raw_inputs):
            raise ValueError(
                f"inputs of {task.kind!r} depend on its parameter; "
                "the shared reservoir run is invalid"
            )
        if idx is not None:
            ds = Dataset(inputs=ds.inputs[idx], targets=ds.targets[idx],
                         valid_from=ds.valid_from)
        report, _, _ = _score_target(X, ds, task.kind, split.k_train,
                                     alpha, washout)
        out.append((v, report))
    return out


def _prepared_dataset(task: TaskSpec, split: SplitSpec) -> tuple[Dataset, np.ndarray | None]:
    ds = task.generate()
    if split.K != ds.K:
        raise ValueError(f"split covers {split.K} rows but dataset has {ds.K}")
    if not split.shuffle:
        return ds, None
    idx = shuffle_indices(ds.K, ds.valid_from, split.shuffle_seed)
    shuffled = Dataset(
        inputs=ds.inputs[idx], targets=ds.targets[idx], valid_from=ds.valid_from
    )
    return shuffled, idx


def _score_memory(X, task, idx, k_tr, alpha, washout):
    flags: list[str] = []
    per_delay = []
    mse = 0.0
    targets = predictions = None
    for d in range(task.d + 1):
        y = gen_memory(task.K, d, task.seed).targets
        if idx is not None:
            y = y[idx]
        full_pred, fit_flags = _fit_predict(X, y, k_tr, alpha, max(washout, d))
        pred_ts = full_pred[k_tr:]
        flags.extend(fit_flags)
        per_delay.append(_safe_r2(pred_ts, y[k_tr:], flags))
        if d == task.d:
            mse = mse_score(pred_ts, y[k_tr:])
            targets, predictions = y, full_pred
    report = MetricsReport(
        mse=mse,
        r2=per_delay[-1],
        gram_rank=gram_effective_rank(X),
        per_delay_r2=tuple(per_delay),
        capacity=memory_capacity(per_delay),
        flags=tuple(dict.fromkeys(flags)),
    )
    return report, targets, predictions


def _score_target(X, ds: Dataset, kind: str, k_tr, alpha, washout):
    flags: list[str] = []
    wash_eff = max(washout, ds.valid_from)
    full_pred, fit_flags = _fit_predict(X, ds.targets, k_tr, alpha, wash_eff)
    pred_ts = full_pred[k_tr:]
    flags.extend(fit_flags)
    y_ts = ds.targets[k_tr:]
    accuracy = binary_accuracy(pred_ts, y_ts) if kind == "xor" else None
    report = MetricsReport(
        mse=mse_score(pred_ts, y_ts),
        r2=_safe_r2(pred_ts, y_ts, flags),
        gram_rank=gram_effective_rank(X),
        accuracy=accuracy,
        flags=tuple(dict.fromkeys(flags)),
    )
    return report, ds.targets, full_pred


def _fit_predict(X, y, k_tr, alpha, washout):
    model = ridge_fit(X[:k_tr], y[:k_tr], alpha, washout)
    flags = ["pseudoinverse"] if model.used_pseudoinverse else []
    return predict(model, X), flags


def _safe_r2(pred, target, flags: list[str]) -> float:
    if np.var(pred) == 0.0 or np.var(target) == 0.0:
        if "degenerate_r2" not in flags:
            flags.append("degenerate_r2")
        return 0.0
    return r2_score(pred, target)


def task_objective(kind: str, report: MetricsReport) -> float:
    """Scalar loss per task family (lower is better)."""
    if kind == "memory":
        return -report.capacity
    if kind == "xor":
        return -report.accuracy
    return report.mse


@dataclass(frozen=True)
class EvalSetup:
    """Picklable bundle fixing everything a trial evaluation needs."""

    task: TaskSpec
    base_config: ReservoirConfig
    photon: PhotonInput
    split: SplitSpec
    #: extra task-parameter values evaluated jointly (aggregate objective);
    #: empty means the task's own parameter alone.
    grid: tuple[int, ...] = ()

    def apply(self, params: dict) -> ReservoirConfig:
        fields = {
            name: params[name]
            for name in ("a_in", "a_fb_d", "a_fb_4", "mu_prime", "mu_dprime",
                         "a_fb_b", "mu_tprime")
            if name in params
        }
        return replace(self.base_config, **fields)


def evaluate_trial(params: dict, setup: EvalSetup) -> float:
    """Objective for one sampled hyperparameter point.

    With a non-empty grid the objective is the mean log10 loss across the
    task-parameter grid, so a single operating point is optimized for the
    whole task family.  Sampled points that drive the reservoir into a
    numerically degenerate orbit (the readout solve cannot meet its
    residual bound) come back as NaN, which the optimizer records as a
    failed trial.
    """
    config = setup.apply(params)
    alpha, washout = params["ridge_alpha"], params["washout"]
    try:
        if not setup.grid:
            report = evaluate_config(
                setup.task, config, setup.photon, setup.split, alpha, washout
            )
            return task_objective(setup.task.kind, report)
        scored = evaluate_grid(
            setup.task, setup.grid, config, setup.photon, setup.split, alpha,
            washout,
        )
        losses = [
            math.log10(max(task_objective(setup.task.kind, report), 1e-30))
            for _, report in scored
        ]
        return float(np.mean(losses))
    except (ArithmeticError, np.linalg.LinAlgError):
        return math.nan

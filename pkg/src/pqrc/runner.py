"""Experiment orchestration and result persistence.

``run_experiment`` executes one configuration (optionally after a
hyperparameter search) across Monte Carlo replicas and bundles metrics,
predictions, and step traces.  ``characterize`` produces the long-format
sweep tables behind the standard comparison plots.  All files are
reproducible from config plus seeds; floats are written with 17
significant digits.
"""

from dataclasses import dataclass, replace
from functools import partial
from pathlib import Path

import numpy as np

import pqrc
from pqrc.config import ExperimentConfig, resolved_dict
from pqrc.errors import ConfigError
from pqrc.fock import PhotonInput, enumerate_basis
from pqrc.hyperopt import (
    EvalSetup,
    PipelineOutput,
    Trial,
    default_search_space,
    evaluate_detailed,
    evaluate_grid,
    evaluate_trial,
    optimize,
)
from pqrc.presets import PHOTON_SETTINGS
from pqrc.readout import MetricsReport
from pqrc.reservoir import MODE_COUNT, ReservoirConfig

SUITES = (
    "memory",
    "expressivity",
    "counts_sweep",
    "visibility_sweep",
    "photon_sweep",
    "feedback_sweep",
)

DEFAULT_GRIDS = {
    "monomial": tuple(range(2, 14)),
    "polynomial": tuple(range(1, 8)),
    "narma": tuple(range(1, 9)),
    "xor": tuple(range(1, 7)),
    "mackey_glass": tuple(range(0, 13)),
}

COUNTS_GRID = (100, 1000, 10000, None)
VISIBILITY_GRID = (0.0, 0.5, 1.0)
PHOTON_GRID = ("1ph", "2ph_dist", "2ph_indist", "3ph_indist")
FEEDBACK_GRID = ("two_step", "three_loop")


@dataclass(frozen=True)
class ResultBundle:
    """Everything one `run` produces, before serialization."""

    resolved: dict
    reports: list[MetricsReport]
    outputs: list[PipelineOutput]
    k_train: int
    basis_labels: list[str]
    best_params: dict | None = None
    best_objective: float | None = None
    trials: list[Trial] | None = None

    @property
    def aggregate(self) -> dict:
        return aggregate_reports(self.reports)


@dataclass(frozen=True)
class SweepRow:
    sweep_variable: str
    value: object
    metric: str
    replica: int
    result: float


def _std(values) -> float:
    return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


def aggregate_reports(reports: list[MetricsReport]) -> dict:
    """Median and std across replicas, metric by metric."""
    agg = {}
    for key in ("mse", "r2", "accuracy", "capacity", "gram_rank"):
        values = [getattr(r, key) for r in reports if getattr(r, key) is not None]
        if values:
            agg[key] = {"median": float(np.median(values)), "std": _std(values)}
    delays = [r.per_delay_r2 for r in reports if r.per_delay_r2 is not None]
    if delays:
        arr = np.asarray(delays)
        agg["per_delay_r2"] = {
            "median": [float(x) for x in np.median(arr, axis=0)],
            "std": [_std(arr[:, d]) for d in range(arr.shape[1])],
        }
    return agg


def _search(config: ExperimentConfig, base: ReservoirConfig,
            photon: PhotonInput, jobs: int, grid=(), seed_offset: int = 0):
    """Run the configured hyperparameter search; returns the operating point."""
    settings = config.hyperopt
    setup = EvalSetup(
        task=config.task,
        base_config=base,
        photon=photon,
        split=config.split,
        grid=tuple(grid),
    )
    space = default_search_space(
        photon.n_ph, third_loop=base.feedback_mode == "three_loop"
    )
    best, trials = optimize(
        space,
        partial(evaluate_trial, setup=setup),
        budget=settings.budget,
        seed=settings.seed + seed_offset,
        sampler=settings.sampler,
        jobs=jobs,
    )
    return (
        setup.apply(best.params),
        best.params["ridge_alpha"],
        best.params["washout"],
        best,
        trials,
    )


def _operating_point(config: ExperimentConfig, base: ReservoirConfig,
                     photon: PhotonInput, jobs: int, grid=(),
                     seed_offset: int = 0):
    """Either the fixed readout/reservoir point or the searched one."""
    if config.optimize_readout:
        return _search(config, base, photon, jobs, grid, seed_offset)
    return base, config.readout.alpha, config.readout.washout, None, None


def _replica_count(config: ExperimentConfig, point: ReservoirConfig) -> int:
    return config.replicas if point.n_shot is not None else 1


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> ResultBundle:
    """Evaluate the configuration across its Monte Carlo replicas."""
    point, alpha, washout, best, trials = _operating_point(
        config, config.reservoir, config.photon, jobs
    )
    reports, outputs = [], []
    for i in range(_replica_count(config, point)):
        out = evaluate_detailed(
            config.task,
            replace(point, seed=point.seed + i),
            config.photon,
            config.split,
            alpha,
            washout,
        )
        reports.append(out.report)
        outputs.append(out)
    return ResultBundle(
        resolved=resolved_dict(config),
        reports=reports,
        outputs=outputs,
        k_train=config.split.k_train,
        basis_labels=enumerate_basis(MODE_COUNT, config.photon.n_ph).labels(),
        best_params=None if best is None else best.params,
        best_objective=None if best is None else best.objective,
        trials=trials,
    )


# ---------------------------------------------------------------------------
# Characterization sweeps
# ---------------------------------------------------------------------------


def characterize(config: ExperimentConfig, suite: str, grid=None,
                 jobs: int = 1) -> list[SweepRow]:
    """Produce the long-format rows of one characterization suite."""
    if suite == "memory":
        return _sweep_memory(config, grid, jobs)
    if suite == "expressivity":
        return _sweep_task_param(config, grid, jobs)
    if suite == "counts_sweep":
        return _sweep_counts(config, grid, jobs)
    if suite == "visibility_sweep":
        return _sweep_visibility(config, grid, jobs)
    if suite == "photon_sweep":
        return _sweep_photon(config, grid, jobs)
    if suite == "feedback_sweep":
        return _sweep_feedback(config, grid, jobs)
    raise ConfigError(f"unknown suite {suite!r}; choose from {SUITES}")


def _memory_rows(config, task, point, alpha, washout, delays, variable, value,
                 rows):
    """Per-delay rows for every replica of one memory-task operating point."""
    for i in range(_replica_count(config, point)):
        out = evaluate_detailed(
            task, replace(point, seed=point.seed + i), config.photon,
            config.split, alpha, washout,
        )
        for d in delays:
            name = "r2_d" if variable == "d" else f"r2_d{d}"
            row_value = d if variable == "d" else value
            rows.append(SweepRow(variable, row_value, name, i,
                                 out.report.per_delay_r2[d]))
        rows.append(SweepRow(variable, value if variable != "d" else max(delays),
                             "capacity", i, out.report.capacity))


def _sweep_memory(config, grid, jobs) -> list[SweepRow]:
    if config.task.kind != "memory":
        raise ConfigError("memory suite requires a memory task")
    delays = tuple(int(d) for d in grid) if grid else tuple(range(config.task.d + 1))
    task = config.task.with_param(max(delays))
    swept = replace(config, task=task)
    point, alpha, washout, _, _ = _operating_point(
        swept, config.reservoir, config.photon, jobs
    )
    rows: list[SweepRow] = []
    _memory_rows(swept, task, point, alpha, washout, delays, "d", None, rows)
    return rows


def _report_rows(variable, value, replica, report, rows):
    rows.append(SweepRow(variable, value, "mse", replica, report.mse))
    rows.append(SweepRow(variable, value, "r2", replica, report.r2))
    if report.accuracy is not None:
        rows.append(SweepRow(variable, value, "accuracy", replica,
                             report.accuracy))


def _sweep_task_param(config, grid, jobs) -> list[SweepRow]:
    task = config.task
    if task.kind == "memory":
        raise ConfigError("use the memory suite for memory tasks")
    values = tuple(int(v) for v in grid) if grid else DEFAULT_GRIDS[task.kind]
    rows: list[SweepRow] = []
    if task.kind in ("monomial", "polynomial"):
        # one operating point serves the whole family
        point, alpha, washout, _, _ = _operating_point(
            config, config.reservoir, config.photon, jobs, grid=values
        )
        for i in range(_replica_count(config, point)):
            scored = evaluate_grid(
                task, values, replace(point, seed=point.seed + i),
                config.photon, config.split, alpha, washout,
            )
            for value, report in scored:
                _report_rows(task.param_name, value, i, report, rows)
        return rows
    for index, value in enumerate(values):
        swept = replace(config, task=task.with_param(value))
        point, alpha, washout, _, _ = _operating_point(
            swept, config.reservoir, config.photon, jobs, seed_offset=index
        )
        for i in range(_replica_count(config, point)):
            out = evaluate_detailed(
                swept.task, replace(point, seed=point.seed + i), config.photon,
                config.split, alpha, washout,
            )
            _report_rows(task.param_name, value, i, out.report, rows)
    return rows


def _sweep_counts(config, grid, jobs) -> list[SweepRow]:
    values = tuple(grid) if grid else COUNTS_GRID
    # the operating point is searched once on exact probabilities and
    # reused across the whole budget grid
    ideal = replace(config.reservoir, n_shot=None)
    point, alpha, washout, _, _ = _operating_point(config, ideal, config.photon, jobs)
    rows: list[SweepRow] = []
    for value in values:
        n_shot = None if value in (None, "inf") else int(value)
        swept_point = replace(point, n_shot=n_shot)
        for i in range(_replica_count(config, swept_point)):
            out = evaluate_detailed(
                config.task, replace(swept_point, seed=swept_point.seed + i),
                config.photon, config.split, alpha, washout,
            )
            _report_rows("n_shot", "inf" if n_shot is None else n_shot, i,
                         out.report, rows)
    return rows


def _sweep_visibility(config, grid, jobs) -> list[SweepRow]:
    values = tuple(float(v) for v in grid) if grid else VISIBILITY_GRID
    rows: list[SweepRow] = []
    for index, v in enumerate(values):
        photon = PhotonInput(
            n_ph=config.photon.n_ph,
            input_modes=config.photon.input_modes,
            visibility=v,
        )
        point, alpha, washout, _, _ = _operating_point(
            config, config.reservoir, photon, jobs, seed_offset=index
        )
        for i in range(_replica_count(config, point)):
            out = evaluate_detailed(
                config.task, replace(point, seed=point.seed + i), photon,
                config.split, alpha, washout,
            )
            _report_rows("V", v, i, out.report, rows)
    return rows


def _sweep_photon(config, grid, jobs) -> list[SweepRow]:
    labels = tuple(grid) if grid else PHOTON_GRID
    rows: list[SweepRow] = []
    for index, label in enumerate(labels):
        if label not in PHOTON_SETTINGS:
            raise ConfigError(
                f"unknown photon configuration {label!r}; "
                f"choose from {sorted(PHOTON_SETTINGS)}"
            )
        settings = PHOTON_SETTINGS[label]
        photon = PhotonInput(
            n_ph=settings["n_ph"],
            input_modes=tuple(settings["input_modes"]),
            visibility=settings["visibility"],
        )
        point, alpha, washout, _, _ = _operating_point(
            config, config.reservoir, photon, jobs, seed_offset=index
        )
        for i in range(_replica_count(config, point)):
            out = evaluate_detailed(
                config.task, replace(point, seed=point.seed + i), photon,
                config.split, alpha, washout,
            )
            _report_rows("photon", label, i, out.report, rows)
    return rows


def _sweep_feedback(config, grid, jobs) -> list[SweepRow]:
    if config.task.kind != "memory":
        raise ConfigError("feedback sweep requires a memory task")
    modes = tuple(grid) if grid else FEEDBACK_GRID
    delays = tuple(range(config.task.d + 1))
    rows: list[SweepRow] = []
    for index, mode in enumerate(modes):
        base = replace(config.reservoir, feedback_mode=mode)
        point, alpha, washout, _, _ = _operating_point(
            config, base, config.photon, jobs, seed_offset=index
        )
        _memory_rows(config, config.task, point, alpha, washout, delays,
                     "feedback_mode", mode, rows)
    return rows


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def fmt(value) -> str:
    """CSV cell formatting; floats carry 17 significant digits."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_bundle(bundle: ResultBundle, outdir: str | Path) -> list[Path]:
    """Write results.json, predictions.csv, trace.csv (and trials.jsonl)."""
    import json

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        results = {
            "artifact_version": f"pqrc {pqrc.__version__}",
            "config": bundle.resolved,
            "aggregate": bundle.aggregate,
            "replicas": [r.to_dict() for r in bundle.reports],
        }
        if bundle.best_params is not None:
            results["hyperopt"] = {
                "best_params": bundle.best_params,
                "best_objective": bundle.best_objective,
                "n_trials": len(bundle.trials),
            }
        path = outdir / "results.json"
        path.write_text(json.dumps(results, indent=2, sort_keys=True) + "\n")
        written.append(path)

        path = outdir / "predictions.csv"
        with path.open("w") as fh:
            fh.write("replica,k,split,input,target,prediction\n")
            for i, out in enumerate(bundle.outputs):
                for k in range(out.inputs.size):
                    split = "train" if k < bundle.k_train else "test"
                    fh.write(
                        f"{i},{k},{split},{fmt(float(out.inputs[k]))},"
                        f"{fmt(float(out.targets[k]))},"
                        f"{fmt(float(out.predictions[k]))}\n"
                    )
        written.append(path)

        path = outdir / "trace.csv"
        with path.open("w") as fh:
            fh.write("k,s_k,phi_B,phi_D,phi_4," + ",".join(bundle.basis_labels) + "\n")
            for rec in bundle.outputs[0].records:
                probs = ",".join(fmt(float(p)) for p in rec.probs)
                fh.write(
                    f"{rec.k},{fmt(rec.s_k)},{fmt(rec.phases.phi_b)},"
                    f"{fmt(rec.phases.phi_d)},{fmt(rec.phases.phi_4)},{probs}\n"
                )
        written.append(path)

        if bundle.trials is not None:
            path = outdir / "trials.jsonl"
            with path.open("w") as fh:
                for trial in bundle.trials:
                    fh.write(json.dumps(trial.to_dict(), sort_keys=True) + "\n")
            written.append(path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written


def write_sweep(rows: list[SweepRow], outdir: str | Path) -> Path:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "sweep.csv"
    try:
        with path.open("w") as fh:
            fh.write("sweep_variable,value,metric,replica,result\n")
            for row in rows:
                fh.write(
                    f"{row.sweep_variable},{fmt(row.value)},{row.metric},"
                    f"{row.replica},{fmt(float(row.result))}\n"
                )
    except BaseException:
        path.unlink(missing_ok=True)
        raise
    return path

"""Experiment configuration: JSON loading, validation, default resolution.

A config file is a single JSON object wiring a task, a photon input, a
reservoir operating point, the train/test split, and either fixed readout
settings or a hyperparameter search.  Out-of-range feedback weights are
wrapped into [-pi, pi) modulo 2*pi; every applied normalization is
reported as a note so ``validate`` can echo exactly what will run.
"""

import json
import math
import os
from dataclasses import asdict, dataclass
from pathlib import Path

from pqrc.circuit import Gate
from pqrc.errors import ConfigError
from pqrc.fock import MAX_PHOTONS, PhotonInput, fock_dim
from pqrc.readout import SplitSpec
from pqrc.reservoir import MODE_COUNT, ReservoirConfig
from pqrc.tasks import MackeyGlassParams, NarmaParams, TaskSpec

#: Default injection modes per photon number.
DEFAULT_INPUT_MODES = {1: (0,), 2: (0, 3), 3: (0, 1, 3), 4: (0, 1, 2, 3)}

OUTPUT_DIR_ENV = "PQRC_OUTPUT_DIR"


def wrap_phase(value: float) -> float:
    """Map a phase-like quantity into [-pi, pi) modulo 2*pi."""
    return (value + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class HyperoptSettings:
    budget: int = 200
    seed: int = 0
    sampler: str = "random"

    def __post_init__(self):
        if self.budget < 1:
            raise ConfigError(f"hyperopt budget must be >= 1, got {self.budget}")
        if self.sampler not in ("random", "kde"):
            raise ConfigError(f"unknown sampler {self.sampler!r}")


@dataclass(frozen=True)
class ReadoutSettings:
    alpha: float
    washout: int

    def __post_init__(self):
        if self.alpha < 0:
            raise ConfigError(f"readout alpha must be >= 0, got {self.alpha}")
        if self.washout < 0:
            raise ConfigError(f"washout must be >= 0, got {self.washout}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, fully resolved experiment description."""

    task: TaskSpec
    photon: PhotonInput
    reservoir: ReservoirConfig
    split: SplitSpec
    readout: ReadoutSettings | None
    hyperopt: HyperoptSettings | None
    replicas: int
    output_dir: str
    gates: tuple[Gate, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def optimize_readout(self) -> bool:
        return self.readout is None


_REQUIRED = object()


class _Section:
    """Typed accessor over one JSON object, with path-aware errors."""

    def __init__(self, data: dict, path: str):
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected an object, got {type(data).__name__}")
        self.data = dict(data)
        self.path = path

    def take(self, key, types, default=_REQUIRED, choices=None):
        if key not in self.data:
            if default is _REQUIRED:
                raise ConfigError(f"{self.path}.{key}: required field is missing")
            return default
        value = self.data.pop(key)
        if isinstance(value, bool) and bool not in types:
            raise ConfigError(f"{self.path}.{key}: expected {types}, got a boolean")
        if not isinstance(value, tuple(types)):
            names = "/".join(t.__name__ for t in types)
            raise ConfigError(
                f"{self.path}.{key}: expected {names}, got {type(value).__name__}"
            )
        if choices is not None and value not in choices:
            raise ConfigError(
                f"{self.path}.{key}: {value!r} is not one of {sorted(choices)}"
            )
        return value

    def subsection(self, key, required=False):
        if key not in self.data:
            if required:
                raise ConfigError(f"{self.path}.{key}: required section is missing")
            return None
        return _Section(self.data.pop(key), f"{self.path}.{key}")

    def finish(self):
        if self.data:
            stray = sorted(self.data)
            raise ConfigError(f"{self.path}: unknown field(s) {stray}")


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a config file; raises ConfigError with location."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(
            f"{path}: line {err.lineno} column {err.colno}: {err.msg}"
        ) from err
    return parse_config(data)


def parse_config(data: dict) -> ExperimentConfig:
    root = _Section(data, "config")
    notes: list[str] = []

    task = _parse_task(root.subsection("task", required=True))
    photon = _parse_photon(root.subsection("photon", required=True), notes)
    reservoir = _parse_reservoir(
        root.subsection("reservoir", required=True), notes
    )
    split = _parse_split(root.subsection("split"), task.K)
    readout, hyperopt = _parse_readout_hyperopt(root, notes)
    replicas = root.take("replicas", (int,), 1)
    if replicas < 1:
        raise ConfigError(f"config.replicas: must be >= 1, got {replicas}")
    if reservoir.n_shot is None and replicas > 1:
        notes.append(
            f"replicas reduced {replicas} -> 1: noiseless runs are identical"
        )
        replicas = 1
    output_dir = root.take("output_dir", (str,), "out")
    gates = ()
    if "gates" in root.data:
        gates = _parse_gates(root.take("gates", (list,)))
    root.finish()

    config = ExperimentConfig(
        task=task,
        photon=photon,
        reservoir=reservoir,
        split=split,
        readout=readout,
        hyperopt=hyperopt,
        replicas=replicas,
        output_dir=output_dir,
        gates=gates,
        notes=tuple(notes),
    )
    _cross_validate(config)
    return config


def _parse_task(sec: _Section) -> TaskSpec:
    kind = sec.take("kind", (str,))
    kwargs = dict(
        kind=kind,
        K=sec.take("K", (int,)),
        seed=sec.take("seed", (int,), 0),
    )
    for name in ("d", "n", "N", "t_f"):
        if name in sec.data:
            kwargs[name] = sec.take(name, (int,))
    narma = sec.subsection("narma_params")
    if narma is not None:
        kwargs["narma"] = NarmaParams(
            **{k: narma.take(k, (int, float), getattr(NarmaParams, k))
               for k in ("alpha", "beta", "gamma", "delta", "mu", "nu")}
        )
        narma.finish()
    mg = sec.subsection("mg_params")
    if mg is not None:
        fields = {}
        for k in ("alpha", "beta", "gamma", "tau", "h", "history", "dt_sample"):
            fields[k] = mg.take(k, (int, float), getattr(MackeyGlassParams, k))
        transient = mg.take("transient", (int, float), None)
        if transient is not None:
            fields["transient"] = float(transient)
        kwargs["mg"] = MackeyGlassParams(**fields)
        mg.finish()
    sec.finish()
    try:
        return TaskSpec(**kwargs)
    except TypeError as err:
        raise ConfigError(f"config.task: {err}") from err


def _parse_photon(sec: _Section, notes: list[str]) -> PhotonInput:
    n_ph = sec.take("n_ph", (int,))
    if not 1 <= n_ph <= MAX_PHOTONS:
        raise ConfigError(
            f"config.photon.n_ph: must be in [1, {MAX_PHOTONS}], got {n_ph}"
        )
    modes = sec.take("input_modes", (list,), None)
    if modes is None:
        modes = DEFAULT_INPUT_MODES[n_ph]
        notes.append(f"input_modes defaulted to {list(modes)} for n_ph={n_ph}")
    visibility = float(sec.take("visibility", (int, float), 1.0))
    sec.finish()
    if any(not isinstance(m, int) or not 0 <= m < MODE_COUNT for m in modes):
        raise ConfigError(
            f"config.photon.input_modes: entries must be integers in "
            f"[0, {MODE_COUNT}), got {modes}"
        )
    try:
        return PhotonInput(n_ph=n_ph, input_modes=tuple(modes), visibility=visibility)
    except ValueError as err:
        raise ConfigError(f"config.photon: {err}") from err


def _parse_reservoir(sec: _Section, notes: list[str]) -> ReservoirConfig:
    weights = {}
    for name in ("a_in", "a_fb_d", "a_fb_4", "a_fb_b"):
        default = 0.0
        raw = float(sec.take(name, (int, float), default))
        wrapped = wrap_phase(raw)
        if abs(wrapped - raw) > 1e-12:
            notes.append(f"{name} wrapped into [-pi, pi): {raw} -> {wrapped}")
        weights[name] = wrapped
    n_shot = sec.take("n_shot", (int, str, type(None)), None)
    if isinstance(n_shot, str):
        if n_shot != "inf":
            raise ConfigError(
                f'config.reservoir.n_shot: string value must be "inf", got {n_shot!r}'
            )
        n_shot = None
    config = ReservoirConfig(
        mu_prime=sec.take("mu_prime", (int,), 0),
        mu_dprime=sec.take("mu_dprime", (int,), 0),
        mu_tprime=sec.take("mu_tprime", (int,), 0),
        feedback_mode=sec.take("feedback_mode", (str,), "two_step"),
        n_shot=n_shot,
        phase_step=float(sec.take("phase_step", (int, float), 0.0)),
        seed=sec.take("seed", (int,), 0),
        exact_feedback=sec.take("exact_feedback", (bool,), False),
        **weights,
    )
    sec.finish()
    return config


def _parse_split(sec: _Section | None, K: int) -> SplitSpec:
    if sec is None:
        return SplitSpec.from_fraction(K, 0.8)
    shuffle = sec.take("shuffle", (bool,), False)
    shuffle_seed = sec.take("shuffle_seed", (int,), 1)
    if "train_fraction" in sec.data:
        fraction = float(sec.take("train_fraction", (int, float)))
        sec.finish()
        return SplitSpec.from_fraction(
            K, fraction, shuffle=shuffle, shuffle_seed=shuffle_seed
        )
    k_train = sec.take("k_train", (int,))
    k_test = sec.take("k_test", (int,), K - k_train)
    sec.finish()
    return SplitSpec(
        k_train=k_train, k_test=k_test, shuffle=shuffle, shuffle_seed=shuffle_seed
    )


def _parse_readout_hyperopt(root: _Section, notes: list[str]):
    raw_readout = root.data.pop("readout", None)
    hyper_sec = root.subsection("hyperopt")
    hyperopt = None
    if hyper_sec is not None:
        hyperopt = HyperoptSettings(
            budget=hyper_sec.take("budget", (int,), 200),
            seed=hyper_sec.take("seed", (int,), 0),
            sampler=hyper_sec.take("sampler", (str,), "random"),
        )
        hyper_sec.finish()
    if raw_readout is None or raw_readout == "optimize":
        if hyperopt is None:
            if raw_readout == "optimize":
                hyperopt = HyperoptSettings()
                notes.append("hyperopt defaulted: budget=200, seed=0, random sampler")
            else:
                raise ConfigError(
                    'config.readout: provide {"alpha": ..., "washout": ...} '
                    'or "optimize"'
                )
        return None, hyperopt
    sec = _Section(raw_readout, "config.readout")
    readout = ReadoutSettings(
        alpha=float(sec.take("alpha", (int, float))),
        washout=sec.take("washout", (int,)),
    )
    sec.finish()
    if hyperopt is not None:
        notes.append("fixed readout given: hyperopt section is ignored by `run`")
    return readout, hyperopt


def _parse_gates(raw: list) -> tuple[Gate, ...]:
    gates = []
    for i, record in enumerate(raw):
        sec = _Section(record, f"config.gates[{i}]")
        kind = sec.take("kind", (str,), choices={"bs", "ps", "swap"})
        modes = sec.take("modes", (list,))
        phase = float(sec.take("phase", (int, float), 0.0))
        sec.finish()
        try:
            gates.append(Gate(kind=kind, modes=tuple(modes), phase=phase))
        except ValueError as err:
            raise ConfigError(f"config.gates[{i}]: {err}") from err
    return tuple(gates)


def _cross_validate(config: ExperimentConfig) -> None:
    dim = fock_dim(MODE_COUNT, config.photon.n_ph)
    selectors = [
        ("mu_prime", config.reservoir.mu_prime),
        ("mu_dprime", config.reservoir.mu_dprime),
    ]
    if config.reservoir.feedback_mode == "three_loop":
        selectors.append(("mu_tprime", config.reservoir.mu_tprime))
    for name, value in selectors:
        if value >= dim:
            raise ConfigError(
                f"config.reservoir.{name}: outcome index >= {dim} "
                f"(basis size for n_ph={config.photon.n_ph})"
            )
    if config.split.K != config.task.K:
        raise ConfigError(
            f"config.split: k_train + k_test = {config.split.K} "
            f"must equal task K = {config.task.K}"
        )
    for gate in config.gates:
        if any(m >= MODE_COUNT for m in gate.modes):
            raise ConfigError(
                f"config.gates: mode index out of range in {gate}"
            )


def resolve_output_dir(config: ExperimentConfig, cli_override: str | None) -> str:
    """CLI flag wins over the environment variable, which wins over the file."""
    if cli_override:
        return cli_override
    return os.environ.get(OUTPUT_DIR_ENV) or config.output_dir


def resolved_dict(config: ExperimentConfig) -> dict:
    """Fully materialized config for embedding into results files."""
    out = {
        "task": _prune(asdict(config.task)),
        "photon": {
            "n_ph": config.photon.n_ph,
            "input_modes": list(config.photon.input_modes),
            "visibility": config.photon.visibility,
        },
        "reservoir": asdict(config.reservoir),
        "split": asdict(config.split),
        "readout": None if config.readout is None else asdict(config.readout),
        "hyperopt": None if config.hyperopt is None else asdict(config.hyperopt),
        "replicas": config.replicas,
        "output_dir": config.output_dir,
        "notes": list(config.notes),
    }
    if config.gates:
        out["gates"] = [
            {"kind": g.kind, "modes": list(g.modes), "phase": g.phase}
            for g in config.gates
        ]
    return out


def _prune(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}

"""Step-wise encode, evolve, measure, feedback protocol.

A run is a strictly sequential state machine: the phases applied at step
``k`` are set from the input value and from probability components
measured at earlier steps, which is what gives the reservoir memory and
effective nonlinearity.  With a finite shot budget the measured
probabilities are multinomial empirical frequencies, and those empirical
values (not the exact ones) drive the next steps' feedback, mirroring a
counting experiment.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from pqrc.circuit import CircuitPhases, build_canonical_unitary
from pqrc.errors import ConfigError
from pqrc.fock import PhotonInput, enumerate_basis, mixed_distribution

FEEDBACK_MODES = ("off", "one_step", "two_step", "three_loop")

MODE_COUNT = 4  # the canonical interferometer has four modes

#: Default grid for discretized-phase-control studies.  Thermo-optic
#: controllers resolve a finite set of settings; the true hardware
#: resolution is not pinned anywhere, so this is a documented knob.
DISCRETIZED_PHASE_STEP = 2.0 * math.pi / 512.0


@dataclass(frozen=True)
class ReservoirConfig:
    """Encoding/feedback weights, outcome selectors, and noise model.

    ``n_shot=None`` means infinite statistics (exact probabilities).
    ``phase_step=0`` means continuous phase control.  With
    ``exact_feedback=True`` the feedback loops read the exact
    probabilities even when the recorded features are sampled, which is
    useful for ideal-system studies.
    """

    a_in: float
    a_fb_d: float = 0.0
    a_fb_4: float = 0.0
    mu_prime: int = 0
    mu_dprime: int = 0
    feedback_mode: str = "two_step"
    n_shot: int | None = None
    phase_step: float = 0.0
    seed: int = 0
    a_fb_b: float = 0.0
    mu_tprime: int = 0
    exact_feedback: bool = False

    def __post_init__(self):
        for name in ("a_in", "a_fb_d", "a_fb_4", "a_fb_b"):
            value = getattr(self, name)
            if not math.isfinite(value) or not -math.pi <= value <= math.pi:
                raise ConfigError(f"{name} must lie in [-pi, pi], got {value!r}")
        if self.feedback_mode not in FEEDBACK_MODES:
            raise ConfigError(
                f"feedback_mode must be one of {FEEDBACK_MODES}, "
                f"got {self.feedback_mode!r}"
            )
        if self.n_shot is not None and self.n_shot < 1:
            raise ConfigError(f"n_shot must be >= 1 or None, got {self.n_shot}")
        if self.phase_step < 0:
            raise ConfigError(f"phase_step must be >= 0, got {self.phase_step}")
        for name in ("mu_prime", "mu_dprime", "mu_tprime"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class StepRecord:
    """One protocol step: input, applied phases, and measured statistics."""

    k: int
    s_k: float
    phases: CircuitPhases
    probs: np.ndarray
    counts: np.ndarray | None = None


def quantize_phase(phi: float, phase_step: float) -> float:
    """Snap a phase to the nearest grid multiple (ties to even).

    ``phase_step=0`` disables quantization.
    """
    if phase_step == 0.0:
        return phi
    return float(np.round(phi / phase_step) * phase_step)


def sample_counts(dist: np.ndarray, n_shot: int, rng: np.random.Generator) -> np.ndarray:
    """Multinomial draw of ``n_shot`` detection events over the outcomes."""
    if n_shot < 1:
        raise ValueError(f"n_shot must be >= 1, got {n_shot}")
    p = np.asarray(dist, dtype=float)
    # guard tiny negative round-off before handing to the multinomial
    p = np.clip(p, 0.0, None)
    return rng.multinomial(n_shot, p / p.sum())


def run_sequence(
    inputs, config: ReservoirConfig, photon: PhotonInput
) -> list[StepRecord]:
    """Drive the reservoir over an input sequence and record every step.

    Feedback bootstrap: the probability vectors of steps before the start
    of the sequence are taken as all zeros, so the first feedback phases
    are 0.  The washout applied at readout training absorbs this
    transient.
    """
    s = np.asarray(inputs, dtype=float)
    if s.ndim != 1:
        raise ValueError(f"inputs must be a 1-d sequence, got shape {s.shape}")
    if np.any(~np.isfinite(s)):
        raise ValueError("inputs contain non-finite values")
    if s.size and (s.min() < 0.0 or s.max() > 1.0):
        raise ValueError("inputs must lie in [0, 1]")

    basis = enumerate_basis(MODE_COUNT, photon.n_ph)
    _check_outcome_indices(config, basis.size)

    rng = np.random.default_rng(config.seed)
    sampling = config.n_shot is not None
    zeros = np.zeros(basis.size)
    fb1 = zeros  # feedback source from step k-1
    fb2 = zeros  # from step k-2
    fb3 = zeros  # from step k-3

    records: list[StepRecord] = []
    mode = config.feedback_mode
    for k in range(s.size):
        phi_b = config.a_in * s[k]
        if mode == "off":
            phi_d = 0.0
            phi_4 = 0.0
        elif mode == "one_step":
            phi_d = config.a_fb_d * fb1[config.mu_prime]
            phi_4 = config.a_fb_4 * fb1[config.mu_dprime]
        else:  # two_step and three_loop
            phi_d = config.a_fb_d * fb1[config.mu_prime]
            phi_4 = config.a_fb_4 * fb2[config.mu_dprime]
            if mode == "three_loop":
                phi_b += config.a_fb_b * fb3[config.mu_tprime]
        if config.phase_step > 0.0:
            phi_b = quantize_phase(phi_b, config.phase_step)
            phi_d = quantize_phase(phi_d, config.phase_step)
            phi_4 = quantize_phase(phi_4, config.phase_step)
        phases = CircuitPhases(phi_b=phi_b, phi_d=phi_d, phi_4=phi_4)
        exact = mixed_distribution(build_canonical_unitary(phases), photon)
        if sampling:
            counts = sample_counts(exact, config.n_shot, rng)
            probs = counts / config.n_shot
            fed = exact if config.exact_feedback else probs
        else:
            counts = None
            probs = exact
            fed = exact
        records.append(StepRecord(k=k, s_k=float(s[k]), phases=phases,
                                  probs=probs, counts=counts))
        fb3 = fb2
        fb2 = fb1
        fb1 = fed
    return records


def feature_matrix(records: list[StepRecord]) -> np.ndarray:
    """Stack per-step probability vectors into the K x D feature matrix."""
    return np.array([r.probs for r in records])


def monte_carlo_replicas(
    inputs, config: ReservoirConfig, photon: PhotonInput, n_replicas: int
) -> list[np.ndarray]:
    """Independent sampled runs with derived seeds ``seed + i``."""
    if config.n_shot is None:
        raise ConfigError(
            "Monte Carlo replicas require finite n_shot; "
            "noiseless replicas would all be identical"
        )
    if n_replicas < 1:
        raise ValueError(f"n_replicas must be >= 1, got {n_replicas}")
    matrices = []
    for i in range(n_replicas):
        run_config = replace(config, seed=config.seed + i)
        matrices.append(feature_matrix(run_sequence(inputs, run_config, photon)))
    return matrices


def _check_outcome_indices(config: ReservoirConfig, dim: int) -> None:
    selectors = [("mu_prime", config.mu_prime), ("mu_dprime", config.mu_dprime)]
    if config.feedback_mode == "three_loop":
        selectors.append(("mu_tprime", config.mu_tprime))
    for name, value in selectors:
        if value >= dim:
            raise ConfigError(
                f"outcome index {name}={value} >= {dim} (basis size)"
            )

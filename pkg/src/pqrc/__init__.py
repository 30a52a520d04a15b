"""Photonic quantum reservoir computing simulator.

Multiphoton Fock states propagate through a reconfigurable four-mode
interferometer whose phases carry the input signal and two
measurement-conditioned feedback loops.  The per-step output
probability distributions form the feature matrix of a reservoir
computer; a ridge-regression readout is trained on top for time-series
benchmarks (memory capacity, monomials/polynomials, temporal XOR,
NARMA, Mackey-Glass forecasting).
"""

__version__ = "0.1.0"

from pqrc.circuit import CircuitPhases, build_canonical_unitary
from pqrc.fock import (
    FockBasis,
    PhotonInput,
    enumerate_basis,
    mixed_distribution,
    permanent,
)
from pqrc.reservoir import ReservoirConfig, StepRecord, run_sequence

__all__ = [
    "__version__",
    "CircuitPhases",
    "FockBasis",
    "PhotonInput",
    "ReservoirConfig",
    "StepRecord",
    "build_canonical_unitary",
    "enumerate_basis",
    "mixed_distribution",
    "permanent",
    "run_sequence",
]

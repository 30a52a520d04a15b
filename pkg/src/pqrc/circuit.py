"""Construction of the four-mode interferometer and generic gate circuits.

The closed-form canonical unitary is the ground-truth input/output map of
the reconfigurable interferometer: ``phi_b`` hosts the encoded input,
``phi_d`` and ``phi_4`` host the feedback phases.  A generic gate composer
(balanced beam splitters, phase shifters, swaps) is provided for extended
circuit layouts.
"""

from dataclasses import dataclass
from math import isfinite
from typing import Mapping

import numpy as np

from pqrc.fock import check_unitary

#: Symmetric balanced beam-splitter convention used by the gate composer.
BEAM_SPLITTER = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class CircuitPhases:
    """Phase settings of the interferometer, in radians.

    Phases are stored unwrapped (as applied by the controller) and enter
    the transfer matrix only through ``exp(i*phi)``.  ``extra`` carries
    named auxiliary phases for extended gate-composed circuits; the
    canonical closed form does not use them.
    """

    phi_b: float = 0.0
    phi_d: float = 0.0
    phi_4: float = 0.0
    extra: Mapping[str, float] | None = None

    def __post_init__(self):
        for name, value in (
            ("phi_b", self.phi_b),
            ("phi_d", self.phi_d),
            ("phi_4", self.phi_4),
        ):
            if not isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")


def build_canonical_unitary(phases: CircuitPhases) -> np.ndarray:
    """Closed-form 4x4 transfer matrix of the interferometer.

    At zero phases the circuit is a perfect crossover: a photon entering
    mode 0 exits mode 3 with unit probability.
    """
    eb = np.exp(1j * phases.phi_b)
    ed = np.exp(1j * phases.phi_d)
    e4 = np.exp(1j * phases.phi_4)
    ed4 = ed * e4
    return (
        np.array(
            [
                [
                    1 - eb + ed4 - e4,
                    1j * (-1 + eb + ed4 - e4),
                    1j * (-1 - eb + ed4 + e4),
                    -(1 + eb + ed4 + e4),
                ],
                [
                    1j * (-1 + eb + ed4 - e4),
                    -1 + eb - ed4 + e4,
                    -(1 + eb + ed4 + e4),
                    1j * (1 + eb - ed4 - e4),
                ],
                [
                    1j * (-eb + ed),
                    -(2 + eb + ed),
                    eb - ed,
                    1j * (2 - eb - ed),
                ],
                [
                    -(2 + eb + ed),
                    1j * (eb - ed),
                    1j * (2 - eb - ed),
                    -eb + ed,
                ],
            ]
        )
        / 4.0
    )


def build_phase_shifter(m: int, mode: int, phi: float) -> np.ndarray:
    """Identity with ``exp(i*phi)`` on the selected optical mode."""
    if not 0 <= mode < m:
        raise ValueError(f"mode {mode} out of range for {m} modes")
    U = np.eye(m, dtype=complex)
    U[mode, mode] = np.exp(1j * phi)
    return U


def build_evolution_unitary(phi_d: float, phi_4: float) -> np.ndarray:
    """4x4 evolution layer parameterized by the two feedback phases."""
    ed = np.exp(1j * phi_d)
    e4 = np.exp(1j * phi_4)
    ed4 = ed * e4
    return 0.5 * np.array(
        [
            [ed4, 1j * e4, 1j, -1],
            [1j * ed4, -e4, 1, 1j],
            [1j * ed, 1, -1, 1j],
            [-ed, 1j, 1j, 1],
        ]
    )


@dataclass(frozen=True)
class Gate:
    """Elementary circuit gate.

    ``kind`` is one of ``"bs"`` (balanced beam splitter on a mode pair),
    ``"ps"`` (phase shifter on one mode), or ``"swap"`` (mode pair).
    """

    kind: str
    modes: tuple[int, ...]
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if self.kind not in ("bs", "ps", "swap"):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        expected = 1 if self.kind == "ps" else 2
        if len(self.modes) != expected:
            raise ValueError(
                f"{self.kind} gate takes {expected} mode(s), got {self.modes}"
            )
        if self.kind != "ps" and self.modes[0] == self.modes[1]:
            raise ValueError(f"{self.kind} gate modes must differ, got {self.modes}")


def gate_matrix(gate: Gate, m: int) -> np.ndarray:
    """Embed an elementary gate into an m-mode identity."""
    if any(not 0 <= mode < m for mode in gate.modes):
        raise ValueError(f"gate modes {gate.modes} out of range for {m} modes")
    U = np.eye(m, dtype=complex)
    if gate.kind == "ps":
        U[gate.modes[0], gate.modes[0]] = np.exp(1j * gate.phase)
    elif gate.kind == "bs":
        a, b = gate.modes
        U[np.ix_((a, b), (a, b))] = BEAM_SPLITTER
    else:  # swap
        a, b = gate.modes
        U[a, a] = U[b, b] = 0.0
        U[a, b] = U[b, a] = 1.0
    return U


def compose(gates, m: int) -> np.ndarray:
    """Product of gate matrices in signal-propagation order.

    The first gate in the list acts first on the optical signal, so the
    resulting matrix is ``G_last @ ... @ G_first``.
    """
    gates = list(gates)
    if not gates:
        raise ValueError("gate list must be non-empty")
    U = np.eye(m, dtype=complex)
    for gate in gates:
        U = gate_matrix(gate, m) @ U
    return check_unitary(U, m)

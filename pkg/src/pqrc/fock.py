"""Fock-space combinatorics and output statistics of linear interferometers.

Photon-number configurations over ``m`` modes are enumerated in a fixed
canonical order (descending lexicographic on occupation vectors), so that
outcome indices are stable across runs and can be referenced from
configuration files.  Output distributions are computed for
indistinguishable photons (matrix permanents), fully distinguishable
photons (independent single-photon propagation), and partially
distinguishable photon pairs (visibility-weighted mixture of the two).
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial, prod

import numpy as np

from pqrc.errors import UnsupportedInputError

#: Largest supported total photon number.  Beyond this the permanent cost
#: grows fast and the four-mode architecture gains nothing.
MAX_PHOTONS = 4

#: Unitarity tolerance on ``max |U^dag U - I|``.
UNITARITY_TOL = 1e-10


def fock_dim(m: int, n: int) -> int:
    """Number of n-photon occupation states over m modes."""
    return comb(n + m - 1, n)


class FockBasis:
    """Canonically ordered basis of n-photon occupation states over m modes.

    States are sorted in descending lexicographic order of their occupation
    vectors, e.g. for ``(m=4, n=2)``: ``2000, 1100, 1010, 1001, 0200, ...``.
    The ordering is deterministic and stable; outcome selectors in reservoir
    configurations index into it.
    """

    def __init__(self, m: int, n: int):
        if m < 1:
            raise ValueError(f"mode count must be >= 1, got {m}")
        if n < 0:
            raise ValueError(f"photon number must be >= 0, got {n}")
        self.m = m
        self.n = n
        mode_tuples = list(combinations_with_replacement(range(m), n))
        self.states = tuple(
            tuple(np.bincount(t, minlength=m).tolist()) for t in mode_tuples
        )
        # expanded output-mode indices per state, used to select unitary rows
        self.mode_lists = tuple(mode_tuples)
        self.index = {s: i for i, s in enumerate(self.states)}
        # prod of occupation factorials per state (permanent normalization)
        self.norms = np.array([prod(factorial(c) for c in s) for s in self.states])

    @property
    def size(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def labels(self) -> list[str]:
        """Outcome labels such as ``"2000"``, ``"1100"``, used in CSV headers."""
        return ["".join(str(c) for c in s) for s in self.states]

    def index_of(self, occupations) -> int:
        return self.index[tuple(occupations)]

    @property
    def mode_array(self) -> np.ndarray:
        """``(D, n)`` array form of :attr:`mode_lists`."""
        cached = getattr(self, "_mode_array", None)
        if cached is None:
            cached = np.array(self.mode_lists, dtype=np.intp).reshape(
                len(self.states), self.n
            )
            self._mode_array = cached
        return cached

    @property
    def ordered_outcome_index(self) -> np.ndarray:
        """Map from ordered photon-output tuples to basis indices.

        Entry ``j`` corresponds to the ordered tuple obtained by writing
        ``j`` in base ``m`` with ``n`` digits (first photon = most
        significant digit).
        """
        cached = getattr(self, "_ordered_index", None)
        if cached is not None:
            return cached
        idx = np.empty(self.m**self.n, dtype=np.intp)
        digits = np.indices((self.m,) * self.n).reshape(self.n, -1)
        for j in range(idx.size):
            occ = np.bincount(digits[:, j], minlength=self.m)
            idx[j] = self.index[tuple(occ.tolist())]
        self._ordered_index = idx
        return idx


@lru_cache(maxsize=None)
def enumerate_basis(m: int, n: int) -> FockBasis:
    """Return the cached canonical basis for ``m`` modes and ``n`` photons."""
    return FockBasis(m, n)


@dataclass(frozen=True)
class PhotonInput:
    """Input specification: photon count, injection modes, and visibility.

    ``visibility`` interpolates the output statistics between fully
    distinguishable (0) and fully indistinguishable (1) photons.
    Fractional values are meaningful only for two-photon inputs; for any
    other photon number it must be exactly 0 or 1.
    """

    n_ph: int
    input_modes: tuple[int, ...]
    visibility: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "input_modes", tuple(self.input_modes))
        if not 1 <= self.n_ph <= MAX_PHOTONS:
            raise UnsupportedInputError(
                f"photon number must be in [1, {MAX_PHOTONS}], got {self.n_ph}"
            )
        if len(self.input_modes) != self.n_ph:
            raise ValueError(
                f"expected {self.n_ph} input modes, got {len(self.input_modes)}"
            )
        if any(mode < 0 for mode in self.input_modes):
            raise ValueError(f"negative mode index in {self.input_modes}")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must be in [0, 1], got {self.visibility}")
        if self.n_ph != 2 and self.visibility not in (0.0, 1.0):
            raise UnsupportedInputError(
                "fractional visibility is defined only for two-photon inputs; "
                f"got V={self.visibility} with n_ph={self.n_ph}"
            )

    def occupations(self, m: int) -> tuple[int, ...]:
        if max(self.input_modes) >= m:
            raise ValueError(
                f"input mode {max(self.input_modes)} out of range for {m} modes"
            )
        return tuple(np.bincount(self.input_modes, minlength=m).tolist())


def permanent(matrix: np.ndarray) -> complex:
    """Permanent of a small square matrix.

    Direct expansion for sizes up to 2; Ryser's formula with Gray-code
    subset updates for sizes 3 to 6.
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent requires a square matrix, got shape {a.shape}")
    k = a.shape[0]
    if k == 0:
        return complex(1.0)
    if k == 1:
        return complex(a[0, 0])
    if k == 2:
        return complex(a[0, 0] * a[1, 1] + a[0, 1] * a[1, 0])
    if k > 6:
        raise ValueError(f"permanent supports sizes up to 6, got {k}")
    # Ryser over column subsets in Gray-code order: each step toggles one
    # column in the running row sums.
    row_sums = np.zeros(k, dtype=complex)
    total = 0.0 + 0.0j
    gray = 0
    sign = 1 if k % 2 == 0 else -1  # (-1)^k
    for i in range(1, 1 << k):
        new_gray = i ^ (i >> 1)
        toggled = new_gray ^ gray
        col = toggled.bit_length() - 1
        if new_gray & toggled:
            row_sums += a[:, col]
        else:
            row_sums -= a[:, col]
        gray = new_gray
        parity = -1 if (new_gray.bit_count() % 2) else 1
        total += parity * np.prod(row_sums)
    return complex(sign * total)


def check_unitary(U: np.ndarray, m: int | None = None) -> np.ndarray:
    """Validate that ``U`` is square, optionally m x m, and unitary."""
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"mode unitary must be square, got shape {U.shape}")
    if m is not None and U.shape[0] != m:
        raise ValueError(f"expected a {m}x{m} unitary, got shape {U.shape}")
    defect = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
    if defect >= UNITARITY_TOL:
        raise ValueError(f"matrix is not unitary: max |U^dag U - I| = {defect:.3e}")
    return U


def indistinguishable_distribution(U: np.ndarray, occupations) -> np.ndarray:
    """Output distribution for indistinguishable photons.

    The amplitude for input occupations ``s`` and output occupations ``t``
    is ``Per(U[t, s]) / sqrt(prod(s!) * prod(t!))``, where ``U[t, s]``
    repeats input-mode columns and output-mode rows by their occupation
    multiplicities.
    """
    U = check_unitary(U)
    m = U.shape[0]
    occupations = tuple(int(c) for c in occupations)
    if len(occupations) != m:
        raise ValueError(f"expected {m} occupations, got {len(occupations)}")
    n = sum(occupations)
    if n > MAX_PHOTONS:
        raise UnsupportedInputError(
            f"photon number must be <= {MAX_PHOTONS}, got {n}"
        )
    basis = enumerate_basis(m, n)
    cols = [mode for mode, c in enumerate(occupations) for _ in range(c)]
    s_norm = prod(factorial(c) for c in occupations)
    if n == 1:
        amps = U[basis.mode_array[:, 0], cols[0]]
        probs = amps.real**2 + amps.imag**2
    elif n == 2:
        # vectorized 2x2 permanent expansion over all outcomes
        pair = np.outer(U[:, cols[0]], U[:, cols[1]])
        per = pair + pair.T
        amps = per[basis.mode_array[:, 0], basis.mode_array[:, 1]]
        probs = (amps.real**2 + amps.imag**2) / (s_norm * basis.norms)
    else:
        sub = U[:, cols]
        probs = np.empty(basis.size)
        for i, rows in enumerate(basis.mode_lists):
            amp = permanent(sub[rows, :])
            probs[i] = (amp.real**2 + amp.imag**2) / (s_norm * basis.norms[i])
    _check_normalized(probs)
    return probs


def distinguishable_distribution(U: np.ndarray, input_modes) -> np.ndarray:
    """Output distribution for fully distinguishable (labeled) photons.

    Each photon propagates independently with single-photon probabilities
    ``|U[o, mode]|^2``; the ordered joint distribution is coarse-grained
    onto occupation outcomes.
    """
    U = check_unitary(U)
    m = U.shape[0]
    input_modes = tuple(int(mode) for mode in input_modes)
    n = len(input_modes)
    if n > MAX_PHOTONS:
        raise UnsupportedInputError(
            f"photon number must be <= {MAX_PHOTONS}, got {n}"
        )
    if any(not 0 <= mode < m for mode in input_modes):
        raise ValueError(f"input modes {input_modes} out of range for {m} modes")
    basis = enumerate_basis(m, n)
    single = np.abs(U) ** 2
    joint = single[:, input_modes[0]]
    for mode in input_modes[1:]:
        joint = np.multiply.outer(joint, single[:, mode])
    probs = np.bincount(
        basis.ordered_outcome_index, weights=joint.ravel(), minlength=basis.size
    )
    _check_normalized(probs)
    return probs


def mixed_distribution(U: np.ndarray, photon: PhotonInput) -> np.ndarray:
    """Visibility-weighted output distribution.

    Returns ``V * p_indistinguishable + (1 - V) * p_distinguishable``
    componentwise.  The occupation-basis measurement is diagonal in the
    indistinguishable/distinguishable sectors, so the convex mixture of the
    two endpoint distributions is exact.
    """
    v = photon.visibility
    if v >= 1.0:
        return indistinguishable_distribution(
            U, photon.occupations(np.asarray(U).shape[0])
        )
    if v <= 0.0:
        return distinguishable_distribution(U, photon.input_modes)
    p_ind = indistinguishable_distribution(
        U, photon.occupations(np.asarray(U).shape[0])
    )
    p_dis = distinguishable_distribution(U, photon.input_modes)
    return v * p_ind + (1.0 - v) * p_dis


def _check_normalized(probs: np.ndarray, tol: float = 1e-12) -> None:
    total = probs.sum()
    if abs(total - 1.0) >= tol:
        raise ValueError(f"distribution not normalized: sum = {total!r}")

"""Fock basis, permanents, and output distributions against brute-force oracles."""

import itertools
from math import comb, factorial, prod

import numpy as np
import pytest

from pqrc.circuit import CircuitPhases, build_canonical_unitary
from pqrc.errors import UnsupportedInputError
from pqrc.fock import (
    PhotonInput,
    distinguishable_distribution,
    enumerate_basis,
    indistinguishable_distribution,
    mixed_distribution,
    permanent,
)

BALANCED_BS = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / np.sqrt(2.0)


def brute_force_permanent(a: np.ndarray) -> complex:
    """Permutation-sum definition, independent of Ryser's formula."""
    k = a.shape[0]
    return sum(
        np.prod([a[i, sigma[i]] for i in range(k)])
        for sigma in itertools.permutations(range(k))
    )


def path_sum_distribution(U: np.ndarray, occupations) -> np.ndarray:
    """Bosonic path-sum oracle: symmetrized amplitude over photon routings."""
    m = U.shape[0]
    n = sum(occupations)
    basis = enumerate_basis(m, n)
    in_modes = [mode for mode, c in enumerate(occupations) for _ in range(c)]
    s_norm = prod(factorial(c) for c in occupations)
    probs = np.empty(basis.size)
    for i, out_modes in enumerate(basis.mode_lists):
        amp = sum(
            np.prod([U[out_modes[j], in_modes[sigma[j]]] for j in range(n)])
            for sigma in itertools.permutations(range(n))
        )
        probs[i] = abs(amp) ** 2 / (s_norm * basis.norms[i])
    return probs


def random_canonical(rng) -> np.ndarray:
    phases = rng.uniform(-np.pi, np.pi, 3)
    return build_canonical_unitary(CircuitPhases(*phases))


class TestBasis:
    @pytest.mark.parametrize("m,n,expected", [(4, 1, 4), (4, 2, 10), (4, 3, 20)])
    def test_sizes(self, m, n, expected):
        assert enumerate_basis(m, n).size == expected
        assert enumerate_basis(m, n).size == comb(n + m - 1, n)

    def test_descending_lex_order(self):
        basis = enumerate_basis(4, 2)
        states = list(basis.states)
        assert states[0] == (2, 0, 0, 0)
        assert states[-1] == (0, 0, 0, 2)
        assert states == sorted(states, reverse=True)
        assert basis.labels()[:2] == ["2000", "1100"]

    def test_index_bijection(self):
        basis = enumerate_basis(4, 3)
        for i, state in enumerate(basis.states):
            assert basis.index_of(state) == i
        assert all(sum(s) == 3 for s in basis.states)

    def test_stable_across_calls(self):
        assert enumerate_basis(4, 2).states == enumerate_basis(4, 2).states


class TestPermanent:
    def test_identity(self):
        assert permanent(np.eye(2)) == pytest.approx(1.0)

    def test_2x2_definition(self):
        a, b, c, d = 1.3, -0.4 + 2j, 0.7j, 2.0
        assert permanent(np.array([[a, b], [c, d]])) == pytest.approx(a * d + b * c)

    @pytest.mark.parametrize("k", [3, 4, 5, 6])
    def test_matches_permutation_sum(self, k):
        rng = np.random.default_rng(k)
        a = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
        assert permanent(a) == pytest.approx(brute_force_permanent(a), rel=1e-12)

    @pytest.mark.parametrize("k", [3, 4])
    def test_row_column_permutation_invariance(self, k):
        rng = np.random.default_rng(17)
        for _ in range(20):
            a = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
            ref = permanent(a)
            rows = rng.permutation(k)
            cols = rng.permutation(k)
            assert permanent(a[rows][:, cols]) == pytest.approx(ref, abs=1e-12)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            permanent(np.ones((2, 3)))

    def test_rejects_large(self):
        with pytest.raises(ValueError, match="up to 6"):
            permanent(np.eye(7))


class TestIndistinguishable:
    def test_hong_ou_mandel(self):
        p = indistinguishable_distribution(BALANCED_BS, (1, 1))
        basis = enumerate_basis(2, 2)
        assert p[basis.index_of((1, 1))] == pytest.approx(0.0, abs=1e-12)
        assert p[basis.index_of((2, 0))] == pytest.approx(0.5, abs=1e-12)
        assert p[basis.index_of((0, 2))] == pytest.approx(0.5, abs=1e-12)

    def test_identity_routing(self):
        p = indistinguishable_distribution(np.eye(4), (1, 0, 0, 1))
        basis = enumerate_basis(4, 2)
        assert p[basis.index_of((1, 0, 0, 1))] == pytest.approx(1.0)

    def test_canonical_zero_phase_single_photon(self):
        U = build_canonical_unitary(CircuitPhases())
        p = indistinguishable_distribution(U, (1, 0, 0, 0))
        basis = enumerate_basis(4, 1)
        assert p[basis.index_of((0, 0, 0, 1))] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("occupations", [(1, 0, 0, 0), (1, 0, 0, 1),
                                             (1, 1, 0, 1), (2, 0, 0, 1)])
    def test_matches_path_sum_oracle(self, occupations):
        rng = np.random.default_rng(5)
        for _ in range(5):
            U = random_canonical(rng)
            got = indistinguishable_distribution(U, occupations)
            want = path_sum_distribution(U, occupations)
            np.testing.assert_allclose(got, want, atol=1e-10)

    def test_normalized_over_random_unitaries(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            p = indistinguishable_distribution(random_canonical(rng), (1, 0, 0, 1))
            assert abs(p.sum() - 1.0) < 1e-12
            assert p.min() >= 0.0

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="not unitary"):
            indistinguishable_distribution(np.ones((4, 4)), (1, 0, 0, 1))

    def test_rejects_too_many_photons(self):
        with pytest.raises(UnsupportedInputError):
            indistinguishable_distribution(np.eye(4), (2, 1, 1, 1))


class TestDistinguishable:
    def test_balanced_splitter(self):
        p = distinguishable_distribution(BALANCED_BS, (0, 1))
        basis = enumerate_basis(2, 2)
        assert p[basis.index_of((1, 1))] == pytest.approx(0.5)
        assert p[basis.index_of((2, 0))] == pytest.approx(0.25)
        assert p[basis.index_of((0, 2))] == pytest.approx(0.25)

    def test_single_photon_equals_indistinguishable(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            U = random_canonical(rng)
            np.testing.assert_allclose(
                distinguishable_distribution(U, (0,)),
                indistinguishable_distribution(U, (1, 0, 0, 0)),
                atol=1e-14,
            )

    def test_matches_ordered_pair_enumeration(self):
        rng = np.random.default_rng(7)
        U = random_canonical(rng)
        basis = enumerate_basis(4, 2)
        want = np.zeros(basis.size)
        for o1 in range(4):
            for o2 in range(4):
                joint = abs(U[o1, 0]) ** 2 * abs(U[o2, 3]) ** 2
                occ = [0, 0, 0, 0]
                occ[o1] += 1
                occ[o2] += 1
                want[basis.index_of(tuple(occ))] += joint
        got = distinguishable_distribution(U, (0, 3))
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_rejects_bad_mode(self):
        with pytest.raises(ValueError, match="out of range"):
            distinguishable_distribution(np.eye(4), (0, 4))


class TestMixed:
    def test_endpoints_exact(self):
        rng = np.random.default_rng(9)
        U = random_canonical(rng)
        p1 = mixed_distribution(U, PhotonInput(2, (0, 3), 1.0))
        p0 = mixed_distribution(U, PhotonInput(2, (0, 3), 0.0))
        np.testing.assert_array_equal(
            p1, indistinguishable_distribution(U, (1, 0, 0, 1))
        )
        np.testing.assert_array_equal(p0, distinguishable_distribution(U, (0, 3)))

    @pytest.mark.parametrize("v", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_linearity_in_visibility(self, v):
        rng = np.random.default_rng(13)
        U = random_canonical(rng)
        p1 = mixed_distribution(U, PhotonInput(2, (0, 3), 1.0))
        p0 = mixed_distribution(U, PhotonInput(2, (0, 3), 0.0))
        got = mixed_distribution(U, PhotonInput(2, (0, 3), v))
        np.testing.assert_array_equal(got, v * p1 + (1.0 - v) * p0)

    def test_hom_half_visibility(self):
        p = mixed_distribution(BALANCED_BS, PhotonInput(2, (0, 1), 0.5))
        basis = enumerate_basis(2, 2)
        assert p[basis.index_of((1, 1))] == pytest.approx(0.25, abs=1e-12)

    def test_same_mode_pair_supported(self):
        rng = np.random.default_rng(23)
        U = random_canonical(rng)
        p = mixed_distribution(U, PhotonInput(2, (0, 0), 0.5))
        assert abs(p.sum() - 1.0) < 1e-12
        np.testing.assert_allclose(
            p,
            0.5 * indistinguishable_distribution(U, (2, 0, 0, 0))
            + 0.5 * distinguishable_distribution(U, (0, 0)),
        )


class TestPhotonInput:
    def test_fractional_visibility_needs_two_photons(self):
        with pytest.raises(UnsupportedInputError, match="two-photon"):
            PhotonInput(1, (0,), 0.5)
        with pytest.raises(UnsupportedInputError, match="two-photon"):
            PhotonInput(3, (0, 1, 3), 0.5)

    def test_integer_visibility_any_photon_number(self):
        PhotonInput(3, (0, 1, 3), 1.0)
        PhotonInput(4, (0, 1, 2, 3), 0.0)

    def test_mode_count_must_match(self):
        with pytest.raises(ValueError, match="input modes"):
            PhotonInput(2, (0,), 1.0)

    def test_visibility_bounds(self):
        with pytest.raises(ValueError, match="visibility"):
            PhotonInput(2, (0, 3), 1.5)

    def test_too_many_photons(self):
        with pytest.raises(UnsupportedInputError):
            PhotonInput(5, (0, 1, 2, 3, 0), 1.0)

    def test_occupations(self):
        assert PhotonInput(2, (0, 3)).occupations(4) == (1, 0, 0, 1)
        with pytest.raises(ValueError, match="out of range"):
            PhotonInput(2, (0, 3)).occupations(3)

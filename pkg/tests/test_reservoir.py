"""Reservoir protocol: feedback wiring, sampling, determinism, causality."""

import numpy as np
import pytest

from pqrc.circuit import CircuitPhases, build_canonical_unitary
from pqrc.errors import ConfigError
from pqrc.fock import PhotonInput, mixed_distribution
from pqrc.reservoir import (
    DISCRETIZED_PHASE_STEP,
    ReservoirConfig,
    feature_matrix,
    monte_carlo_replicas,
    quantize_phase,
    run_sequence,
    sample_counts,
)

TWO_PHOTON = PhotonInput(2, (0, 3), 1.0)


def small_config(**overrides):
    base = dict(
        a_in=1.1, a_fb_d=0.8, a_fb_4=-0.6, mu_prime=3, mu_dprime=7,
        feedback_mode="two_step", n_shot=None, seed=42,
    )
    base.update(overrides)
    return ReservoirConfig(**base)


class TestQuantize:
    def test_continuous_passthrough(self):
        assert quantize_phase(0.3, 0.0) == 0.3

    def test_nearest_grid_point(self):
        assert quantize_phase(0.3, 0.25) == pytest.approx(0.25)

    def test_half_step_bound(self):
        rng = np.random.default_rng(2)
        step = 2 * np.pi / 512
        for phi in rng.uniform(-np.pi, np.pi, 1000):
            assert abs(quantize_phase(phi, step) - phi) <= step / 2 + 1e-15

    def test_ties_round_to_even(self):
        assert quantize_phase(0.125, 0.25) == 0.0
        assert quantize_phase(0.375, 0.25) == pytest.approx(0.5)


class TestSampleCounts:
    def test_point_mass(self):
        dist = np.zeros(10)
        dist[3] = 1.0
        counts = sample_counts(dist, 100, np.random.default_rng(0))
        assert counts[3] == 100 and counts.sum() == 100

    def test_uniform_large_budget(self):
        dist = np.full(10, 0.1)
        counts = sample_counts(dist, 10**6, np.random.default_rng(123))
        freqs = counts / 10**6
        assert np.all(np.abs(freqs - 0.1) < 0.005)

    def test_deterministic_given_state(self):
        dist = np.full(4, 0.25)
        c1 = sample_counts(dist, 1000, np.random.default_rng(7))
        c2 = sample_counts(dist, 1000, np.random.default_rng(7))
        np.testing.assert_array_equal(c1, c2)

    def test_rejects_zero_shots(self):
        with pytest.raises(ValueError):
            sample_counts(np.array([1.0]), 0, np.random.default_rng(0))


class TestRunSequence:
    def test_feedback_off_constant_input(self):
        config = small_config(feedback_mode="off")
        records = run_sequence(np.full(6, 0.4), config, TWO_PHOTON)
        first = records[0]
        for rec in records[1:]:
            assert rec.phases == first.phases
            np.testing.assert_array_equal(rec.probs, first.probs)

    def test_bootstrap_zero_feedback(self):
        records = run_sequence(np.full(4, 0.9), small_config(), TWO_PHOTON)
        assert records[0].phases.phi_d == 0.0
        assert records[0].phases.phi_4 == 0.0
        # the two-step loop still reads the all-zero bootstrap at k=1
        assert records[1].phases.phi_4 == 0.0
        assert records[2].phases.phi_4 != 0.0

    def test_two_step_matches_reference_loop(self):
        config = small_config()
        s = np.array([0.1, 0.9, 0.3, 0.7, 0.5])
        records = run_sequence(s, config, TWO_PHOTON)

        # independent straight-line reimplementation of the protocol
        prev1 = np.zeros(10)
        prev2 = np.zeros(10)
        for k in range(5):
            phases = CircuitPhases(
                phi_b=config.a_in * s[k],
                phi_d=config.a_fb_d * prev1[config.mu_prime],
                phi_4=config.a_fb_4 * prev2[config.mu_dprime],
            )
            p = mixed_distribution(build_canonical_unitary(phases), TWO_PHOTON)
            assert records[k].phases == phases
            np.testing.assert_allclose(records[k].probs, p, atol=1e-15)
            prev2, prev1 = prev1, p

    def test_one_step_uses_previous_step_for_both(self):
        config = small_config(feedback_mode="one_step")
        s = np.array([0.2, 0.8, 0.4])
        records = run_sequence(s, config, TWO_PHOTON)
        assert records[1].phases.phi_d == pytest.approx(
            config.a_fb_d * records[0].probs[config.mu_prime]
        )
        assert records[1].phases.phi_4 == pytest.approx(
            config.a_fb_4 * records[0].probs[config.mu_dprime]
        )

    def test_three_loop_adds_input_phase_term(self):
        config = small_config(
            feedback_mode="three_loop", a_fb_b=0.5, mu_tprime=2
        )
        s = np.full(6, 0.3)
        records = run_sequence(s, config, TWO_PHOTON)
        for k in (0, 1, 2):
            assert records[k].phases.phi_b == pytest.approx(config.a_in * 0.3)
        expected = config.a_in * 0.3 + config.a_fb_b * records[0].probs[2]
        assert records[3].phases.phi_b == pytest.approx(expected)

    def test_determinism_bitwise(self):
        config = small_config(n_shot=500)
        s = np.random.default_rng(1).uniform(0, 1, 20)
        r1 = run_sequence(s, config, TWO_PHOTON)
        r2 = run_sequence(s, config, TWO_PHOTON)
        for a, b in zip(r1, r2):
            assert a.phases == b.phases
            np.testing.assert_array_equal(a.probs, b.probs)
            np.testing.assert_array_equal(a.counts, b.counts)

    def test_causality(self):
        config = small_config(n_shot=200)
        s = np.random.default_rng(2).uniform(0, 1, 15)
        base = run_sequence(s, config, TWO_PHOTON)
        s2 = s.copy()
        s2[8] = 1.0 - s2[8]
        perturbed = run_sequence(s2, config, TWO_PHOTON)
        for k in range(8):
            assert base[k].phases == perturbed[k].phases
            np.testing.assert_array_equal(base[k].probs, perturbed[k].probs)
        assert base[8].phases != perturbed[8].phases

    def test_feedback_off_is_memoryless(self):
        config = small_config(feedback_mode="off")
        s = np.random.default_rng(3).uniform(0, 1, 10)
        perm = np.random.default_rng(4).permutation(10)
        base = run_sequence(s, config, TWO_PHOTON)
        permuted = run_sequence(s[perm], config, TWO_PHOTON)
        for pos, orig in enumerate(perm):
            assert permuted[pos].phases == base[orig].phases
            np.testing.assert_array_equal(permuted[pos].probs, base[orig].probs)

    def test_applied_phases_bounded(self):
        config = small_config(a_in=np.pi, a_fb_d=np.pi, a_fb_4=-np.pi)
        s = np.random.default_rng(5).uniform(0, 1, 30)
        for rec in run_sequence(s, config, TWO_PHOTON):
            for phi in (rec.phases.phi_b, rec.phases.phi_d, rec.phases.phi_4):
                assert -np.pi <= phi <= np.pi

    def test_sampled_rows_and_counts(self):
        config = small_config(n_shot=777)
        s = np.random.default_rng(6).uniform(0, 1, 12)
        records = run_sequence(s, config, TWO_PHOTON)
        for rec in records:
            assert rec.counts.sum() == 777
            np.testing.assert_array_equal(rec.probs, rec.counts / 777)
        X = feature_matrix(records)
        assert X.shape == (12, 10)
        np.testing.assert_allclose(X.sum(axis=1), 1.0, atol=1e-9)

    def test_noiseless_rows_normalized_tightly(self):
        records = run_sequence(
            np.random.default_rng(7).uniform(0, 1, 12), small_config(), TWO_PHOTON
        )
        X = feature_matrix(records)
        assert records[0].counts is None
        np.testing.assert_allclose(X.sum(axis=1), 1.0, atol=1e-12)

    def test_exact_feedback_flag(self):
        noisy = small_config(n_shot=50, exact_feedback=True)
        clean = small_config(n_shot=None)
        s = np.random.default_rng(8).uniform(0, 1, 10)
        noisy_records = run_sequence(s, noisy, TWO_PHOTON)
        clean_records = run_sequence(s, clean, TWO_PHOTON)
        # feedback driven by exact probabilities: phases match the clean run
        for a, b in zip(noisy_records, clean_records):
            assert a.phases == b.phases

    def test_quantized_phases_on_grid(self):
        step = DISCRETIZED_PHASE_STEP
        assert step == pytest.approx(2 * np.pi / 512)
        config = small_config(phase_step=step)
        s = np.random.default_rng(9).uniform(0, 1, 10)
        for rec in run_sequence(s, config, TWO_PHOTON):
            for phi in (rec.phases.phi_b, rec.phases.phi_d, rec.phases.phi_4):
                assert abs(phi / step - round(phi / step)) < 1e-9

    def test_outcome_index_out_of_range(self):
        with pytest.raises(ConfigError, match="outcome index"):
            run_sequence(np.array([0.5]), small_config(mu_prime=10), TWO_PHOTON)

    def test_nan_input_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            run_sequence(np.array([0.5, np.nan]), small_config(), TWO_PHOTON)

    def test_out_of_range_input_rejected(self):
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            run_sequence(np.array([0.5, 1.2]), small_config(), TWO_PHOTON)


class TestReplicas:
    def test_refuses_noiseless(self):
        with pytest.raises(ConfigError, match="finite n_shot"):
            monte_carlo_replicas(np.full(5, 0.5), small_config(), TWO_PHOTON, 3)

    def test_single_replica_matches_run(self):
        config = small_config(n_shot=100)
        s = np.random.default_rng(10).uniform(0, 1, 8)
        (X,) = monte_carlo_replicas(s, config, TWO_PHOTON, 1)
        np.testing.assert_array_equal(
            X, feature_matrix(run_sequence(s, config, TWO_PHOTON))
        )

    def test_replicas_differ(self):
        config = small_config(n_shot=100)
        s = np.random.default_rng(11).uniform(0, 1, 8)
        a, b = monte_carlo_replicas(s, config, TWO_PHOTON, 2)
        assert not np.array_equal(a, b)

    def test_replica_count(self):
        config = small_config(n_shot=20)
        out = monte_carlo_replicas(np.full(12, 0.5), config, TWO_PHOTON, 100)
        assert len(out) == 100


class TestConfigValidation:
    def test_weight_bounds(self):
        with pytest.raises(ConfigError, match=r"\[-pi, pi\]"):
            small_config(a_in=4.0)

    def test_feedback_mode(self):
        with pytest.raises(ConfigError, match="feedback_mode"):
            small_config(feedback_mode="four_step")

    def test_n_shot(self):
        with pytest.raises(ConfigError, match="n_shot"):
            small_config(n_shot=0)

    def test_phase_step(self):
        with pytest.raises(ConfigError, match="phase_step"):
            small_config(phase_step=-0.1)

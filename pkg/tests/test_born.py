"""Transition structure, effects, mixtures, and density-matrix recovery."""

import numpy as np
import pytest

from epiquant import (
    Effect,
    EffectDecomposition,
    effect_probability,
    gleason_fit,
    mixture_check,
    pure_state,
    transition_matrix,
)
from epiquant.errors import NotAnEffect, RankDeficient


def random_density(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.real(np.trace(rho))


def random_basis(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def spanning_effects(rng, d, count):
    return [Effect(EffectDecomposition(random_basis(rng, d),
                                       rng.uniform(0, 1, size=d)))
            for _ in range(count)]


class TestTransitionMatrix:
    def test_self_transition_is_identity(self, spin3_rep, triangle6_rep):
        for hrep in (spin3_rep, triangle6_rep):
            for a in hrep.model.labels:
                t = transition_matrix(hrep, a, a)
                np.testing.assert_allclose(t.entries, np.eye(hrep.dim), atol=1e-12)

    def test_doubly_stochastic(self, spin3_rep, triangle6_rep):
        for hrep in (spin3_rep, triangle6_rep):
            for a in hrep.model.labels:
                for b in hrep.model.labels:
                    t = transition_matrix(hrep, a, b).entries
                    np.testing.assert_allclose(t.sum(axis=1), 1.0, atol=1e-12)
                    np.testing.assert_allclose(t.sum(axis=0), 1.0, atol=1e-12)

    def test_transpose_symmetry(self, spin3_rep, triangle6_rep):
        for hrep in (spin3_rep, triangle6_rep):
            for a in hrep.model.labels:
                for b in hrep.model.labels:
                    ab = transition_matrix(hrep, a, b).entries
                    ba = transition_matrix(hrep, b, a).entries
                    np.testing.assert_allclose(ab, ba.T, atol=1e-12)

    def test_triangle_matches_enumeration_oracle(self, triangle6_model, triangle6_rep):
        """Which permutation: read it off the shared value blocks."""
        model = triangle6_model
        for a in model.labels:
            for b in model.labels:
                t = transition_matrix(triangle6_rep, a, b).entries
                ea, eb = model.catalog[a], model.catalog[b]
                oracle = np.zeros((3, 3))
                for k, block in enumerate(ea.blocks()):
                    values = set(eb.value_map[block].tolist())
                    assert len(values) == 1  # same partition, relabeled
                    oracle[k, values.pop()] = 1.0
                np.testing.assert_allclose(t, oracle, atol=1e-12)

    def test_realization_mode_propagates(self, triangle6_rep):
        t = transition_matrix(triangle6_rep, "w1", "w2")
        assert t.realization_mode == "indicator_fallback"


class TestEffects:
    def test_identity_effect_probability_one(self, spin3_rep):
        rng = np.random.default_rng(3)
        e = Effect.from_basis(spin3_rep, "d60", [1.0, 1.0])
        for _ in range(5):
            rho = random_density(rng, 2)
            assert effect_probability(rho, e) == pytest.approx(1.0, abs=1e-12)

    def test_zero_effect_probability_zero(self, spin3_rep):
        e = Effect.from_basis(spin3_rep, "d0", [0.0, 0.0])
        rho = random_density(np.random.default_rng(4), 2)
        assert effect_probability(rho, e) == pytest.approx(0.0, abs=1e-12)

    def test_projector_on_own_state(self, spin3_rep):
        e = Effect.from_basis(spin3_rep, "d0", [1.0, 0.0])
        state = spin3_rep.state("d0", 0)
        assert effect_probability(state, e) == pytest.approx(1.0, abs=1e-12)

    def test_weights_outside_unit_interval_rejected(self, spin3_rep):
        with pytest.raises(NotAnEffect):
            Effect.from_basis(spin3_rep, "d0", [1.2, 0.0])
        with pytest.raises(NotAnEffect):
            Effect.from_basis(spin3_rep, "d0", [-0.1, 0.5])

    def test_probability_equals_trace_form(self, spin3_rep):
        rng = np.random.default_rng(11)
        for _ in range(50):
            rho = random_density(rng, 2)
            e = Effect(EffectDecomposition(random_basis(rng, 2),
                                           rng.uniform(0, 1, 2)))
            p_born = effect_probability(rho, e)
            p_trace = float(np.real(np.trace(rho @ e.matrix)))
            assert abs(p_born - p_trace) < 1e-10

    def test_decomposition_independence(self, spin3_rep):
        rng = np.random.default_rng(12)
        worst = 0.0
        for _ in range(50):
            rho = random_density(rng, 2)
            e = Effect(EffectDecomposition(random_basis(rng, 2),
                                           rng.uniform(0, 1, 2)))
            w, v = np.linalg.eigh(e.matrix)
            alt = EffectDecomposition(v, np.clip(w, 0, 1))
            worst = max(worst, abs(effect_probability(rho, e)
                                   - effect_probability(rho, e, via=alt)))
        assert worst < 1e-10

    def test_mismatched_alternative_rejected(self, spin3_rep):
        e = Effect.from_basis(spin3_rep, "d0", [0.25, 0.5])
        other = EffectDecomposition(spin3_rep.states_matrix("d0"), [0.5, 0.5])
        rho = np.eye(2) / 2
        with pytest.raises(ValueError, match="different effect"):
            effect_probability(rho, e, via=other)


class TestMixture:
    def test_equal_effects_zero_residual(self, spin3_rep):
        e = Effect.from_basis(spin3_rep, "d0", [0.3, 0.8])
        rho = pure_state(spin3_rep, "d60", 0)
        assert mixture_check(e, e, rho) == 0.0

    def test_identity_and_zero(self, spin3_rep):
        one = Effect.from_basis(spin3_rep, "d0", [1.0, 1.0])
        zero = Effect.from_basis(spin3_rep, "d0", [0.0, 0.0])
        rho = pure_state(spin3_rep, "d120", 1)
        # P(I/2) = 1/2 exactly up to rounding
        assert mixture_check(one, zero, rho) < 1e-10

    def test_hundred_seeded_pairs(self, spin3_rep):
        rng = np.random.default_rng(100)
        worst = 0.0
        for _ in range(100):
            rho = random_density(rng, 2)
            e1 = Effect(EffectDecomposition(random_basis(rng, 2),
                                            rng.uniform(0, 1, 2)))
            e2 = Effect(EffectDecomposition(random_basis(rng, 2),
                                            rng.uniform(0, 1, 2)))
            worst = max(worst, mixture_check(e1, e2, rho))
        assert worst < 1e-10


class TestGleasonFit:
    def test_round_trip_pure_state(self, spin3_rep):
        rng = np.random.default_rng(21)
        v = spin3_rep.state("d60", 0).coords
        rho = np.outer(v, v.conj())
        effects = spanning_effects(rng, 2, 8)
        samples = [(e, float(np.real(np.trace(rho @ e.matrix)))) for e in effects]
        fit = gleason_fit(samples)
        assert np.linalg.norm(fit.recovered - rho) < 1e-8

    def test_round_trip_seeded_mixed_states(self, spin3_rep, triangle6_rep):
        for hrep, seed in ((spin3_rep, 31), (triangle6_rep, 32)):
            rng = np.random.default_rng(seed)
            d = hrep.dim
            for _ in range(20):
                rho = random_density(rng, d)
                effects = spanning_effects(rng, d, 2 * d * d)
                samples = [(e, float(np.real(np.trace(rho @ e.matrix))))
                           for e in effects]
                fit = gleason_fit(samples)
                assert np.linalg.norm(fit.recovered - rho) < 1e-8
                assert fit.residual < 1e-10

    def test_maximally_mixed_from_uniform_probabilities(self):
        rng = np.random.default_rng(41)
        d = 2
        effects = spanning_effects(rng, d, 8)
        samples = [(e, float(np.real(np.trace(np.eye(d) / d @ e.matrix))))
                   for e in effects]
        fit = gleason_fit(samples)
        assert np.linalg.norm(fit.recovered - np.eye(d) / d) < 1e-8

    def test_perturbed_probability_flags_inconsistency(self):
        rng = np.random.default_rng(51)
        rho = random_density(rng, 2)
        effects = spanning_effects(rng, 2, 8)
        samples = [(e, float(np.real(np.trace(rho @ e.matrix)))) for e in effects]
        e0, p0 = samples[0]
        samples[0] = (e0, p0 + 0.1)
        fit = gleason_fit(samples)
        assert fit.residual >= 0.01

    def test_too_few_samples(self, spin3_rep):
        e = Effect.from_basis(spin3_rep, "d0", [0.5, 0.5])
        with pytest.raises(RankDeficient):
            gleason_fit([(e, 0.5)])

    def test_non_spanning_sample_rejected(self, spin3_rep):
        # every basis of this planar model is real, so model-basis effects
        # span only the real-symmetric 3 of 4 Hermitian dimensions
        rng = np.random.default_rng(61)
        effects = []
        for a in spin3_rep.model.labels:
            effects.append(Effect.from_basis(spin3_rep, a, rng.uniform(0, 1, 2)))
            effects.append(Effect.from_basis(spin3_rep, a, rng.uniform(0, 1, 2)))
        rho = random_density(rng, 2)
        samples = [(e, float(np.real(np.trace(rho @ e.matrix)))) for e in effects]
        with pytest.raises(RankDeficient, match="spans only"):
            gleason_fit(samples)

    def test_recovered_is_physical(self, spin3_rep):
        rng = np.random.default_rng(71)
        rho = random_density(rng, 2)
        effects = spanning_effects(rng, 2, 8)
        samples = [(e, float(np.real(np.trace(rho @ e.matrix)))) for e in effects]
        fit = gleason_fit(samples)
        m = fit.recovered
        assert np.abs(m - m.conj().T).max() < 1e-12
        assert np.linalg.eigvalsh(m).min() >= -1e-10
        assert abs(np.trace(m).real - 1.0) < 1e-12

"""Implicit-evidence plug-ins: interpolation tracker and kernel smoother."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from taskbandit import (
    CapabilityTracker,
    KernelConfig,
    ReferenceProfile,
    capability_coefficient,
    predict_rate_interpolation,
    predict_rate_kernel,
    predict_rates_interpolation,
    predict_rates_kernel,
    pseudo_counts,
    update_momentum,
)
from taskbandit.errors import StateError


class TestCapabilityCoefficient:
    def test_halfway(self):
        assert_allclose(capability_coefficient(0.55, 0.3, 0.8, 1e-6), 0.5)

    def test_extrapolates_past_strong(self):
        # coefficient is deliberately unclipped
        assert_allclose(capability_coefficient(0.9, 0.3, 0.7, 1e-6), 1.5)

    def test_below_weak_goes_negative(self):
        assert_allclose(capability_coefficient(0.1, 0.3, 0.7, 1e-6), -0.5)

    def test_degenerate_profiles_stay_finite(self):
        eps = 1e-6
        same = capability_coefficient(0.6, 0.5, 0.5, eps)
        assert np.isfinite(same)
        inverted = capability_coefficient(0.4, 0.8, 0.2, eps)
        assert np.isfinite(inverted)
        # exact cancellation point of the guard
        knife = capability_coefficient(0.5, 0.5 + eps, 0.5, eps)
        assert np.isfinite(knife)


class TestMomentum:
    def test_first_value_seeds(self):
        tracker = CapabilityTracker(gamma=0.9)
        tracker = update_momentum(tracker, 0.5)
        assert tracker.initialized
        assert tracker.mu_momentum == 0.5

    def test_blend(self):
        tracker = update_momentum(CapabilityTracker(gamma=0.9), 0.5)
        tracker = update_momentum(tracker, 1.0)
        assert_allclose(tracker.mu_momentum, 0.55)

    def test_gamma_extremes(self):
        fast = update_momentum(CapabilityTracker(gamma=0.0), 0.2)
        fast = update_momentum(fast, 0.9)
        assert_allclose(fast.mu_momentum, 0.9)
        frozen = update_momentum(CapabilityTracker(gamma=1.0), 0.2)
        frozen = update_momentum(frozen, 0.9)
        assert_allclose(frozen.mu_momentum, 0.2)

    def test_original_tracker_unchanged(self):
        base = CapabilityTracker(gamma=0.9)
        update_momentum(base, 0.7)
        assert not base.initialized


class TestInterpolationPrediction:
    def setup_method(self):
        self.profile = ReferenceProfile(
            p_weak=np.array([0.2, 0.0, 0.5]),
            p_strong=np.array([0.8, 1.0, 0.5]),
        )

    def tracker_at(self, mu):
        tracker = CapabilityTracker(gamma=0.9)
        return update_momentum(tracker, mu)

    def test_midpoint(self):
        rates = predict_rates_interpolation(self.profile, self.tracker_at(0.5))
        assert_allclose(rates, [0.5, 0.5, 0.5])

    def test_endpoints(self):
        assert_allclose(
            predict_rates_interpolation(self.profile, self.tracker_at(0.0)),
            self.profile.p_weak,
        )
        assert_allclose(
            predict_rates_interpolation(self.profile, self.tracker_at(1.0)),
            self.profile.p_strong,
        )

    def test_extrapolation_is_clipped(self):
        rates = predict_rates_interpolation(self.profile, self.tracker_at(1.5))
        assert_allclose(rates, [1.0, 1.0, 0.5])
        rates = predict_rates_interpolation(self.profile, self.tracker_at(-0.5))
        assert_allclose(rates, [0.0, 0.0, 0.5])

    def test_uninitialized_tracker_raises(self):
        with pytest.raises(StateError):
            predict_rates_interpolation(self.profile, CapabilityTracker(gamma=0.9))

    def test_scalar_accessor(self):
        tracker = self.tracker_at(0.25)
        assert_allclose(predict_rate_interpolation(self.profile, tracker, 0), 0.35)
        with pytest.raises(IndexError):
            predict_rate_interpolation(self.profile, tracker, 9)


class TestKernelPrediction:
    def test_orthogonal_pair(self):
        # softmax([1, 0]) puts weight e/(1+e) on the matching task
        emb = np.array([[1.0, 0.0], [0.0, 1.0]])
        cfg = KernelConfig(embeddings=emb, temperature=1.0)
        rates = predict_rates_kernel(cfg, np.array([0, 1]), np.array([1.0, 0.0]))
        w = np.e / (1.0 + np.e)
        assert_allclose(rates[0], w)
        assert_allclose(rates[0], 0.7310585786300049, rtol=0, atol=1e-15)
        assert_allclose(rates[1], 1.0 - w)

    def test_identical_embeddings_average(self):
        emb = np.tile([0.3, -0.7], (4, 1))
        cfg = KernelConfig(embeddings=emb, temperature=0.5)
        rates = predict_rates_kernel(cfg, np.array([0, 2]), np.array([0.2, 0.8]))
        assert_allclose(rates, 0.5)

    def test_single_member_batch(self):
        emb = np.array([[1.0, 0.0], [0.0, 1.0], [0.7, 0.7]])
        cfg = KernelConfig(embeddings=emb, temperature=2.0)
        rates = predict_rates_kernel(cfg, np.array([1]), np.array([0.4]))
        assert_allclose(rates, 0.4)

    def test_empty_batch_rejected(self):
        cfg = KernelConfig(embeddings=np.eye(3), temperature=1.0)
        with pytest.raises(ValueError):
            predict_rates_kernel(cfg, np.array([], dtype=int), np.array([]))

    def test_convex_combination_property(self):
        rng = np.random.default_rng(23)
        for _ in range(300):
            count = int(rng.integers(2, 12))
            dim = int(rng.integers(1, 6))
            emb = rng.normal(size=(count, dim))
            temperature = float(rng.uniform(0.05, 5.0))
            cfg = KernelConfig(embeddings=emb, temperature=temperature)
            bsize = int(rng.integers(1, count + 1))
            batch = rng.choice(count, size=bsize, replace=False)
            rates = rng.uniform(size=bsize)
            out = predict_rates_kernel(cfg, batch, rates)
            assert np.all(out >= rates.min() - 1e-12)
            assert np.all(out <= rates.max() + 1e-12)
            # constant rates expose the weight normalization directly
            ones = predict_rates_kernel(cfg, batch, np.ones(bsize))
            assert_allclose(ones, 1.0, rtol=0, atol=1e-12)

    def test_huge_logits_do_not_overflow(self):
        # max-subtraction keeps exp() in range for large embedding norms
        emb = np.array([[400.0, 0.0], [0.0, 400.0], [300.0, 300.0]])
        cfg = KernelConfig(embeddings=emb, temperature=1.0)
        out = predict_rates_kernel(cfg, np.array([0, 1]), np.array([0.0, 1.0]))
        assert np.all(np.isfinite(out))
        assert np.all((out >= 0.0) & (out <= 1.0))

    def test_scalar_accessor(self):
        emb = np.array([[1.0, 0.0], [0.0, 1.0]])
        cfg = KernelConfig(embeddings=emb, temperature=1.0)
        full = predict_rates_kernel(cfg, np.array([0, 1]), np.array([1.0, 0.0]))
        one = predict_rate_kernel(cfg, np.array([0, 1]), np.array([1.0, 0.0]), 1)
        assert_allclose(one, full[1])

    def test_config_validation(self):
        with pytest.raises(ValueError):
            KernelConfig(embeddings=np.ones(3), temperature=1.0)
        with pytest.raises(ValueError):
            KernelConfig(embeddings=np.eye(2), temperature=0.0)


class TestPseudoCounts:
    def test_quarter(self):
        assert pseudo_counts(0.25, 16) == (4.0, 12.0)

    def test_extremes(self):
        assert pseudo_counts(0.0, 8) == (0.0, 8.0)
        assert pseudo_counts(1.0, 8) == (8.0, 0.0)

    def test_sum_always_exact(self):
        rng = np.random.default_rng(5)
        for rate in rng.uniform(0, 1, 2000):
            s, f = pseudo_counts(float(rate), 32)
            assert s + f == 32.0

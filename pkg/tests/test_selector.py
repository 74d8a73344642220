"""Batch selection: Thompson-style targeting plus the baseline selectors."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from taskbandit import (
    PosteriorStore,
    ReferenceProfile,
    STRATEGY_NAMES,
    SelectorConfig,
    make_strategy,
    offline_order,
    offline_select,
    random_select,
    thompson_select,
)


def store_with_means(means, total=10.0):
    means = np.asarray(means, dtype=float)
    alpha = means * total
    beta = total - alpha
    base = np.ones_like(alpha)
    return PosteriorStore(alpha, beta, base, base)


class TestThompsonSelect:
    def test_mean_ranking_with_sampling_off(self):
        # means 0.52, 0.9, 0.1, 0.48; both ties break toward the lower id
        store = store_with_means([0.52, 0.9, 0.1, 0.48], total=25.0)
        cfg = SelectorConfig(p_star=0.5, batch_size=2,
                             sample_posterior=False, seed=0)
        picked = thompson_select(store, cfg, np.random.default_rng(0))
        assert list(picked.task_ids) == [0, 3]
        assert_allclose(picked.sampled_rates, [0.52, 0.48])

    def test_full_pool(self):
        store = store_with_means([0.2, 0.5, 0.8])
        cfg = SelectorConfig(p_star=0.5, batch_size=3,
                             sample_posterior=False, seed=0)
        picked = thompson_select(store, cfg, np.random.default_rng(1))
        assert sorted(picked.task_ids) == [0, 1, 2]
        assert picked.task_ids[0] == 1

    def test_single_task_pool(self):
        store = store_with_means([0.9])
        cfg = SelectorConfig(p_star=0.5, batch_size=1,
                             sample_posterior=False, seed=0)
        picked = thompson_select(store, cfg, np.random.default_rng(2))
        assert list(picked.task_ids) == [0]

    def test_batch_larger_than_pool(self):
        store = store_with_means([0.5, 0.5])
        cfg = SelectorConfig(p_star=0.5, batch_size=3,
                             sample_posterior=False, seed=0)
        with pytest.raises(ValueError):
            thompson_select(store, cfg, np.random.default_rng(0))

    def test_sampling_determinism(self):
        store = store_with_means([0.3, 0.5, 0.7, 0.2, 0.9], total=4.0)
        cfg = SelectorConfig(p_star=0.5, batch_size=2,
                             sample_posterior=True, seed=0)
        a = thompson_select(store, cfg, np.random.default_rng(42))
        b = thompson_select(store, cfg, np.random.default_rng(42))
        assert list(a.task_ids) == list(b.task_ids)
        assert_allclose(a.sampled_rates, b.sampled_rates, rtol=0, atol=0)

    def test_permutation_equivariance_without_sampling(self):
        means = np.array([0.41, 0.77, 0.13, 0.55, 0.92])
        store = store_with_means(means)
        cfg = SelectorConfig(p_star=0.5, batch_size=2,
                             sample_posterior=False, seed=0)
        base = thompson_select(store, cfg, np.random.default_rng(0))
        perm = np.array([3, 0, 4, 1, 2])
        store_p = store_with_means(means[perm])
        picked = thompson_select(store_p, cfg, np.random.default_rng(0))
        relabeled = perm[np.asarray(picked.task_ids)]
        assert sorted(relabeled) == sorted(base.task_ids)

    def test_concentrates_near_target(self):
        # one well-known mid-difficulty task against a field of easy failures
        alpha = np.full(10, 2.0)
        beta = np.full(10, 18.0)
        alpha[4], beta[4] = 50.0, 50.0
        base = np.ones(10)
        store = PosteriorStore(alpha, beta, base, base)
        cfg = SelectorConfig(p_star=0.5, batch_size=1,
                             sample_posterior=True, seed=0)
        rng = np.random.default_rng(9)
        hits = sum(
            thompson_select(store, cfg, rng).task_ids[0] == 4
            for _ in range(1000)
        )
        assert hits / 1000 > 0.95


class TestRandomSelect:
    def test_ids_distinct_and_in_range(self):
        rng = np.random.default_rng(7)
        picked = random_select(20, 8, rng)
        assert len(set(picked.task_ids.tolist())) == 8
        assert np.all((picked.task_ids >= 0) & (picked.task_ids < 20))
        assert np.all(np.isnan(picked.sampled_rates))

    def test_uniform_frequencies(self):
        rng = np.random.default_rng(12)
        counts = np.zeros(4)
        trials = 100_000
        for _ in range(trials):
            counts[random_select(4, 1, rng).task_ids[0]] += 1
        assert_allclose(counts / trials, 0.25, atol=0.01)

    def test_batch_larger_than_pool(self):
        with pytest.raises(ValueError):
            random_select(3, 4, np.random.default_rng(0))


class TestOfflineSelect:
    def test_order_hardest_first(self):
        profile = ReferenceProfile(
            p_weak=np.array([0.1, 0.9, 0.5]),
            p_strong=np.array([0.2, 1.0, 0.7]),
        )
        assert list(offline_order(profile)) == [1, 2, 0]

    def test_order_ties_fall_back_to_strong_then_id(self):
        profile = ReferenceProfile(
            p_weak=np.array([0.5, 0.5, 0.5]),
            p_strong=np.array([0.6, 0.9, 0.9]),
        )
        # equal weak rates: higher strong first, then lower id
        assert list(offline_order(profile)) == [1, 2, 0]

    def test_flat_profile_is_id_order(self):
        profile = ReferenceProfile(p_weak=np.full(4, 0.3), p_strong=np.full(4, 0.6))
        assert list(offline_order(profile)) == [0, 1, 2, 3]

    def test_cursor_wraps(self):
        profile = ReferenceProfile(
            p_weak=np.array([0.1, 0.9, 0.5]),
            p_strong=np.array([0.2, 1.0, 0.7]),
        )
        picked = offline_select(profile, cursor=2, batch_size=2)
        assert list(picked.task_ids) == [0, 1]


class TestMakeStrategy:
    def test_presets(self):
        table = {
            "random": ("random", 0.1, 0.1, True),
            "offline": ("offline", 0.1, 0.1, True),
            "bots": ("thompson", 0.1, 0.1, True),
            "bots-mopps": ("thompson", 0.0, 0.0, True),
            "bots-dots": ("thompson", 1.0, 1.0, False),
        }
        assert set(table) == set(STRATEGY_NAMES)
        for name, (mode, forget, mix, sampling) in table.items():
            strat = make_strategy(name, batch_size=8, seed=3, rollouts=4)
            assert strat.mode == mode
            assert strat.update.forget == forget
            assert strat.update.mix == mix
            assert strat.selector.sample_posterior is sampling
            assert strat.update.rollouts == 4
            assert strat.selector.batch_size == 8

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown strategy"):
            make_strategy("ucb")

    def test_target_override(self):
        strat = make_strategy("bots", p_star=0.7)
        assert strat.selector.p_star == 0.7

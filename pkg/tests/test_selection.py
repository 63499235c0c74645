import itertools

import numpy as np
import pytest

from helpers import brute_force_min_distance, greedy_trace_oracle, make_fake_histogram
from repscape.errors import ValidationError
from repscape.histogram import WindowPartition, build_equal_width
from repscape.pca import Projection
from repscape.representativeness import ColorScale, MODE_HEAT, make_index_scorer
from repscape.selection import (
    BaselineResult,
    SelectionConfig,
    percentile_of,
    random_baseline,
    select_ideal,
)


def run_selection(frequencies, window, n_sites, seed=0, median=False):
    h = make_fake_histogram(frequencies)
    wp = WindowPartition(len(frequencies), window)
    cfg = SelectionConfig(n_sites=n_sites, bins=len(frequencies), window=window, seed=seed, median=median)
    return h, select_ideal(h, wp, cfg)


class TestGreedyTraces:
    def test_mode_first_then_next_window(self):
        _, result = run_selection([5, 1, 3, 2], window=1, n_sites=2)
        assert result.buckets == (0, 2)
        assert not result.truncated

    def test_windowed_example_with_tie_rule(self):
        _, result = run_selection([5, 4, 1, 2], window=2, n_sites=2)
        assert result.trace == ((0, 0), (3, 1))

    def test_last_max_wins_on_ties(self):
        _, result = run_selection([3, 3, 3], window=1, n_sites=1)
        assert result.buckets == (2,)

    def test_early_stop_returns_fewer_sites(self):
        _, result = run_selection([3, 0, 0, 0], window=1, n_sites=3)
        assert len(result.indices) == 1
        assert result.truncated

    def test_zero_frequency_bucket_never_chosen(self):
        _, result = run_selection([0, 2, 0, 1], window=1, n_sites=4)
        assert set(result.buckets) == {1, 3}
        assert result.truncated

    def test_matches_independent_pseudocode_reimplementation(self):
        rng = np.random.default_rng(31)
        for _ in range(300):
            bins = int(rng.integers(1, 9))
            freqs = rng.integers(0, 6, size=bins)
            window = int(rng.integers(1, min(bins, 3) + 1))
            n_sites = int(rng.integers(1, 7))
            if freqs.sum() == 0:
                continue
            _, result = run_selection(freqs.tolist(), window, n_sites)
            assert result.trace == tuple(greedy_trace_oracle(freqs.tolist(), window, n_sites))

    def test_no_window_reused(self):
        rng = np.random.default_rng(37)
        for _ in range(100):
            bins = int(rng.integers(2, 12))
            freqs = rng.integers(0, 5, size=bins)
            if freqs.sum() == 0:
                continue
            window = int(rng.integers(1, bins + 1))
            _, result = run_selection(freqs.tolist(), window, n_sites=bins)
            windows = [w for _, w in result.trace]
            assert len(windows) == len(set(windows))

    def test_site_count_equals_nonzero_window_count_cap(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            bins = int(rng.integers(1, 12))
            freqs = rng.integers(0, 4, size=bins)
            if freqs.sum() == 0:
                continue
            window = int(rng.integers(1, bins + 1))
            wp = WindowPartition(bins, window)
            nonzero_windows = {
                wp.window_of(b) for b in range(bins) if freqs[b] > 0
            }
            n_sites = int(rng.integers(1, 14))
            _, result = run_selection(freqs.tolist(), window, n_sites)
            assert len(result.indices) == min(n_sites, len(nonzero_windows))

    def test_chosen_members_come_from_winning_bucket(self):
        h, result = run_selection([4, 2, 5, 1], window=1, n_sites=4, seed=9)
        for row, (bucket, _) in zip(result.indices, result.trace):
            assert row in h.members[bucket]

    def test_greedy_is_bruteforce_optimal_at_w1(self):
        rng = np.random.default_rng(43)
        for _ in range(40):
            bins = int(rng.integers(2, 11))
            freqs = rng.integers(0, 7, size=bins)
            if freqs.sum() == 0:
                continue
            n_sites = int(rng.integers(1, 5))
            _, result = run_selection(freqs.tolist(), 1, n_sites)
            greedy_mass = freqs[list(result.buckets)].sum()
            best = max(
                freqs[list(combo)].sum()
                for combo in itertools.combinations(range(bins), min(n_sites, bins))
            )
            assert greedy_mass == best

    def test_determinism(self):
        a = run_selection([4, 4, 2, 7, 1], window=1, n_sites=4, seed=12)[1]
        b = run_selection([4, 4, 2, 7, 1], window=1, n_sites=4, seed=12)[1]
        assert np.array_equal(a.indices, b.indices)
        assert a.trace == b.trace

    def test_median_mode_is_seed_free(self):
        a = run_selection([9, 3], window=1, n_sites=2, seed=1, median=True)[1]
        b = run_selection([9, 3], window=1, n_sites=2, seed=99, median=True)[1]
        assert np.array_equal(a.indices, b.indices)

    def test_empty_histogram_rejected(self):
        h = make_fake_histogram([0, 0])
        cfg = SelectionConfig(n_sites=1, bins=2)
        with pytest.raises(ValidationError):
            select_ideal(h, WindowPartition(2, 1), cfg)

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            SelectionConfig(n_sites=0, bins=4)
        with pytest.raises(ValidationError):
            SelectionConfig(n_sites=1, bins=4, window=5)
        with pytest.raises(ValidationError):
            SelectionConfig(n_sites=1, bins=0)


class TestBaseline:
    def _scorer_all_ones(self, indices):
        return 1.0

    def test_sampling_whole_dataset_gives_r_one(self):
        p = Projection.from_scores(np.random.default_rng(0).normal(size=30))
        scorer = make_index_scorer(p, ColorScale(10), MODE_HEAT)
        result = random_baseline(30, 30, trials=5, seed=1, scorer=scorer)
        assert np.array_equal(result.r_values, np.ones(5))

    def test_seed_reproducibility(self):
        p = Projection.from_scores(np.random.default_rng(1).normal(size=50))
        scorer = make_index_scorer(p, ColorScale(10), MODE_HEAT)
        a = random_baseline(50, 5, trials=10, seed=7, scorer=scorer)
        b = random_baseline(50, 5, trials=10, seed=7, scorer=scorer)
        assert np.array_equal(a.r_values, b.r_values)

    def test_mean_is_arithmetic_mean(self):
        result = BaselineResult(4, 2, 0, np.array([0.1, 0.2, 0.3, 0.8]))
        assert abs(result.mean_r - (0.1 + 0.2 + 0.3 + 0.8) / 4) < 1e-12

    def test_too_many_sites_rejected(self):
        with pytest.raises(ValidationError):
            random_baseline(10, 11, trials=1, seed=0, scorer=self._scorer_all_ones)
        with pytest.raises(ValidationError):
            random_baseline(10, 5, trials=0, seed=0, scorer=self._scorer_all_ones)

    def test_draws_are_distinct_rows(self):
        seen = []

        def scorer(indices):
            seen.append(np.asarray(indices))
            return 0.0

        random_baseline(20, 8, trials=6, seed=3, scorer=scorer)
        for idx in seen:
            assert len(np.unique(idx)) == 8

    def test_matches_independent_sampler_and_scorer(self):
        # independent route: spawn the same substreams by hand and score
        # each draw with the dense distance matrix
        rng = np.random.default_rng(5)
        scores = np.concatenate([rng.normal(0, 1, 600), rng.normal(8, 1, 400)])
        p = Projection.from_scores(scores)
        scale = ColorScale(10)
        scorer = make_index_scorer(p, scale, MODE_HEAT)
        result = random_baseline(1000, 12, trials=200, seed=99, scorer=scorer)

        streams = np.random.SeedSequence(99).spawn(200)
        span = p.p_max - p.p_min
        expected = []
        for t in range(200):
            gen = np.random.default_rng(streams[t])
            idx = gen.choice(1000, size=12, replace=False)
            fd = brute_force_min_distance(scores, scores[idx])
            nfd = np.minimum(fd / span, 1.0)
            expected.append(np.count_nonzero(np.floor(nfd * 10).astype(int).clip(max=9) == 0) / 1000)
        assert abs(result.mean_r - np.mean(expected)) <= 0.01
        assert np.allclose(result.r_values, expected)


class TestPercentile:
    def _baseline(self, values):
        return BaselineResult(len(values), 1, 0, np.asarray(values, dtype=np.float64))

    def test_below_everything(self):
        assert percentile_of(self._baseline([0.5, 0.6, 0.7]), 0.1) == 0.0

    def test_above_everything(self):
        assert percentile_of(self._baseline([0.5, 0.6, 0.7]), 0.9) == 100.0

    def test_strict_less_convention(self):
        values = np.linspace(0.0, 0.999, 1000)
        r = values[480]  # exceeds exactly 480 trials
        assert percentile_of(self._baseline(values), float(r)) == 48.0

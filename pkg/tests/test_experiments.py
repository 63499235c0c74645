import numpy as np
import pytest

import repscape as rs
from repscape import experiments, pipeline
from repscape.errors import ValidationError
from repscape.experiments import SweepPoint, SweepResult, compare_methods, sweep_bins, sweep_centroids
from repscape.representativeness import MODE_HEAT, MODE_WINDOW
from repscape.selection import SelectionConfig


@pytest.fixture
def analysis(bimodal_analysis):
    return bimodal_analysis


def all_rows_sample(analysis):
    return pipeline.sample_set_from_rows(analysis, np.arange(analysis.data.n_regions))


class TestCompareMethods:
    def test_given_whole_dataset_all_methods_reach_one(self, analysis):
        n = analysis.data.n_regions
        cfg = SelectionConfig(n_sites=n, bins=10, window=1, seed=2)
        result = compare_methods(
            analysis, all_rows_sample(analysis), cfg, trials=3,
            scale=rs.ColorScale(10), mode=MODE_WINDOW,
        )
        assert result.given_r == 1.0
        assert result.ideal_r == 1.0
        assert result.random_mean_r == 1.0

    def test_ideal_at_least_random_on_bimodal(self, analysis):
        cfg = SelectionConfig(n_sites=4, bins=12, window=1, seed=5)
        result = compare_methods(
            analysis, all_rows_sample(analysis), cfg, trials=50,
            scale=rs.ColorScale(10), mode=MODE_HEAT,
        )
        assert result.ideal_r >= result.random_mean_r

    def test_off_mode_given_ranks_lowest(self, analysis):
        # given sample pinned to the extreme tail
        order = np.argsort(analysis.projection.values)
        given = pipeline.sample_set_from_rows(analysis, order[-3:])
        cfg = SelectionConfig(n_sites=3, bins=12, window=1, seed=5)
        result = compare_methods(analysis, given, cfg, trials=100, scale=rs.ColorScale(10))
        assert result.ideal_r > result.random_mean_r > result.given_r

    def test_single_mode_everywhere(self, analysis):
        cfg = SelectionConfig(n_sites=2, bins=8, window=1, seed=1)
        result = compare_methods(
            analysis, all_rows_sample(analysis), cfg, trials=5,
            scale=rs.ColorScale(10), mode=MODE_WINDOW,
        )
        assert result.mode == MODE_WINDOW
        payload = result.to_payload()
        assert payload["mode"] == MODE_WINDOW
        assert {row["method"] for row in payload["rows"]} == {"given", "ideal", "random"}
        assert payload["percentiles"]["ideal"] >= 0.0

    def test_reproducible(self, analysis):
        order = np.argsort(analysis.projection.values)
        given = pipeline.sample_set_from_rows(analysis, order[:5])
        cfg = SelectionConfig(n_sites=5, bins=10, window=1, seed=3)
        a = compare_methods(analysis, given, cfg, trials=20, scale=rs.ColorScale(10))
        b = compare_methods(analysis, given, cfg, trials=20, scale=rs.ColorScale(10))
        assert a.to_payload() == b.to_payload()


class TestSweepCentroids:
    def test_curves_end_at_one_when_n_equals_rows(self, analysis):
        n = analysis.data.n_regions
        cfg = SelectionConfig(n_sites=1, bins=8, window=1, seed=2)
        result = sweep_centroids(
            analysis, [1, n], cfg, trials=3, scale=rs.ColorScale(10), mode=MODE_WINDOW
        )
        assert result.points[-1].ideal_r == 1.0
        assert result.points[-1].random_mean_r == 1.0

    def test_ideal_curve_monotone_nondecreasing(self, analysis):
        cfg = SelectionConfig(n_sites=1, bins=12, window=1, seed=7)
        result = sweep_centroids(
            analysis, [1, 2, 3, 4, 6, 8, 12], cfg, trials=2, scale=rs.ColorScale(10)
        )
        ideal = [p.ideal_r for p in result.points]
        assert all(b >= a for a, b in zip(ideal, ideal[1:]))

    def test_given_column_carried(self, analysis):
        given = all_rows_sample(analysis)
        cfg = SelectionConfig(n_sites=1, bins=8, window=1, seed=2)
        result = sweep_centroids(
            analysis, [1, 2], cfg, trials=2, scale=rs.ColorScale(10),
            mode=MODE_WINDOW, given=given,
        )
        assert all(p.given_r == 1.0 for p in result.points)

    def test_values_must_ascend(self, analysis):
        cfg = SelectionConfig(n_sites=1, bins=8, window=1, seed=2)
        with pytest.raises(ValidationError):
            sweep_centroids(analysis, [3, 2], cfg, trials=1, scale=rs.ColorScale(10))
        with pytest.raises(ValidationError):
            sweep_centroids(
                analysis, [analysis.data.n_regions + 1], cfg, trials=1, scale=rs.ColorScale(10)
            )

    def test_csv_shape(self, analysis):
        cfg = SelectionConfig(n_sites=1, bins=8, window=1, seed=2)
        result = sweep_centroids(analysis, [1, 2], cfg, trials=2, scale=rs.ColorScale(10))
        lines = result.to_csv().strip().splitlines()
        assert lines[0] == "centroids,ideal_r,random_mean_r,given_r"
        assert len(lines) == 3


@pytest.fixture(scope="module")
def concentrated_analysis():
    mix = rs.dataset.clustered_mixture(
        weights=[0.50, 0.38, 0.04, 0.04, 0.04],
        positions=[0.0, 2.2, 6.0, 8.0, 10.0],
        widths=[0.55, 0.55, 0.06, 0.06, 0.06],
    )
    return rs.prepare_analysis(rs.generate_synthetic(mix, 5000, seed=21))


class TestSweepBins:
    def test_bins_equal_sites_is_sweep_maximum(self, concentrated_analysis):
        # median picks remove draw noise so cells compare cleanly
        cfg = SelectionConfig(n_sites=6, bins=6, window=1, seed=9, median=True)
        [result] = sweep_bins(
            concentrated_analysis, [6, 12, 24, 48, 96], [1], cfg, rs.ColorScale(10), mode=MODE_HEAT
        )
        rs_by_bins = {p.value: p.ideal_r for p in result.points}
        assert rs_by_bins[6] == max(rs_by_bins.values())

    def test_decreasing_then_stable_on_concentrated_data(self, concentrated_analysis):
        cfg = SelectionConfig(n_sites=6, bins=6, window=1, seed=9, median=True)
        [result] = sweep_bins(
            concentrated_analysis, [6, 12, 24, 48, 96], [1], cfg, rs.ColorScale(10), mode=MODE_HEAT
        )
        curve = [p.ideal_r for p in result.points]
        assert all(b <= a + 0.02 for a, b in zip(curve, curve[1:]))
        assert abs(curve[-1] - curve[-2]) <= 0.01

    def test_one_result_per_window(self, analysis):
        cfg = SelectionConfig(n_sites=3, bins=3, window=1, seed=9)
        results = sweep_bins(analysis, [3, 6], [1, 3], cfg, rs.ColorScale(10))
        assert len(results) == 2
        assert results[0].fixed["window"] == 1
        assert results[1].fixed["window"] == 3

    def test_minimum_bins_must_cover_sites(self, analysis):
        cfg = SelectionConfig(n_sites=5, bins=5, window=1, seed=9)
        with pytest.raises(ValidationError):
            sweep_bins(analysis, [4, 8], [1], cfg, rs.ColorScale(10))

    def test_reproducible_payload(self, analysis):
        cfg = SelectionConfig(n_sites=3, bins=3, window=1, seed=4)
        a = sweep_bins(analysis, [3, 6, 12], [1, 2], cfg, rs.ColorScale(10))
        b = sweep_bins(analysis, [3, 6, 12], [1, 2], cfg, rs.ColorScale(10))
        assert [r.to_payload() for r in a] == [r.to_payload() for r in b]


class TestSweepResult:
    def test_points_must_ascend(self):
        with pytest.raises(ValidationError):
            SweepResult("bins", (SweepPoint(4, 1.0), SweepPoint(2, 1.0)), {})

    def test_payload_fields(self):
        result = SweepResult("centroids", (SweepPoint(1, 0.5, 0.4, None),), {"bins": 8})
        payload = result.to_payload()
        assert payload["axis"] == "centroids"
        assert payload["points"][0] == {
            "value": 1, "ideal_r": 0.5, "random_mean_r": 0.4, "given_r": None,
        }

"""Desk-scale experiment protocols: three-way method comparison, the
R-vs-site-count trend, and the bins x window sweep.

Within one experiment the projection model is fitted exactly once and all
arms (given / ideal / random) are scored with the same mode, scale, bins
and window, so their R values are directly comparable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .errors import ValidationError
from .histogram import WindowPartition, build_histogram
from .pipeline import Analysis, sample_set_from_rows
from .representativeness import (
    METHOD_GIVEN,
    METHOD_IDEAL,
    METHOD_RANDOM,
    MODE_HEAT,
    ColorScale,
    SampleSet,
    final_distance,
    make_index_scorer,
    normalize_distances,
    score_heat,
    score_window_coverage,
)
from .selection import (
    BaselineResult,
    SelectionConfig,
    percentile_of,
    random_baseline,
    select_ideal,
)


def _scoring_context(analysis: Analysis, cfg: SelectionConfig, scale: ColorScale, mode: str):
    hist = build_histogram(analysis.projection, cfg.bins, cfg.kind)
    windows = WindowPartition(cfg.bins, cfg.window)
    scorer = make_index_scorer(analysis.projection, scale, mode, hist, windows)
    return hist, windows, scorer


def _score_sample_set(analysis, samples: SampleSet, scale, mode, hist, windows) -> float:
    if mode == MODE_HEAT:
        fd = final_distance(analysis.projection, samples)
        return score_heat(normalize_distances(fd, analysis.projection), scale)
    return score_window_coverage(hist, windows, samples)


@dataclass(frozen=True)
class MethodComparison:
    """R of the given, ideal and (average) random methods under one scoring."""

    mode: str
    given_r: float
    ideal_r: float
    random_mean_r: float
    baseline: BaselineResult
    given_percentile: float
    ideal_percentile: float
    ideal_truncated: bool
    config: SelectionConfig

    @property
    def rows(self) -> list[tuple[str, float]]:
        return [
            (METHOD_GIVEN, self.given_r),
            (METHOD_IDEAL, self.ideal_r),
            (METHOD_RANDOM, self.random_mean_r),
        ]

    def to_payload(self) -> dict:
        return {
            "mode": self.mode,
            "rows": [{"method": m, "R": r} for m, r in self.rows],
            "percentiles": {
                METHOD_GIVEN: self.given_percentile,
                METHOD_IDEAL: self.ideal_percentile,
            },
            "baseline": self.baseline.to_payload(),
            "ideal_truncated": self.ideal_truncated,
        }


def compare_methods(
    analysis: Analysis,
    given: SampleSet,
    cfg: SelectionConfig,
    trials: int,
    scale: ColorScale,
    mode: str = MODE_HEAT,
) -> MethodComparison:
    """Score the given samples, a greedy selection and the random baseline
    identically (one projection fit, one mode, one scale)."""
    hist, windows, scorer = _scoring_context(analysis, cfg, scale, mode)
    given_r = _score_sample_set(analysis, given, scale, mode, hist, windows)

    selection = select_ideal(hist, windows, cfg)
    ideal_samples = sample_set_from_rows(analysis, selection.indices)
    ideal_r = _score_sample_set(analysis, ideal_samples, scale, mode, hist, windows)

    baseline = random_baseline(analysis.data.n_regions, cfg.n_sites, trials, cfg.seed, scorer)
    return MethodComparison(
        mode=mode,
        given_r=given_r,
        ideal_r=ideal_r,
        random_mean_r=baseline.mean_r,
        baseline=baseline,
        given_percentile=percentile_of(baseline, given_r),
        ideal_percentile=percentile_of(baseline, ideal_r),
        ideal_truncated=selection.truncated,
        config=cfg,
    )


@dataclass(frozen=True)
class SweepPoint:
    value: int
    ideal_r: float
    random_mean_r: float | None = None
    given_r: float | None = None


@dataclass(frozen=True)
class SweepResult:
    axis: str
    points: tuple[SweepPoint, ...]
    fixed: dict

    def __post_init__(self):
        values = [p.value for p in self.points]
        if values != sorted(set(values)):
            raise ValidationError("sweep parameter values must be strictly ascending")

    def to_payload(self) -> dict:
        return {
            "axis": self.axis,
            "fixed": self.fixed,
            "points": [
                {
                    "value": p.value,
                    "ideal_r": p.ideal_r,
                    "random_mean_r": p.random_mean_r,
                    "given_r": p.given_r,
                }
                for p in self.points
            ],
        }

    def to_csv(self) -> str:
        lines = [f"{self.axis},ideal_r,random_mean_r,given_r"]
        for p in self.points:
            random_s = "" if p.random_mean_r is None else repr(p.random_mean_r)
            given_s = "" if p.given_r is None else repr(p.given_r)
            lines.append(f"{p.value},{repr(p.ideal_r)},{random_s},{given_s}")
        return "\n".join(lines) + "\n"


def sweep_centroids(
    analysis: Analysis,
    n_values: Sequence[int],
    cfg: SelectionConfig,
    trials: int,
    scale: ColorScale,
    mode: str = MODE_HEAT,
    given: SampleSet | None = None,
) -> SweepResult:
    """Ideal R and mean random R while the requested site count grows."""
    n_values = list(n_values)
    if n_values != sorted(set(n_values)):
        raise ValidationError("n_values must be strictly ascending")
    if max(n_values) > analysis.data.n_regions:
        raise ValidationError("n_values exceed the region count")
    hist, windows, scorer = _scoring_context(analysis, cfg, scale, mode)
    given_r = (
        _score_sample_set(analysis, given, scale, mode, hist, windows)
        if given is not None
        else None
    )
    points = []
    for n in n_values:
        cell = replace(cfg, n_sites=n)
        selection = select_ideal(hist, windows, cell)
        ideal_samples = sample_set_from_rows(analysis, selection.indices)
        ideal_r = _score_sample_set(analysis, ideal_samples, scale, mode, hist, windows)
        baseline = random_baseline(analysis.data.n_regions, n, trials, cfg.seed, scorer)
        points.append(SweepPoint(n, ideal_r, baseline.mean_r, given_r))
    return SweepResult(
        axis="centroids",
        points=tuple(points),
        fixed={
            "bins": cfg.bins,
            "window": cfg.window,
            "seed": cfg.seed,
            "kind": cfg.kind,
            "mode": mode,
            "trials": trials,
            "scale_buckets": scale.bucket_count,
        },
    )


def sweep_bins(
    analysis: Analysis,
    bin_values: Sequence[int],
    window_values: Sequence[int],
    cfg: SelectionConfig,
    scale: ColorScale,
    mode: str = MODE_HEAT,
    trials: int = 0,
) -> list[SweepResult]:
    """Ideal R per (bins, window) cell at a fixed site count.

    One SweepResult per window size; the bin axis must start at or above
    the site count so every site can land in a distinct window.
    """
    bin_values = list(bin_values)
    if bin_values != sorted(set(bin_values)):
        raise ValidationError("bin_values must be strictly ascending")
    if min(bin_values) < cfg.n_sites:
        raise ValidationError("minimum bins must be >= the number of sites")
    results = []
    for w in window_values:
        points = []
        for bins in bin_values:
            cell = replace(cfg, bins=bins, window=w)
            hist, windows, scorer = _scoring_context(analysis, cell, scale, mode)
            selection = select_ideal(hist, windows, cell)
            ideal_samples = sample_set_from_rows(analysis, selection.indices)
            ideal_r = _score_sample_set(analysis, ideal_samples, scale, mode, hist, windows)
            random_mean = None
            if trials > 0:
                baseline = random_baseline(
                    analysis.data.n_regions, cell.n_sites, trials, cfg.seed, scorer
                )
                random_mean = baseline.mean_r
            points.append(SweepPoint(bins, ideal_r, random_mean))
        results.append(
            SweepResult(
                axis="bins",
                points=tuple(points),
                fixed={
                    "n_sites": cfg.n_sites,
                    "window": w,
                    "seed": cfg.seed,
                    "kind": cfg.kind,
                    "mode": mode,
                    "trials": trials,
                    "scale_buckets": scale.bucket_count,
                },
            )
        )
    return results

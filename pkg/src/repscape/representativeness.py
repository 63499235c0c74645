"""Distance-to-sample scoring along the first principal axis.

Every region gets a final distance FD(x) = min over sample sites s of
|score(x) - score(s)|, normalized by the axis range into [0, 1] and
bucketed on a green-to-red color scale. Two scalar summaries exist:

* heat-scale: the fraction of regions in the greenest bucket;
* window-coverage: the histogram mass of every bin window touched by a
  sample site, divided by the total count.

Reports carry a mode tag so numbers from the two definitions are never
compared silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._validation import check_vector
from .errors import ValidationError
from .histogram import Histogram, WindowPartition
from .pca import Projection

MODE_HEAT = "heat-scale"
MODE_WINDOW = "window-coverage"
MODES = (MODE_HEAT, MODE_WINDOW)

METHOD_GIVEN = "given"
METHOD_IDEAL = "ideal"
METHOD_RANDOM = "random"

_PALETTE_ANCHORS = ((0x1A, 0x98, 0x50), (0xFF, 0xFF, 0xBF), (0xD7, 0x30, 0x27))


def default_palette(n: int) -> tuple[str, ...]:
    """Green -> yellow -> red hex ramp with n entries (n >= 2)."""
    if n < 2:
        raise ValidationError("palette needs at least 2 colors")
    colors = []
    for i in range(n):
        t = i / (n - 1)
        if t <= 0.5:
            left, right, u = _PALETTE_ANCHORS[0], _PALETTE_ANCHORS[1], t * 2.0
        else:
            left, right, u = _PALETTE_ANCHORS[1], _PALETTE_ANCHORS[2], (t - 0.5) * 2.0
        rgb = tuple(round(a + (b - a) * u) for a, b in zip(left, right))
        colors.append("#{:02x}{:02x}{:02x}".format(*rgb))
    return tuple(colors)


@dataclass(frozen=True)
class ColorScale:
    """Equal-width partition of normalized distance [0, 1] into color buckets.

    Bucket 0 (greenest) means completely represented; the last bucket
    (reddest) means completely unrepresented.
    """

    bucket_count: int = 10
    palette: tuple[str, ...] = ()

    def __post_init__(self):
        if self.bucket_count < 2:
            raise ValidationError("color scale needs at least 2 buckets")
        if not self.palette:
            object.__setattr__(self, "palette", default_palette(self.bucket_count))
        if len(self.palette) != self.bucket_count:
            raise ValidationError(
                f"palette has {len(self.palette)} colors for {self.bucket_count} buckets"
            )

    def to_payload(self) -> dict:
        return {"buckets": self.bucket_count, "palette": list(self.palette)}


@dataclass(frozen=True)
class SampleSite:
    """A sample entry resolved to an axis score.

    ``region_index`` is the dataset row for id-based entries and None for
    external points supplied with full variable values.
    """

    id: str
    lat: float
    lon: float
    score: float
    region_index: int | None = None


@dataclass(frozen=True)
class SampleSet:
    sites: tuple[SampleSite, ...]

    def __post_init__(self):
        if not self.sites:
            raise ValidationError("sample set must be non-empty")

    @property
    def scores(self) -> np.ndarray:
        return np.array([s.score for s in self.sites])

    @property
    def marker_coords(self) -> tuple[tuple[float, float], ...]:
        return tuple((s.lat, s.lon) for s in self.sites)


def _sample_scores(samples) -> np.ndarray:
    if isinstance(samples, SampleSet):
        return samples.scores
    scores = check_vector(np.asarray(samples, dtype=np.float64), name="sample scores")
    if scores.size == 0:
        raise ValidationError("sample set must be non-empty")
    return scores


def final_distance(p: Projection, samples) -> np.ndarray:
    """FD(x) = min over sites of |score(x) - score(site)|, one per region.

    Equivalent to the brute-force pairwise minimum; implemented with a
    sorted-sites nearest-neighbor lookup so it stays cheap for large
    region counts.
    """
    sites = np.sort(_sample_scores(samples))
    pos = np.searchsorted(sites, p.values)
    left = sites[np.clip(pos - 1, 0, len(sites) - 1)]
    right = sites[np.clip(pos, 0, len(sites) - 1)]
    return np.minimum(np.abs(p.values - left), np.abs(right - p.values))


def normalize_distances(fd, p: Projection) -> np.ndarray:
    """Scale raw distances by the axis range and clamp into [0, 1]."""
    fd = check_vector(np.asarray(fd, dtype=np.float64), name="fd")
    span = p.require_span()
    return np.minimum(fd / span, 1.0)


def bucket_distances(nfd, scale: ColorScale) -> np.ndarray:
    """Color bucket per region: min(floor(nfd * buckets), buckets - 1)."""
    nfd = np.asarray(nfd, dtype=np.float64)
    buckets = np.floor(nfd * scale.bucket_count).astype(np.int64)
    return np.minimum(buckets, scale.bucket_count - 1)


def representation_values(nfd) -> np.ndarray:
    """Per-region representation diagnostic |1 - d| (not used in scoring)."""
    return np.abs(1.0 - np.asarray(nfd, dtype=np.float64))


def score_heat(nfd, scale: ColorScale) -> float:
    """Fraction of regions whose color bucket is 0 (the greenest)."""
    buckets = bucket_distances(nfd, scale)
    return float(np.count_nonzero(buckets == 0) / len(buckets))


def score_window_coverage(h: Histogram, wp: WindowPartition, samples) -> float:
    """Mass of all bins in any window containing a sample's bin, over total.

    The union of covered windows is taken first, so several samples in one
    window never double count.
    """
    if wp.n_bins != h.n_bins:
        raise ValidationError("window partition does not match histogram bin count")
    sample_bins = h.bin_of_many(_sample_scores(samples))
    covered_windows = np.unique(wp.window_of_many(sample_bins))
    all_windows = wp.window_of_many(np.arange(h.n_bins))
    covered = np.isin(all_windows, covered_windows)
    return float(h.frequencies[covered].sum() / h.total)


@dataclass(frozen=True)
class RepresentativenessReport:
    """Per-region distances and buckets plus the scalar R under one mode."""

    region_ids: tuple[str, ...]
    lats: np.ndarray
    lons: np.ndarray
    fd: np.ndarray
    nfd: np.ndarray
    buckets: np.ndarray
    r: float
    method: str
    mode: str
    scale: ColorScale
    clamped_count: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        if not 0.0 <= self.r <= 1.0:
            raise ValidationError(f"R must lie in [0, 1], got {self.r}")

    @property
    def n_regions(self) -> int:
        return len(self.region_ids)

    def to_payload(self) -> dict:
        return {
            "mode": self.mode,
            "method": self.method,
            "R": self.r,
            "scale": self.scale.to_payload(),
            "clamped_regions": self.clamped_count,
            "cells": [
                {
                    "id": self.region_ids[i],
                    "lat": float(self.lats[i]),
                    "lon": float(self.lons[i]),
                    "fd": float(self.fd[i]),
                    "nfd": float(self.nfd[i]),
                    "bucket": int(self.buckets[i]),
                }
                for i in range(self.n_regions)
            ],
        }


def build_report(
    region_ids: Sequence[str],
    lats,
    lons,
    p: Projection,
    samples,
    scale: ColorScale,
    mode: str = MODE_HEAT,
    method: str = METHOD_GIVEN,
    hist: Histogram | None = None,
    windows: WindowPartition | None = None,
) -> RepresentativenessReport:
    """Score a sample set against every region and bundle the result."""
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    fd = final_distance(p, samples)
    span = p.require_span()
    clamped = int(np.count_nonzero(fd > span))
    nfd = normalize_distances(fd, p)
    buckets = bucket_distances(nfd, scale)
    if mode == MODE_HEAT:
        r = score_heat(nfd, scale)
    else:
        if hist is None or windows is None:
            raise ValidationError("window-coverage mode needs a histogram and window partition")
        r = score_window_coverage(hist, windows, samples)
    return RepresentativenessReport(
        region_ids=tuple(region_ids),
        lats=np.asarray(lats, dtype=np.float64),
        lons=np.asarray(lons, dtype=np.float64),
        fd=fd,
        nfd=nfd,
        buckets=buckets,
        r=r,
        method=method,
        mode=mode,
        scale=scale,
        clamped_count=clamped,
    )


def make_index_scorer(
    p: Projection,
    scale: ColorScale,
    mode: str,
    hist: Histogram | None = None,
    windows: WindowPartition | None = None,
) -> Callable[[np.ndarray], float]:
    """Scorer mapping dataset row indices to R, for baseline trials."""
    if mode == MODE_HEAT:
        def score(indices) -> float:
            fd = final_distance(p, p.values[np.asarray(indices, dtype=np.intp)])
            return score_heat(normalize_distances(fd, p), scale)
        return score
    if mode == MODE_WINDOW:
        if hist is None or windows is None:
            raise ValidationError("window-coverage scorer needs a histogram and window partition")
        def score(indices) -> float:
            return score_window_coverage(hist, windows, p.values[np.asarray(indices, dtype=np.intp)])
        return score
    raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")

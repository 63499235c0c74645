"""Equal-width and equal-frequency histograms over axis scores, plus the
window (step-kernel) partition of bins used by site selection.

Bins are right-open with the maximum folded into the last bin. Scores
outside the build range clamp to the edge bins, so a histogram built on
one population can still place external sample sites.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_vector
from .errors import DegenerateProjectionError, ValidationError
from .pca import Projection

EQUAL_WIDTH = "equal-width"
EQUAL_FREQUENCY = "equal-frequency"
HISTOGRAM_KINDS = (EQUAL_WIDTH, EQUAL_FREQUENCY)


@dataclass(frozen=True)
class Histogram:
    """Bin edges, per-bin counts and per-bin member row indices."""

    edges: np.ndarray
    frequencies: np.ndarray
    members: tuple[np.ndarray, ...]
    kind: str
    p_min: float
    p_max: float

    @property
    def n_bins(self) -> int:
        return len(self.frequencies)

    @property
    def total(self) -> int:
        return int(self.frequencies.sum())

    def bin_of(self, score: float) -> int:
        return int(self.bin_of_many(np.array([score]))[0])

    def bin_of_many(self, scores) -> np.ndarray:
        """Bin index per score; out-of-range scores clamp to the edge bins."""
        scores = check_vector(np.asarray(scores, dtype=np.float64), name="scores")
        if self.kind == EQUAL_WIDTH:
            idx = _equal_width_bins(scores, self.p_min, self.p_max, self.n_bins)
        else:
            # interior edges hold each bin's last member value; the first
            # bin whose range reaches the score wins
            idx = np.searchsorted(self.edges[1:-1], scores, side="left")
        return np.clip(idx, 0, self.n_bins - 1)

    def to_payload(self) -> dict:
        return {
            "kind": self.kind,
            "bins": self.n_bins,
            "edges": self.edges.tolist(),
            "frequencies": self.frequencies.tolist(),
        }


def _equal_width_bins(scores: np.ndarray, p_min: float, p_max: float, bins: int) -> np.ndarray:
    if bins == 1:
        return np.zeros(len(scores), dtype=np.intp)
    interval = (p_max - p_min) / bins
    idx = np.floor((scores - p_min) / interval).astype(np.intp)
    return idx


def _group_members(idx: np.ndarray, values: np.ndarray, bins: int) -> tuple[np.ndarray, ...]:
    # within each bin, members are ordered by score (ties by row) so the
    # bin's median member is its score-median
    order = np.lexsort((np.arange(len(idx)), values, idx))
    sorted_idx = idx[order]
    cuts = np.searchsorted(sorted_idx, np.arange(bins + 1))
    return tuple(order[cuts[b]: cuts[b + 1]] for b in range(bins))


def build_equal_width(p: Projection, bins: int) -> Histogram:
    """Bins of equal score width spanning [p_min, p_max].

    Values land in ``floor((x - p_min) / interval)`` with x == p_max folded
    into the last bin. Degenerate projections (p_max == p_min) are only
    representable with a single bin.
    """
    if bins < 1:
        raise ValidationError("bins must be >= 1")
    if p.span <= 0.0 and bins > 1:
        raise DegenerateProjectionError(
            "projection has zero spread; an equal-width histogram needs bins=1"
        )
    idx = np.clip(_equal_width_bins(p.values, p.p_min, p.p_max, bins), 0, bins - 1)
    frequencies = np.bincount(idx, minlength=bins).astype(np.int64)
    edges = p.p_min + np.arange(bins + 1) * (p.span / bins)
    edges[-1] = p.p_max
    members = _group_members(idx, p.values, bins)
    return Histogram(edges, frequencies, members, EQUAL_WIDTH, p.p_min, p.p_max)


def build_equal_frequency(p: Projection, bins: int) -> Histogram:
    """Bins holding (near-)equal point counts, cut at sorted-rank positions.

    Counts differ by at most one; ties are split by sorted rank, so tied
    values may straddle a cut. Interior edges record each bin's last member
    value (non-decreasing under ties).
    """
    n = len(p.values)
    if bins < 1:
        raise ValidationError("bins must be >= 1")
    if bins > n:
        raise ValidationError(f"bins ({bins}) must not exceed the region count ({n})")
    order = np.argsort(p.values, kind="stable")
    cuts = (np.arange(bins + 1) * n) // bins
    members = tuple(order[cuts[b]: cuts[b + 1]] for b in range(bins))
    frequencies = np.diff(cuts).astype(np.int64)
    sorted_values = p.values[order]
    edges = np.empty(bins + 1)
    edges[0] = p.p_min
    edges[-1] = p.p_max
    edges[1:-1] = sorted_values[cuts[1:-1] - 1]
    return Histogram(edges, frequencies, members, EQUAL_FREQUENCY, p.p_min, p.p_max)


def build_histogram(p: Projection, bins: int, kind: str = EQUAL_WIDTH) -> Histogram:
    if kind == EQUAL_WIDTH:
        return build_equal_width(p, bins)
    if kind == EQUAL_FREQUENCY:
        return build_equal_frequency(p, bins)
    raise ValidationError(f"histogram kind must be one of {HISTOGRAM_KINDS}, got {kind!r}")


@dataclass(frozen=True)
class WindowPartition:
    """Blocks of W consecutive bins; one site represents its whole window.

    ``window_count`` is floor(bins / W); remainder bins (when W does not
    divide bins) fold into the last window.
    """

    n_bins: int
    window_size: int

    def __post_init__(self):
        if not 1 <= self.window_size <= self.n_bins:
            raise ValidationError(
                f"window size must be in [1, {self.n_bins}], got {self.window_size}"
            )

    @property
    def window_count(self) -> int:
        return self.n_bins // self.window_size

    def window_of(self, bin_index: int) -> int:
        if not 0 <= bin_index < self.n_bins:
            raise ValidationError(f"bin index {bin_index} out of [0, {self.n_bins})")
        return min(bin_index // self.window_size, self.window_count - 1)

    def window_of_many(self, bin_indices) -> np.ndarray:
        idx = np.asarray(bin_indices, dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_bins):
            raise ValidationError("bin index out of range")
        return np.minimum(idx // self.window_size, self.window_count - 1)

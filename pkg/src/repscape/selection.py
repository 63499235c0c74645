"""Greedy windowed mode selection of ideal sites, plus the random baseline.

Each greedy iteration scans all buckets in ascending order, tracks the
highest frequency among buckets whose window is still unused (ties go to
the last qualifying bucket), marks the winner's window used, and draws one
member from the winning bucket. Selection stops early once every window
holding a non-empty bucket has been used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError
from .histogram import EQUAL_WIDTH, HISTOGRAM_KINDS, Histogram, WindowPartition


@dataclass(frozen=True)
class SelectionConfig:
    """Knobs for one greedy run: site count, binning, window, randomness."""

    n_sites: int
    bins: int
    window: int = 1
    seed: int = 0
    kind: str = EQUAL_WIDTH
    median: bool = False  # pick each bucket's median member instead of a seeded draw

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValidationError("n_sites must be >= 1")
        if self.bins < 1:
            raise ValidationError("bins must be >= 1")
        if not 1 <= self.window <= self.bins:
            raise ValidationError(f"window must be in [1, {self.bins}], got {self.window}")
        if self.kind not in HISTOGRAM_KINDS:
            raise ValidationError(f"histogram kind must be one of {HISTOGRAM_KINDS}")


@dataclass(frozen=True)
class SelectionResult:
    """Chosen rows plus the (bucket, window) decision trace."""

    indices: np.ndarray
    trace: tuple[tuple[int, int], ...]
    truncated: bool

    @property
    def buckets(self) -> tuple[int, ...]:
        return tuple(b for b, _ in self.trace)


def select_ideal(
    hist: Histogram,
    windows: WindowPartition,
    cfg: SelectionConfig,
    rng: np.random.Generator | None = None,
) -> SelectionResult:
    """Pick up to cfg.n_sites rows, one per histogram window, mode first."""
    if windows.n_bins != hist.n_bins:
        raise ValidationError("window partition does not match histogram bin count")
    if hist.total == 0:
        raise ValidationError("histogram is empty")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    used = np.zeros(windows.window_count, dtype=bool)
    freqs = hist.frequencies
    picks: list[int] = []
    trace: list[tuple[int, int]] = []
    for _ in range(cfg.n_sites):
        best = -1
        best_bin = -1
        best_window = -1
        for k in range(hist.n_bins):
            w = windows.window_of(k)
            if used[w]:
                continue
            if freqs[k] >= best:
                best = int(freqs[k])
                best_bin = k
                best_window = w
        if best <= 0:
            break
        used[best_window] = True
        members = hist.members[best_bin]
        if cfg.median:
            pick = int(members[len(members) // 2])
        else:
            pick = int(members[rng.integers(len(members))])
        picks.append(pick)
        trace.append((best_bin, best_window))

    return SelectionResult(
        indices=np.array(picks, dtype=np.intp),
        trace=tuple(trace),
        truncated=len(picks) < cfg.n_sites,
    )


@dataclass(frozen=True)
class BaselineResult:
    """R values of repeated uniform random site draws."""

    trials: int
    n_sites: int
    seed: int
    r_values: np.ndarray

    @property
    def mean_r(self) -> float:
        return float(self.r_values.mean())

    def to_payload(self) -> dict:
        return {
            "trials": self.trials,
            "n_sites": self.n_sites,
            "seed": self.seed,
            "r_values": self.r_values.tolist(),
            "mean_r": self.mean_r,
        }


def random_baseline(
    n_rows: int,
    n_sites: int,
    trials: int,
    seed: int,
    scorer: Callable[[np.ndarray], float],
) -> BaselineResult:
    """Score ``trials`` seeded draws of n_sites distinct rows.

    Each trial owns an independent spawned substream, so results do not
    depend on evaluation order and a parallel driver would reproduce them.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    if not 1 <= n_sites <= n_rows:
        raise ValidationError(f"n_sites must be in [1, {n_rows}], got {n_sites}")
    streams = np.random.SeedSequence(seed).spawn(trials)
    r_values = np.empty(trials)
    for t in range(trials):
        rng = np.random.default_rng(streams[t])
        indices = rng.choice(n_rows, size=n_sites, replace=False)
        r_values[t] = scorer(indices)
    r_values.setflags(write=False)
    return BaselineResult(trials=trials, n_sites=n_sites, seed=seed, r_values=r_values)


def percentile_of(baseline: BaselineResult, r: float) -> float:
    """Placement of r in the baseline distribution: 100 * #{trials < r} / trials."""
    return float(100.0 * np.count_nonzero(baseline.r_values < r) / baseline.trials)

"""Independent oracles shared by the module and acceptance tests.

Everything here deliberately re-derives results through a different route
than the package under test: eigenvalues via Sylvester-inertia bisection,
greedy choice traces via a literal scan re-implementation, distances via
the dense pairwise matrix.
"""

from __future__ import annotations

import numpy as np


# -- symmetric eigenvalue oracle: inertia counting + bisection -------------


def _count_eigs_below(matrix: np.ndarray, x: float) -> int:
    """#eigenvalues < x via the inertia of (A - xI) under LDL^T.

    Plain Gaussian elimination without pivoting; a zero pivot signals that
    x must be nudged (handled by the caller).
    """
    m = matrix - x * np.eye(matrix.shape[0])
    n = m.shape[0]
    negatives = 0
    for k in range(n):
        pivot = m[k, k]
        if pivot == 0.0:
            raise ZeroDivisionError("pivot breakdown")
        if pivot < 0.0:
            negatives += 1
        for i in range(k + 1, n):
            m[i, k + 1:] -= (m[i, k] / pivot) * m[k, k + 1:]
    return negatives


def count_eigs_below(matrix: np.ndarray, x: float) -> int:
    shift = 0.0
    scale = max(1.0, float(np.abs(matrix).max()))
    for _ in range(60):
        try:
            return _count_eigs_below(np.array(matrix, dtype=np.float64), x + shift)
        except ZeroDivisionError:
            shift = (shift + 1e-14 * scale) * 2.0
    raise AssertionError("inertia count failed to stabilize")


def eig_oracle(matrix: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending, via bisection."""
    matrix = np.array(matrix, dtype=np.float64)
    n = matrix.shape[0]
    radii = np.abs(matrix).sum(axis=1) - np.abs(np.diag(matrix))
    lo0 = float((np.diag(matrix) - radii).min()) - 1.0
    hi0 = float((np.diag(matrix) + radii).max()) + 1.0
    span = hi0 - lo0
    eigs = []
    for j in range(n):
        lo, hi = lo0, hi0
        while hi - lo > tol * max(1.0, span):
            mid = 0.5 * (lo + hi)
            if count_eigs_below(matrix, mid) >= j + 1:
                hi = mid
            else:
                lo = mid
        eigs.append(0.5 * (lo + hi))
    return np.array(eigs)


# -- greedy selection trace oracle ------------------------------------------


def greedy_trace_oracle(frequencies, window_size: int, n_sites: int):
    """Literal scan of the windowed mode-selection loop.

    Written in the 'advance a window cursor every W buckets' style rather
    than computing each bucket's window directly, so it is an independent
    route to the same decisions. Returns [(bucket, window), ...].
    """
    freqs = list(frequencies)
    m = len(freqs)
    n_windows = m // window_size
    used = [False] * n_windows
    trace = []
    for _ in range(n_sites):
        max_f = -1
        max_bin = -1
        max_window = -1
        cursor = 0
        for k in range(m):
            window = cursor if cursor < n_windows else n_windows - 1
            if freqs[k] >= max_f and not used[window]:
                max_f = freqs[k]
                max_bin = k
                max_window = window
            if (k + 1) % window_size == 0:
                cursor += 1
        if max_f <= 0:
            break
        used[max_window] = True
        trace.append((max_bin, max_window))
    return trace


# -- misc direct routes ------------------------------------------------------


def brute_force_min_distance(scores: np.ndarray, sample_scores: np.ndarray) -> np.ndarray:
    """Dense |scores[i] - samples[j]| matrix, minimized over j."""
    return np.abs(scores[:, None] - np.asarray(sample_scores)[None, :]).min(axis=1)


def make_fake_histogram(frequencies, kind="equal-width"):
    """A Histogram object with the given counts and consistent member lists."""
    from repscape.histogram import Histogram

    frequencies = np.asarray(frequencies, dtype=np.int64)
    bins = len(frequencies)
    members = []
    start = 0
    for f in frequencies:
        members.append(np.arange(start, start + int(f), dtype=np.intp))
        start += int(f)
    edges = np.arange(bins + 1, dtype=np.float64)
    return Histogram(
        edges=edges,
        frequencies=frequencies,
        members=tuple(members),
        kind=kind,
        p_min=0.0,
        p_max=float(bins),
    )

"""Input validation helpers for the estimator-style classes."""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def check_matrix(X, *, min_rows: int = 1, name: str = "X") -> np.ndarray:
    """Coerce to a finite 2-D float64 array with at least ``min_rows`` rows."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got ndim={X.ndim}")
    if X.shape[0] < min_rows:
        raise ValidationError(f"{name} needs at least {min_rows} rows, got {X.shape[0]}")
    if X.shape[1] < 1:
        raise ValidationError(f"{name} needs at least one column")
    if not np.all(np.isfinite(X)):
        raise ValidationError(f"{name} contains non-finite values")
    return X


def check_vector(x, *, name: str = "x") -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValidationError(f"{name} must be 1-dimensional, got ndim={x.ndim}")
    if not np.all(np.isfinite(x)):
        raise ValidationError(f"{name} contains non-finite values")
    return x

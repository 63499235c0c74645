"""Leading-axis projection backed by a cyclic Jacobi eigensolver.

The projector fits the sample covariance (1/(n-1) scaling) of its input
matrix, diagonalizes it with cyclic Jacobi rotations, and projects rows
onto the first eigenvector. A Jacobi-class solver is a good fit here: the
variable count is small (a handful to a few dozen columns), eigenvalues
come out fully ordered, and convergence is quadratic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_matrix, check_vector
from .errors import ConvergenceError, DegenerateProjectionError, ValidationError

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def jacobi_eigh(matrix, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps annihilate each off-diagonal entry in turn until the largest
    off-diagonal magnitude drops to ``tol``. Returns ``(w, V)`` with
    eigenvalues ``w`` sorted descending and eigenvectors as the columns of
    the orthonormal ``V`` (same order). Raises ConvergenceError (carrying
    the residual) if the target is not met within ``max_sweeps``.
    """
    a = np.array(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-9 * max(1.0, np.abs(a).max())):
        raise ValidationError("matrix must be symmetric")
    a = (a + a.T) / 2.0
    v = np.eye(n)

    if n == 1:
        return a.diagonal().copy(), v

    def max_off_diagonal() -> float:
        off = np.abs(a - np.diag(a.diagonal()))
        return float(off.max())

    residual = max_off_diagonal()
    for _ in range(max_sweeps):
        if residual <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
        residual = max_off_diagonal()
    if residual > tol:
        raise ConvergenceError(
            f"Jacobi sweep limit {max_sweeps} reached with off-diagonal residual {residual:.3e}",
            residual=residual,
        )

    w = a.diagonal().copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


@dataclass(frozen=True)
class Projection:
    """First-axis scores for every region, with the score extrema."""

    values: np.ndarray
    p_min: float
    p_max: float

    @classmethod
    def from_scores(cls, scores) -> "Projection":
        scores = check_vector(scores, name="scores")
        if scores.size == 0:
            raise ValidationError("projection needs at least one score")
        scores.setflags(write=False)
        return cls(scores, float(scores.min()), float(scores.max()))

    @property
    def span(self) -> float:
        return self.p_max - self.p_min

    def require_span(self) -> float:
        if not self.span > 0.0:
            raise DegenerateProjectionError(
                "all axis scores are identical; distances cannot be normalized"
            )
        return self.span


class PrincipalAxisProjector(BaseEstimator, TransformerMixin):
    """Projects rows onto the leading variance axis of their covariance.

    sklearn-compatible (fit/transform/get_params). ``transform`` returns a
    single-column score matrix; :meth:`scores` gives the flat vector the
    rest of the pipeline consumes. The leading eigenvector's sign is fixed
    so its largest-magnitude entry is positive, which makes fits
    reproducible.
    """

    def __init__(self, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
        self.tol = tol
        self.max_sweeps = max_sweeps

    def fit(self, X, y=None, feature_names=None):
        X = check_matrix(X, min_rows=2, name="X")
        if feature_names is not None:
            feature_names = tuple(feature_names)
            if len(feature_names) != X.shape[1]:
                raise ValidationError("feature_names length must match column count")
        self.feature_names_ = feature_names
        self.n_features_in_ = X.shape[1]
        self.means_ = X.mean(axis=0)
        centered = X - self.means_
        cov = centered.T @ centered / (X.shape[0] - 1)
        w, v = jacobi_eigh(cov, tol=self.tol, max_sweeps=self.max_sweeps)
        for j in range(v.shape[1]):
            k = int(np.argmax(np.abs(v[:, j])))
            if v[k, j] < 0.0:
                v[:, j] = -v[:, j]
        w.setflags(write=False)
        v.setflags(write=False)
        self.eigenvalues_ = w
        self.eigenvectors_ = v
        return self

    @property
    def pc1_(self) -> np.ndarray:
        return self.eigenvectors_[:, 0]

    def _check_fitted(self):
        if not hasattr(self, "eigenvalues_"):
            raise ValidationError("projector is not fitted")

    def _check_input(self, X, feature_names=None) -> np.ndarray:
        self._check_fitted()
        X = check_matrix(X, min_rows=1, name="X")
        if X.shape[1] != self.n_features_in_:
            raise ValidationError(
                f"expected {self.n_features_in_} columns, got {X.shape[1]}"
            )
        if (
            feature_names is not None
            and self.feature_names_ is not None
            and tuple(feature_names) != self.feature_names_
        ):
            raise ValidationError(
                f"variables {tuple(feature_names)} do not match fit variables {self.feature_names_}"
            )
        return X

    def scores(self, X, feature_names=None) -> np.ndarray:
        """First-axis score of each row: pc1 . (row - column means)."""
        X = self._check_input(X, feature_names)
        return (X - self.means_) @ self.pc1_

    def transform(self, X) -> np.ndarray:
        return self.scores(X)[:, np.newaxis]

    def project(self, X, feature_names=None) -> Projection:
        return Projection.from_scores(self.scores(X, feature_names))

    def explained_variance_ratio(self) -> np.ndarray:
        """Eigenvalue fractions in [0, 1], summing to 1."""
        self._check_fitted()
        w = np.maximum(self.eigenvalues_, 0.0)
        total = w.sum()
        if total <= 0.0:
            raise ValidationError("all eigenvalues are zero: data is constant")
        return w / total

    # -- persistence -----------------------------------------------------

    def to_payload(self) -> dict:
        """JSON-ready model document (means, eigenpairs, variable names)."""
        self._check_fitted()
        return {
            "variables": list(self.feature_names_) if self.feature_names_ else None,
            "means": self.means_.tolist(),
            "eigenvalues": self.eigenvalues_.tolist(),
            "eigenvectors": self.eigenvectors_.tolist(),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "PrincipalAxisProjector":
        try:
            means = np.array(payload["means"], dtype=np.float64)
            w = np.array(payload["eigenvalues"], dtype=np.float64)
            v = np.array(payload["eigenvectors"], dtype=np.float64)
            variables = payload.get("variables")
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad model document: {exc}") from exc
        n = means.shape[0]
        if w.shape != (n,) or v.shape != (n, n):
            raise ValidationError("model document has inconsistent shapes")
        model = cls()
        model.feature_names_ = tuple(variables) if variables else None
        model.n_features_in_ = n
        means.setflags(write=False)
        w.setflags(write=False)
        v.setflags(write=False)
        model.means_ = means
        model.eigenvalues_ = w
        model.eigenvectors_ = v
        return model

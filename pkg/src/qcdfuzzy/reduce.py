"""Principal component scores of stacked feature vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, DegenerateDataError, TooFewSeriesError

DEFAULT_RETAINED_FRACTION = 0.12

_RANK_RTOL = 1e-12


@dataclass(frozen=True)
class ScoreMatrix:
    """PCA scores of ``n`` observations on the ``k`` leading components.

    ``explained`` holds the variance carried by each retained component,
    ``p`` the numerical rank of the centred data (number of available
    components) and ``loadings`` the ``k x q`` principal directions.
    """

    scores: np.ndarray
    explained: np.ndarray
    retained_fraction: float
    p: int
    loadings: np.ndarray
    total_variance: float

    @property
    def k(self) -> int:
        return self.scores.shape[1]


def n_retained(p: int, retained_fraction: float) -> int:
    return max(1, int(np.floor(retained_fraction * p)))


def pca_scores(features, retained_fraction=DEFAULT_RETAINED_FRACTION) -> ScoreMatrix:
    """Project centred rows of ``features`` onto their leading principal directions.

    ``p`` is the number of singular values above ``1e-12`` times the largest
    and ``max(1, floor(retained_fraction * p))`` components are kept. Each
    component's sign is fixed so that its largest-magnitude loading is
    positive.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2:
        raise ConfigurationError(f"features must be a 2-D matrix, got shape {X.shape}")
    n, q = X.shape
    if n < 2:
        raise TooFewSeriesError(f"PCA needs at least two series, got {n}")
    if q < 1:
        raise ConfigurationError("features have no columns")
    if not (0.0 < retained_fraction <= 1.0):
        raise ConfigurationError(f"retained_fraction must lie in (0, 1], got {retained_fraction}")

    Xc = X - X.mean(axis=0)
    _, sv, Vt = np.linalg.svd(Xc, full_matrices=False)
    # identical rows can leave rounding-level singular values after centring
    if sv.size == 0 or np.all(X == X[0]) or sv[0] <= _RANK_RTOL * np.linalg.norm(X):
        raise DegenerateDataError("all feature vectors are identical; no principal component exists")
    p = int(np.sum(sv > sv[0] * _RANK_RTOL))
    k = n_retained(p, retained_fraction)

    Vt = Vt[:k].copy()
    pivot = np.argmax(np.abs(Vt), axis=1)
    signs = np.sign(Vt[np.arange(k), pivot])
    Vt *= signs[:, None]
    scores = Xc @ Vt.T
    explained = sv[:k] ** 2 / (n - 1)
    total = float(np.sum(Xc * Xc) / (n - 1))
    return ScoreMatrix(scores, explained, float(retained_fraction), p, Vt, total)

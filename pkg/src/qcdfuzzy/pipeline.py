"""End-to-end clustering of a panel: QCD features, PCA scores, fuzzy fit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError
from .fuzzycluster import FuzzyPartition, fcm_means_fit, fcm_medoids_fit
from .qspec import DEFAULT_TAUS, qcd_features
from .reduce import DEFAULT_RETAINED_FRACTION, ScoreMatrix, pca_scores


@dataclass
class ClusteringResult:
    features: np.ndarray
    scores: ScoreMatrix
    partition: FuzzyPartition


class QcdFuzzyClustering:
    """Fuzzy clustering of multivariate series by quantile cross-spectral features.

    Parameters
    ----------
    n_clusters : int
    m : float
        Fuzziness parameter.
    variant : {"means", "medoids"}
    taus : sequence of float
        Quantile levels of the features.
    bandwidth : float or None
        Smoothing bandwidth in radians; ``None`` picks ``1.5 * T**(-1/4)``.
    retained_fraction : float
        Share of principal components kept (at least one).
    restarts, max_iter, tol, seed, exponent_mode
        Passed to the fitting routine.

    Attributes
    ----------
    result_ : ClusteringResult
    membership_ : ndarray, shape (n, C)
    """

    def __init__(
        self,
        n_clusters=3,
        m=1.5,
        variant="means",
        taus=DEFAULT_TAUS,
        bandwidth=None,
        retained_fraction=DEFAULT_RETAINED_FRACTION,
        restarts=10,
        max_iter=1000,
        tol=1e-6,
        seed=None,
        exponent_mode="standard",
        truncate=False,
    ):
        self.n_clusters = n_clusters
        self.m = m
        self.variant = variant
        self.taus = taus
        self.bandwidth = bandwidth
        self.retained_fraction = retained_fraction
        self.restarts = restarts
        self.max_iter = max_iter
        self.tol = tol
        self.seed = seed
        self.exponent_mode = exponent_mode
        self.truncate = truncate

    def transform(self, panel) -> ScoreMatrix:
        feats = qcd_features(panel, self.taus, self.bandwidth, truncate=self.truncate)
        self._features = feats
        return pca_scores(feats, self.retained_fraction)

    def fit(self, panel):
        scores = self.transform(panel)
        if self.variant == "means":
            part = fcm_means_fit(
                scores, self.n_clusters, self.m, self.max_iter, self.tol, self.restarts, self.seed, self.exponent_mode
            )
        elif self.variant == "medoids":
            part = fcm_medoids_fit(
                scores, self.n_clusters, self.m, self.max_iter, self.restarts, self.seed, self.exponent_mode
            )
        else:
            raise ConfigurationError(f"variant must be 'means' or 'medoids', got {self.variant!r}")
        self.result_ = ClusteringResult(self._features, scores, part)
        self.membership_ = part.U
        return self

    def fit_predict(self, panel) -> np.ndarray:
        return self.fit(panel).membership_

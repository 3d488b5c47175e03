"""Fuzzy clustering of multivariate time series by quantile cross-spectral density."""

from .evaluation import aufc, crisp_membership, fari, mds_2d, switch_success
from .exceptions import QcdError
from .fuzzycluster import (
    FuzzyPartition,
    fcm_means_fit,
    fcm_medoids_fit,
    select_hyperparameters,
    validity_indices,
)
from .panel import MtsPanel
from .pipeline import QcdFuzzyClustering
from .qspec import qcd_distance, qcd_distance_matrix, qcd_feature_vector, qcd_features
from .reduce import pca_scores
from .simgen import scenario_panel

__version__ = "0.1.0"

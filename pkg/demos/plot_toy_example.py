"""
Fuzzy clustering of three small VAR groups
==========================================

Fifteen bivariate series come from three processes: a VAR(1) with all
coefficients 0.2, the same VAR with the signs flipped, and white noise.
We turn each series into its quantile cross-spectral feature vector,
project the stacked vectors onto their leading principal component and
run fuzzy C-means on the scores.
"""

import numpy as np

from qcdfuzzy import fari, fcm_means_fit, pca_scores, qcd_features, scenario_panel

# one simulated panel; labels 0, 1, 2 mark the generating process
panel = scenario_panel(0, T=500, seed=3)
print(len(panel), "series of shape", panel.series[0].shape)

# features: smoothed rank periodograms at quantile levels 0.1, 0.5, 0.9
F = qcd_features(panel)
print("feature matrix", F.shape)

# the default keeps floor(0.12 p) components, at least one
S = pca_scores(F)
print("rank p =", S.p, " retained k =", S.k)

part = fcm_means_fit(S, C=3, m=1.5, seed=0)
np.set_printoptions(precision=3, suppress=True)
print(part.U)
print("FARI against the generating processes:", round(fari(part.U, panel.true_labels), 3))

# larger m spreads membership more evenly
for m in (1.5, 1.8, 2.0, 2.2):
    U = fcm_means_fit(S, 3, m, seed=0).U
    print(f"m={m}: mean max membership {U.max(axis=1).mean():.3f}, FARI {fari(U, panel.true_labels):.3f}")

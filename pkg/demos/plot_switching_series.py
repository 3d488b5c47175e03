"""
A series that belongs to two clusters
=====================================

Ten series form two groups of nonlinear moving averages with opposite
signs. An eleventh series is white noise, which sits halfway between them
in the feature space. A good fuzzy partition keeps the ten group members
above a membership of 0.7 while the white noise stays at or below 0.7 in
both clusters.
"""

import numpy as np

from qcdfuzzy import aufc, fcm_means_fit, pca_scores, qcd_features, scenario_panel, switch_success

m_grid = np.round(np.arange(1.1, 3.01, 0.1), 1)
reps = 10
rates = np.zeros(m_grid.size)

for rep in range(reps):
    panel = scenario_panel(5, T=600, seed=11, replication=rep)
    S = pca_scores(qcd_features(panel))
    for i, m in enumerate(m_grid):
        U = fcm_means_fit(S, 2, m, seed=11, stream_key=(rep, i)).U
        rates[i] += switch_success(U, panel.true_labels, panel.switch_index) / reps

for m, r in zip(m_grid, rates):
    print(f"m={m:.1f}  success {r:.1f}  " + "#" * int(round(20 * r)))
print("area under the fuzziness curve:", round(aufc(m_grid, rates), 3))

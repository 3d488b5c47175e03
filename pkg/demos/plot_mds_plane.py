"""
A two-dimensional picture of QCD distances
==========================================

Metric scaling places the series of a switching design in the plane so
that Euclidean distances approximate their QCD distances. The stress and
the squared correlation between the two sets of distances say how
faithful the picture is.
"""

import numpy as np

from qcdfuzzy import mds_2d, qcd_distance_matrix, scenario_panel

for T in (500, 2000):
    panel = scenario_panel(4, T=T, seed=2)
    emb = mds_2d(qcd_distance_matrix(panel))
    print(f"T={T}: stress {emb.stress:.3f}, R^2 {emb.r_squared:.3f}")
    for sid, lab, (x, y) in zip(panel.ids, panel.true_labels, emb.coords):
        tag = "switching" if lab == 2 else f"group {lab}"
        print(f"   {sid}  {tag:9s}  ({x:+.3f}, {y:+.3f})")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    colours = np.array(["tab:blue", "tab:red", "black"])[panel.true_labels]
    plt.scatter(*emb.coords.T, c=colours)
    plt.title("Scenario 4, T=2000")
    plt.savefig("mds_plane.png", dpi=120)

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qcdfuzzy.evaluation import fari
from qcdfuzzy.exceptions import ConfigurationError, DegeneratePartitionError, EmptyClusterError, InfeasibleError
from qcdfuzzy.fuzzycluster import (
    default_grids,
    fcm_means_fit,
    fcm_medoids_fit,
    objective,
    select_hyperparameters,
    squared_distances,
    update_centroids,
    update_memberships,
    validity_indices,
)
from qcdfuzzy.qspec import qcd_features
from qcdfuzzy.reduce import pca_scores
from qcdfuzzy.simgen import scenario_panel

from oracles import validity_loops

data = arrays(float, st.tuples(st.integers(4, 15), st.integers(1, 3)), elements=st.floats(-50, 50))
ms = st.floats(1.05, 4.0)


def blobs(seed=0, sizes=(6, 6, 6), spread=0.2):
    rng = np.random.default_rng(seed)
    centres = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    X = np.vstack([c + spread * rng.standard_normal((s, 2)) for c, s in zip(centres, sizes)])
    return X, np.repeat(np.arange(len(sizes)), sizes)


class TestMemberships:
    def test_equidistant(self):
        assert np.allclose(update_memberships([[2.0, 2.0, 2.0]], 2.0), 1 / 3)

    def test_zero_distance(self):
        assert np.array_equal(update_memberships([[3.0, 0.0]], 1.7), [[0.0, 1.0]])

    def test_zero_distance_split(self):
        assert np.array_equal(update_memberships([[0.0, 5.0, 0.0]], 2.0), [[0.5, 0.0, 0.5]])

    def test_hand_value(self):
        assert np.allclose(update_memberships([[1.0, 4.0]], 2.0), [[0.8, 0.2]], atol=1e-15)

    def test_paper_means_exponent(self):
        # exponent 2/(m-1) = 2 at m = 2: weights 1 and 1/16
        assert np.allclose(update_memberships([[1.0, 4.0]], 2.0, "paper_means"), [[16 / 17, 1 / 17]])

    @given(arrays(float, st.tuples(st.integers(1, 10), st.integers(1, 5)), elements=st.floats(0, 1e6)), st.floats(1.01, 10))
    def test_rows_stochastic(self, D2, m):
        U = update_memberships(D2, m)
        assert np.all(U >= 0) and np.all(U <= 1)
        assert np.allclose(U.sum(axis=1), 1.0, atol=1e-9)

    @pytest.mark.parametrize("m", [1.0, 0.5, -2.0])
    def test_bad_m(self, m):
        with pytest.raises(ConfigurationError):
            update_memberships([[1.0, 2.0]], m)


class TestCentroids:
    def test_crisp_means(self):
        X = np.array([[0.0], [2.0], [10.0], [14.0]])
        U = np.array([[1, 0], [1, 0], [0, 1], [0, 1]], float)
        assert np.allclose(update_centroids(X, U, 3.0), [[1.0], [12.0]])

    def test_symmetric_pair(self):
        assert np.allclose(update_centroids([[0.0], [1.0]], [[0.5], [0.5]], 2.0), [[0.5]])

    def test_loop_oracle(self):
        rng = np.random.default_rng(0)
        X, U = rng.standard_normal((5, 3)), rng.dirichlet(np.ones(2), 5)
        V = update_centroids(X, U, 2.3)
        for c in range(2):
            w = [U[i, c] ** 2.3 for i in range(5)]
            ref = [sum(w[i] * X[i, k] for i in range(5)) / sum(w) for k in range(3)]
            assert np.allclose(V[c], ref, rtol=0, atol=1e-12)

    def test_empty_cluster(self):
        with pytest.raises(EmptyClusterError):
            update_centroids(np.ones((3, 1)), np.array([[1.0, 0.0]] * 3), 2.0)

    @given(data, ms, st.integers(0, 10_000))
    def test_bounds_inherited(self, X, m, s):
        U = np.random.default_rng(s).dirichlet(np.ones(3), X.shape[0])
        V = update_centroids(X, U, m)
        lo, hi = X.min(axis=0), X.max(axis=0)
        slack = 1e-9 * (1 + np.abs(X).max())
        assert np.all(V >= lo - slack) and np.all(V <= hi + slack)


class TestMeansFit:
    def test_single_cluster(self):
        X = np.random.default_rng(0).standard_normal((7, 2))
        p = fcm_means_fit(X, 1, 2.0, seed=0)
        assert np.all(p.U == 1.0)
        assert np.allclose(p.prototypes[0], X.mean(axis=0))

    def test_well_separated_scalars(self):
        X = np.array([-10.0, -9.0, 9.0, 10.0])
        p = fcm_means_fit(X, 2, 2.0, seed=1)
        lab = p.crisp_labels()
        assert lab[0] == lab[1] != lab[2] == lab[3]
        assert np.all(p.U.max(axis=1) > 0.95)

    def test_near_crisp_limit(self):
        X, _ = blobs()
        p = fcm_means_fit(X, 3, 1.01, seed=2)
        assert np.all(p.U.max(axis=1) >= 0.99)

    def test_objective_recomputation(self):
        X, _ = blobs(1)
        p = fcm_means_fit(X, 3, 1.8, seed=3)
        assert abs(p.objective - objective(X, p.U, p.prototypes, 1.8)) <= 1e-9

    @given(data, ms, st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_monotone_and_stochastic(self, X, m, C, seed):
        C = min(C, X.shape[0])
        p = fcm_means_fit(X, C, m, restarts=1, seed=seed, max_iter=200)
        h = np.array(p.history)
        assert np.all(np.diff(h) <= 1e-9 * (1 + np.abs(h[:-1])))
        assert np.allclose(p.U.sum(axis=1), 1.0, atol=1e-9)

    def test_permutation_equivariance(self):
        X, _ = blobs(4)
        rng = np.random.default_rng(5)
        U0 = rng.dirichlet(np.ones(3), X.shape[0])
        perm = rng.permutation(X.shape[0])
        a = fcm_means_fit(X, 3, 2.0, init=U0)
        b = fcm_means_fit(X[perm], 3, 2.0, init=U0[perm])
        assert np.allclose(a.U[perm], b.U, atol=1e-10)

    def test_seeded_reproducible(self):
        X, _ = blobs(6)
        a, b = fcm_means_fit(X, 3, 2.0, seed=11), fcm_means_fit(X, 3, 2.0, seed=11)
        assert np.array_equal(a.U, b.U)

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            fcm_means_fit(np.zeros((3, 1)), 4, 2.0)

    def test_c_equals_n_is_legal(self):
        X = np.array([[0.0], [1.0], [5.0]])
        p = fcm_means_fit(X, 3, 2.0, seed=0)
        assert np.allclose(np.sort(p.prototypes[:, 0]), X[:, 0], atol=1e-3)

    def test_bad_tol(self):
        with pytest.raises(ConfigurationError):
            fcm_means_fit(np.arange(4.0), 2, 2.0, tol=0.0)


class TestMedoidsFit:
    def test_c_equals_n(self):
        X = np.array([[0.0], [3.0], [7.0], [20.0]])
        p = fcm_medoids_fit(X, 4, 2.0, seed=0)
        assert sorted(p.medoids.tolist()) == [0, 1, 2, 3]
        assert np.allclose(p.U[np.arange(4), np.argsort(p.medoids)], 1.0)

    def test_collinear_scalars(self):
        X = np.array([0.0, 1.0, 10.0])
        p = fcm_medoids_fit(X, 2, 2.0, seed=0)
        med = set(p.medoids.tolist())
        assert 2 in med and med & {0, 1}
        # each medoid is the argmin of its cluster's weighted spread, checked exhaustively
        for c, j in enumerate(p.medoids):
            costs = [sum(p.U[i, c] ** 2 * (X[i] - X[cand]) ** 2 for i in range(3)) for cand in range(3)]
            others = [mm for cc, mm in enumerate(p.medoids) if cc < c]
            best = min((v, k) for k, v in enumerate(costs) if k not in others)[1]
            assert j == best

    def test_distinct_and_in_range(self):
        X, _ = blobs(7)
        for seed in range(5):
            p = fcm_medoids_fit(X, 3, 1.6, seed=seed)
            assert len(set(p.medoids.tolist())) == 3
            assert p.medoids.min() >= 0 and p.medoids.max() < X.shape[0]
            assert np.array_equal(p.prototypes, X[p.medoids])
            assert np.allclose(p.U.sum(axis=1), 1.0, atol=1e-9)

    def test_objective_recomputation(self):
        X, _ = blobs(8)
        p = fcm_medoids_fit(X, 3, 1.5, seed=0)
        assert abs(p.objective - objective(X, p.U, p.prototypes, 1.5)) <= 1e-9

    def test_bad_init(self):
        with pytest.raises(ConfigurationError):
            fcm_medoids_fit(np.arange(5.0), 2, 2.0, init=[1, 1])

    def test_toy_medoids_close_to_means(self):
        means, meds = [], []
        for rep in range(8):
            panel = scenario_panel(0, 500, seed=20260, replication=rep)
            S = pca_scores(qcd_features(panel))
            means.append(fari(fcm_means_fit(S, 3, 1.5, seed=rep).U, panel.true_labels))
            meds.append(fari(fcm_medoids_fit(S, 3, 1.5, seed=rep).U, panel.true_labels))
        assert abs(np.mean(means) - np.mean(meds)) <= 0.1


class TestValidity:
    def test_zero_compactness(self):
        X = np.array([[0.0], [0.0], [5.0], [5.0]])
        U = np.array([[1, 0], [1, 0], [0, 1], [0, 1]], float)
        vi = validity_indices(X, U, [[0.0], [5.0]])
        assert vi.xbi == 0.0 and vi.bi == 0.0

    def test_four_point_oracle(self):
        X = np.array([[0.0], [0.1], [1.0], [1.1]])
        p = fcm_means_fit(X, 2, 2.0, seed=0)
        ours = validity_indices(X, p)
        ref = validity_loops(X, p.U, p.prototypes)
        assert np.allclose(ours, ref, rtol=0, atol=1e-9)

    @given(
        arrays(float, st.tuples(st.integers(4, 15), st.integers(1, 3)), elements=st.integers(-200, 200).map(lambda k: k / 4)),
        st.integers(2, 4),
        st.integers(0, 10_000),
    )
    def test_random_oracle_and_ki_identity(self, X, C, s):
        C = min(C, X.shape[0])
        rng = np.random.default_rng(s)
        U = rng.dirichlet(np.ones(C), X.shape[0])
        V = X[rng.choice(X.shape[0], C, replace=False)]
        sep = squared_distances(V, V)[~np.eye(C, dtype=bool)].min()
        if sep == 0:
            with pytest.raises(DegeneratePartitionError):
                validity_indices(X, U, V)
            return
        vi = validity_indices(X, U, V)
        n = X.shape[0]
        penalty = np.sum((V - X.mean(axis=0)) ** 2) / C
        assert abs(vi.ki - (n * vi.xbi + penalty / sep)) <= 1e-9 * max(1.0, abs(vi.ki))
        ref = validity_loops(X, U, V)
        assert np.allclose(vi, ref, rtol=1e-9, atol=1e-12)

    def test_needs_two_clusters(self):
        with pytest.raises(ConfigurationError):
            validity_indices(np.zeros((3, 1)), np.ones((3, 1)), [[0.0]])

    def test_coincident_prototypes(self):
        with pytest.raises(DegeneratePartitionError):
            validity_indices(np.arange(4.0), np.full((4, 2), 0.5), [[1.0], [1.0]])


class TestSelection:
    def test_single_cell(self):
        X, _ = blobs()
        assert select_hyperparameters(X, [3], [2.0], restarts=2, seed=0).best_pair == (3, 2.0)

    def test_three_blobs_pick_three(self):
        X, _ = blobs(9, spread=0.5)
        rep = select_hyperparameters(X, [2, 3], [1.9], restarts=5, seed=0)
        assert rep.best_pair == (3, 1.9)
        c2, c3 = rep.cell(2, 1.9), rep.cell(3, 1.9)
        assert c3["xbi"] < c2["xbi"]

    def test_zscores_averaged(self):
        X, _ = blobs(10, spread=0.8)
        rep = select_hyperparameters(X, [1, 2, 3, 4], [1.5, 2.0], restarts=3, seed=1)
        cells = [c for c in rep.cells if c["C"] >= 2]
        table = np.array([[c[k] for k in ("xbi", "ki", "ti", "bi")] for c in cells])
        z = (table - table.mean(axis=0)) / table.std(axis=0, ddof=1)
        assert np.allclose([c["zavg"] for c in cells], z.mean(axis=1), atol=1e-12)
        assert all(np.isnan(c["zavg"]) for c in rep.cells if c["C"] == 1)
        best = min(cells, key=lambda c: (c["zavg"], c["C"], c["m"]))
        assert rep.best_pair == (best["C"], best["m"])

    def test_parallel_schedule_independent(self):
        X, _ = blobs(11, spread=0.8)
        a = select_hyperparameters(X, [2, 3], [1.5, 2.0], restarts=3, seed=4)
        b = select_hyperparameters(X, [2, 3], [1.5, 2.0], restarts=3, seed=4, n_jobs=4)
        assert a.cells == b.cells or all(
            np.allclose([x[k] for k in x], [y[k] for k in y], equal_nan=True) for x, y in zip(a.cells, b.cells)
        )
        assert a.best_pair == b.best_pair

    def test_default_grids(self):
        C, m = default_grids()
        assert C == list(range(1, 11))
        assert len(m) == 20 and m[0] == 1.1 and m[-1] == 3.0
        # ten cluster counts by twenty fuzziness values
        assert len(list(itertools.product(C, m))) == 200

    def test_medoid_variant_runs(self):
        X, _ = blobs(12)
        rep = select_hyperparameters(X, [2, 3], [1.5], restarts=2, seed=0, variant="medoids")
        assert rep.best_pair[0] in (2, 3)

    def test_empty_grid(self):
        with pytest.raises(ConfigurationError):
            select_hyperparameters(np.arange(5.0), [], [2.0])

"""Fuzzy C-means and fuzzy C-medoids, validity indices and (C, m) selection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import (
    ConfigurationError,
    DegeneratePartitionError,
    EmptyClusterError,
    InfeasibleError,
    NumericalError,
)

__all__ = [
    "FuzzyPartition",
    "ValidityIndices",
    "ValidityReport",
    "squared_distances",
    "update_memberships",
    "update_centroids",
    "objective",
    "fcm_means_fit",
    "fcm_medoids_fit",
    "validity_indices",
    "select_hyperparameters",
    "default_grids",
]

EXPONENT_MODES = ("standard", "paper_means")


@dataclass
class FuzzyPartition:
    """Result of a fuzzy clustering run.

    ``prototypes`` always holds the ``C x k`` prototype coordinates; for the
    medoids variant ``medoids`` additionally gives their row indices in the
    data. ``history`` records the objective after every iteration of the
    retained restart.
    """

    U: np.ndarray
    prototypes: np.ndarray
    objective: float
    iterations: int
    converged: bool
    m: float
    variant: str
    medoids: np.ndarray | None = None
    history: list = field(default_factory=list)

    @property
    def n_clusters(self) -> int:
        return self.U.shape[1]

    def crisp_labels(self) -> np.ndarray:
        return np.argmax(self.U, axis=1)


class ValidityIndices(NamedTuple):
    xbi: float
    ki: float
    ti: float
    bi: float


@dataclass
class ValidityReport:
    """Per-cell indices of a (C, m) grid search and the selected cell.

    ``cells`` is a list of dicts with keys ``C, m, xbi, ki, ti, bi, zavg``.
    Cells where the indices are undefined (``C = 1``) carry NaN.
    """

    cells: list
    best_pair: tuple
    partitions: dict = field(default_factory=dict)

    def cell(self, C, m) -> dict:
        for c in self.cells:
            if c["C"] == C and np.isclose(c["m"], m):
                return c
        raise KeyError((C, m))


def _as_data(X) -> np.ndarray:
    X = getattr(X, "scores", X)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ConfigurationError(f"data must be an n x k matrix, got shape {X.shape}")
    return X


def _check_m(m):
    if not m > 1.0:
        raise ConfigurationError(f"fuzziness parameter m must exceed 1, got {m}")


def _check_C(C, n):
    if C < 1:
        raise ConfigurationError(f"number of clusters must be at least 1, got {C}")
    if C > n:
        raise InfeasibleError(f"cannot form {C} clusters from {n} series")


def squared_distances(X, P) -> np.ndarray:
    """``n x C`` matrix of squared Euclidean distances between rows of ``X`` and ``P``."""
    diff = X[:, None, :] - P[None, :, :]
    return np.einsum("ick,ick->ic", diff, diff)


def update_memberships(D2, m, exponent_mode="standard") -> np.ndarray:
    """Membership degrees for fixed prototypes.

    ``u_ic = 1 / sum_c' (D_ic / D_ic')**e`` where ``D`` holds squared
    distances and ``e = 1/(m-1)`` (``standard``) or ``e = 2/(m-1)``
    (``paper_means``). A row with zero distance to one or more prototypes
    splits its membership evenly over those prototypes.
    """
    _check_m(m)
    if exponent_mode not in EXPONENT_MODES:
        raise ConfigurationError(f"exponent_mode must be one of {EXPONENT_MODES}, got {exponent_mode!r}")
    D2 = np.asarray(D2, dtype=float)
    if D2.ndim != 2:
        raise ConfigurationError("distance matrix must be 2-D")
    if np.any(D2 < 0) or np.any(~np.isfinite(D2)):
        raise ConfigurationError("squared distances must be finite and nonnegative")
    e = (1.0 if exponent_mode == "standard" else 2.0) / (m - 1.0)

    U = np.empty_like(D2)
    zero = D2 == 0.0
    hit = zero.any(axis=1)
    if np.any(hit):
        Z = zero[hit].astype(float)
        U[hit] = Z / Z.sum(axis=1, keepdims=True)
    rest = ~hit
    if np.any(rest):
        # u_ic is proportional to D_ic**(-e); normalise in log space so that
        # large exponents (m close to 1) neither overflow nor underflow
        logw = -e * np.log(D2[rest])
        logw -= logw.max(axis=1, keepdims=True)
        w = np.exp(logw)
        U[rest] = w / w.sum(axis=1, keepdims=True)
    return U


def update_centroids(X, U, m) -> np.ndarray:
    """Weighted means ``sum_i u_ic^m x_i / sum_i u_ic^m`` for every cluster."""
    X = _as_data(X)
    W = np.asarray(U, dtype=float) ** m
    mass = W.sum(axis=0)
    if np.any(mass <= 0.0):
        raise EmptyClusterError(f"clusters {np.flatnonzero(mass <= 0.0).tolist()} have zero membership mass")
    return (W.T @ X) / mass[:, None]


def objective(X, U, prototypes, m) -> float:
    X = _as_data(X)
    return float(np.sum(np.asarray(U) ** m * squared_distances(X, np.asarray(prototypes, dtype=float))))


def _rng(seed, key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def _reseed_centroids(X, U, m):
    """Centroids for non-empty clusters; empty ones move to the worst-fitted point."""
    W = U ** m
    mass = W.sum(axis=0)
    ok = mass > 0.0
    V = np.empty((U.shape[1], X.shape[1]))
    V[ok] = (W[:, ok].T @ X) / mass[ok, None]
    for c in np.flatnonzero(~ok):
        placed = np.flatnonzero(ok)
        if placed.size:
            fit = squared_distances(X, V[placed]).min(axis=1)
        else:
            fit = np.sum((X - X.mean(axis=0)) ** 2, axis=1)
        i = int(np.argmax(fit))
        V[c] = X[i]
        ok[c] = True
    return V


def _means_single(X, C, m, max_iter, tol, rng, exponent_mode, init):
    n = X.shape[0]
    if init is None:
        U = rng.dirichlet(np.ones(C), size=n)
    else:
        U = np.array(init, dtype=float)
        if U.shape != (n, C):
            raise ConfigurationError(f"initial membership matrix must have shape {(n, C)}")
    history = []
    converged = False
    V = None
    it = 0
    for it in range(1, max_iter + 1):
        U_old = U
        try:
            V = update_centroids(X, U, m)
        except EmptyClusterError:
            V = _reseed_centroids(X, U, m)
        U = update_memberships(squared_distances(X, V), m, exponent_mode)
        history.append(objective(X, U, V, m))
        if np.max(np.abs(U - U_old)) < tol:
            converged = True
            break
    return FuzzyPartition(U, V, history[-1], it, converged, float(m), "means", None, history)


def fcm_means_fit(
    X,
    C,
    m=2.0,
    max_iter=1000,
    tol=1e-6,
    restarts=10,
    seed=None,
    exponent_mode="standard",
    init=None,
    stream_key=(),
) -> FuzzyPartition:
    """Fuzzy C-means by alternating centroid and membership updates.

    Each restart draws the rows of the initial membership matrix uniformly
    from the simplex and iterates until the largest entrywise change of the
    membership matrix falls below ``tol`` or ``max_iter`` is reached. The
    restart with the smallest objective is returned.

    Parameters
    ----------
    X : array_like or ScoreMatrix, shape (n, k)
    C : int
    m : float
        Fuzziness parameter, ``m > 1``.
    restarts : int
        Number of random initialisations; ignored when ``init`` is given.
    seed : int or None
        Restart ``j`` draws from the stream ``SeedSequence(seed, spawn_key=stream_key + (j,))``.
    init : array_like, optional
        Explicit ``n x C`` initial membership matrix.
    """
    X = _as_data(X)
    n = X.shape[0]
    _check_C(C, n)
    _check_m(m)
    if not tol > 0:
        raise ConfigurationError(f"tol must be positive, got {tol}")
    if max_iter < 1 or restarts < 1:
        raise ConfigurationError("max_iter and restarts must be at least 1")
    if init is not None:
        return _means_single(X, C, m, max_iter, tol, None, exponent_mode, init)
    best = None
    for j in range(restarts):
        fit = _means_single(X, C, m, max_iter, tol, _rng(seed, (*stream_key, j)), exponent_mode, None)
        if best is None or fit.objective < best.objective:
            best = fit
    return best


def _pick_medoids(cost):
    # cost[c, j]: weighted spread of cluster c around candidate j
    taken = []
    for c in range(cost.shape[0]):
        for j in np.argsort(cost[c], kind="stable"):
            if j not in taken:
                taken.append(int(j))
                break
    return np.array(taken)


def _medoids_single(X, P, C, m, max_iter, rng, exponent_mode, init):
    n = X.shape[0]
    if init is None:
        med = np.sort(rng.choice(n, size=C, replace=False))
    else:
        med = np.asarray(init, dtype=int)
        if med.shape != (C,) or len(set(med.tolist())) != C or med.min() < 0 or med.max() >= n:
            raise ConfigurationError("initial medoids must be C distinct indices in [0, n)")
    history = []
    converged = False
    it = 0
    U = update_memberships(P[:, med], m, exponent_mode)
    for it in range(1, max_iter + 1):
        U = update_memberships(P[:, med], m, exponent_mode)
        history.append(float(np.sum(U ** m * P[:, med])))
        new = _pick_medoids((U ** m).T @ P)
        if np.array_equal(new, med):
            converged = True
            break
        med = new
    if not converged:
        U = update_memberships(P[:, med], m, exponent_mode)
    obj = float(np.sum(U ** m * P[:, med]))
    return FuzzyPartition(U, X[med].copy(), obj, it, converged, float(m), "medoids", med.copy(), history)


def fcm_medoids_fit(
    X,
    C,
    m=2.0,
    max_iter=1000,
    restarts=10,
    seed=None,
    exponent_mode="standard",
    init=None,
    stream_key=(),
) -> FuzzyPartition:
    """Fuzzy C-medoids.

    Memberships follow the standard update; each medoid then moves to the
    data point ``j`` minimising ``sum_i u_ic^m ||x_i - x_j||^2``. Ties go to
    the lowest index and a candidate already used by an earlier cluster is
    skipped. Iteration stops once the medoids no longer change.
    """
    X = _as_data(X)
    n = X.shape[0]
    _check_C(C, n)
    _check_m(m)
    if max_iter < 1 or restarts < 1:
        raise ConfigurationError("max_iter and restarts must be at least 1")
    P = squared_distances(X, X)
    if init is not None:
        return _medoids_single(X, P, C, m, max_iter, None, exponent_mode, init)
    best = None
    for j in range(restarts):
        fit = _medoids_single(X, P, C, m, max_iter, _rng(seed, (*stream_key, j)), exponent_mode, None)
        if best is None or fit.objective < best.objective:
            best = fit
    return best


def validity_indices(X, partition, prototypes=None) -> ValidityIndices:
    """Xie-Beni, Kwon, Tang and Bensaid indices of a fuzzy partition.

    ``partition`` is a :class:`FuzzyPartition` or a membership matrix, in
    which case ``prototypes`` must be given. Memberships enter squared,
    whatever ``m`` the partition was fitted with. Smaller is better.
    """
    X = _as_data(X)
    if isinstance(partition, FuzzyPartition):
        U, V = partition.U, partition.prototypes
    else:
        U = np.asarray(partition, dtype=float)
        if prototypes is None:
            raise ConfigurationError("prototypes are required with a bare membership matrix")
        V = np.asarray(prototypes, dtype=float)
        if V.ndim == 1:
            V = V[:, None]
    n, C = U.shape
    if C < 2:
        raise ConfigurationError("validity indices need at least two clusters")
    d2 = squared_distances(X, V)
    U2 = U * U
    compact = float(np.sum(U2 * d2))
    sep = squared_distances(V, V)
    off = ~np.eye(C, dtype=bool)
    min_sep = float(sep[off].min())
    if min_sep <= 0.0:
        raise DegeneratePartitionError("two prototypes coincide; separation is zero")
    grand = X.mean(axis=0)
    xbi = compact / (n * min_sep)
    ki = (compact + np.sum((V - grand) ** 2) / C) / min_sep
    ti = (compact + sep[off].sum() / (C * (C - 1))) / (min_sep + 1.0 / C)
    bi = float(np.sum(np.sum(U2 * d2, axis=0) / (U.sum(axis=0) * sep.sum(axis=1))))
    return ValidityIndices(float(xbi), float(ki), float(ti), bi)


def default_grids():
    """``C = 1..10`` and ``m = 1.1..3.0`` in steps of 0.1."""
    return list(range(1, 11)), [round(1.1 + 0.1 * i, 1) for i in range(20)]


def _zscore(v):
    out = np.zeros_like(v)
    ok = np.isfinite(v)
    if ok.sum() < 2:
        return out
    sd = v[ok].std(ddof=1)
    if sd > 0:
        out[ok] = (v[ok] - v[ok].mean()) / sd
    return out


def select_hyperparameters(
    X,
    C_grid,
    m_grid,
    restarts=10,
    seed=None,
    variant="means",
    max_iter=1000,
    tol=1e-6,
    exponent_mode="standard",
    n_jobs=1,
) -> ValidityReport:
    """Choose ``(C, m)`` by the averaged standardised validity indices.

    Every grid cell is fitted ``restarts`` times. For each index the minimum
    over restarts is kept; each index is then standardised across cells and
    the four standardised values are averaged. The cell with the smallest
    average wins, ties going to smaller ``C`` and then smaller ``m``.
    Cells with ``C = 1`` are fitted but take no part in the selection.
    """
    X = _as_data(X)
    C_grid = [int(c) for c in C_grid]
    m_grid = [float(m) for m in m_grid]
    if not C_grid or not m_grid:
        raise ConfigurationError("hyperparameter grids must be nonempty")
    cells = [(C, m) for C in C_grid for m in m_grid]

    def run(idx):
        C, m = cells[idx]
        best_fit, mins = None, np.full(4, np.nan)
        for j in range(restarts):
            key = (idx, j)
            if variant == "means":
                fit = fcm_means_fit(X, C, m, max_iter, tol, 1, seed, exponent_mode, stream_key=key)
            elif variant == "medoids":
                fit = fcm_medoids_fit(X, C, m, max_iter, 1, seed, exponent_mode, stream_key=key)
            else:
                raise ConfigurationError(f"unknown variant {variant!r}")
            if best_fit is None or fit.objective < best_fit.objective:
                best_fit = fit
            if C >= 2:
                try:
                    vals = np.array(validity_indices(X, fit))
                except NumericalError:
                    continue
                mins = np.fmin(mins, vals)
        return best_fit, mins

    if n_jobs == 1:
        results = [run(i) for i in range(len(cells))]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, range(len(cells))))

    table = np.array([r[1] for r in results])
    z = np.column_stack([_zscore(table[:, q]) for q in range(4)])
    valid = np.all(np.isfinite(table), axis=1)
    zavg = np.where(valid, z.mean(axis=1), np.nan)

    records = []
    for (C, m), vals, za in zip(cells, table, zavg):
        records.append(dict(C=C, m=m, xbi=vals[0], ki=vals[1], ti=vals[2], bi=vals[3], zavg=za))
    if valid.any():
        best = min((r for r, ok in zip(records, valid) if ok), key=lambda r: (r["zavg"], r["C"], r["m"]))
        best_pair = (best["C"], best["m"])
    elif len(cells) == 1:
        best_pair = cells[0]
    else:
        raise DegeneratePartitionError("validity indices are undefined on every grid cell")
    partitions = {cell: r[0] for cell, r in zip(cells, results)}
    return ValidityReport(records, best_pair, partitions)

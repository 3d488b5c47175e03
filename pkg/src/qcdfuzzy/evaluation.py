"""Evaluation of fuzzy partitions and 2-D metric scaling of dissimilarities."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, InvalidMembershipError, NumericalError

__all__ = [
    "crisp_membership",
    "fari",
    "switch_success",
    "aufc",
    "Embedding2D",
    "normalized_stress",
    "classical_mds",
    "mds_2d",
]

_ROW_TOL = 1e-6


def crisp_membership(labels, n_groups=None) -> np.ndarray:
    """One-hot ``n x G`` matrix from integer labels."""
    labels = np.asarray(labels, dtype=int).ravel()
    if labels.size and labels.min() < 0:
        raise InvalidMembershipError("labels must be nonnegative")
    G = int(labels.max()) + 1 if n_groups is None else int(n_groups)
    Q = np.zeros((labels.size, G))
    Q[np.arange(labels.size), labels] = 1.0
    return Q


def _membership(M, name) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim == 1:
        return crisp_membership(M)
    M = M.astype(float)
    if np.any(M < -_ROW_TOL) or np.any(M > 1 + _ROW_TOL):
        raise InvalidMembershipError(f"{name}: memberships must lie in [0, 1]")
    bad = np.abs(M.sum(axis=1) - 1.0) > _ROW_TOL
    if np.any(bad):
        raise InvalidMembershipError(f"{name}: rows {np.flatnonzero(bad).tolist()} do not sum to 1")
    return M


def _pair_relations(M, tnorm):
    """Degrees to which each pair shares a cluster (V) or is split (Y)."""
    n, C = M.shape
    iu, ju = np.triu_indices(n, k=1)
    A, B = M[iu], M[ju]  # (pairs, C)
    same = np.eye(C, dtype=bool)
    if tnorm == "min":
        T = np.minimum(A[:, :, None], B[:, None, :])
        V = np.max(np.where(same, T, 0.0), axis=(1, 2))
        Y = np.max(np.where(same, 0.0, T), axis=(1, 2)) if C > 1 else np.zeros(len(iu))
    else:
        T = A[:, :, None] * B[:, None, :]
        # probabilistic sum, the dual of the product t-norm
        V = 1.0 - np.prod(np.where(same, 1.0 - T, 1.0), axis=(1, 2))
        Y = 1.0 - np.prod(np.where(same, 1.0, 1.0 - T), axis=(1, 2))
    return V, Y


def fari(U, Q, tnorm="min") -> float:
    """Fuzzy adjusted Rand index between two membership matrices.

    For every pair of objects the degree of being together (``V``) and apart
    (``Y``) is computed in each partition with the chosen t-norm and its dual
    t-conorm. The four agreement counts are t-norm combinations of these
    degrees summed over pairs, and the index is the usual adjusted Rand
    functional of those counts. On crisp input it equals the classical
    adjusted Rand index.

    Parameters
    ----------
    U, Q : array_like
        Membership matrices (rows summing to one) or integer label vectors.
    tnorm : {"min", "product"}

    Returns
    -------
    float in [-1, 1]
    """
    if tnorm not in ("min", "product"):
        raise ConfigurationError(f"tnorm must be 'min' or 'product', got {tnorm!r}")
    U = _membership(U, "U")
    Q = _membership(Q, "Q")
    if U.shape[0] != Q.shape[0]:
        raise InvalidMembershipError("partitions cover different numbers of objects")
    if U.shape[0] < 2:
        raise InvalidMembershipError("at least two objects are needed")
    tn = np.minimum if tnorm == "min" else np.multiply
    Vu, Yu = _pair_relations(U, tnorm)
    Vq, Yq = _pair_relations(Q, tnorm)
    a = float(np.sum(tn(Vu, Vq)))
    b = float(np.sum(tn(Vu, Yq)))
    c = float(np.sum(tn(Yu, Vq)))
    d = float(np.sum(tn(Yu, Yq)))
    den = (a + b) * (b + d) + (a + c) * (c + d)
    if den == 0.0:
        if b == 0.0 and c == 0.0:
            return 1.0
        raise NumericalError("adjusted Rand index is undefined for these partitions")
    return 2.0 * (a * d - b * c) / den


def switch_success(U, groups, switch_index, cutoff=0.7) -> bool:
    """Whether a two-cluster fuzzy partition handles a switching series correctly.

    Clusters are matched to the two reference groups so that the non-switching
    series carry the largest total membership in their matched cluster. The
    run succeeds when every non-switching series has membership above
    ``cutoff`` in its matched cluster and the switching series has both
    memberships at or below ``cutoff``.

    ``groups`` lists the reference group (0 or 1) of every series; the entry
    at ``switch_index`` is ignored.
    """
    U = _membership(U, "U")
    if U.shape[1] != 2:
        raise ConfigurationError(f"switching-series evaluation needs exactly 2 clusters, got {U.shape[1]}")
    if not (0.5 < cutoff < 1.0):
        raise ConfigurationError(f"cutoff must lie in (0.5, 1), got {cutoff}")
    groups = np.asarray(groups, dtype=int).ravel()
    n = U.shape[0]
    if groups.shape != (n,):
        raise InvalidMembershipError("groups must label every series")
    if not 0 <= switch_index < n:
        raise ConfigurationError(f"switch_index {switch_index} out of range")
    keep = np.arange(n) != switch_index
    g = groups[keep]
    if np.any((g != 0) & (g != 1)):
        raise InvalidMembershipError("reference groups must be 0 or 1")
    Uk = U[keep]
    straight = Uk[np.arange(g.size), g].sum()
    swapped = Uk[np.arange(g.size), 1 - g].sum()
    match = g if straight >= swapped else 1 - g
    members_ok = np.all(Uk[np.arange(g.size), match] > cutoff)
    switch_ok = np.all(U[switch_index] <= cutoff)
    return bool(members_ok and switch_ok)


def aufc(m_values, rates) -> float:
    """Area under the fuzziness curve by the trapezoidal rule."""
    m_values = np.asarray(m_values, dtype=float)
    rates = np.asarray(rates, dtype=float)
    if m_values.ndim != 1 or m_values.shape != rates.shape:
        raise ConfigurationError("m_values and rates must be 1-D arrays of equal length")
    if m_values.size < 2:
        raise ConfigurationError("at least two grid points are needed")
    if np.any(np.diff(m_values) <= 0):
        raise ConfigurationError("m_values must be strictly increasing")
    return float(np.sum(np.diff(m_values) * (rates[1:] + rates[:-1]) / 2.0))


@dataclass
class Embedding2D:
    coords: np.ndarray
    stress: float
    r_squared: float
    iterations: int = 0
    stress_history: list = field(default_factory=list)


def _check_dissimilarity(D):
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ConfigurationError("dissimilarities must form a square matrix")
    if not np.allclose(D, D.T, rtol=0, atol=1e-10 * max(1.0, np.abs(D).max(initial=0.0))):
        raise ConfigurationError("dissimilarity matrix is not symmetric")
    if np.any(np.diag(D) != 0):
        raise ConfigurationError("dissimilarity matrix must have a zero diagonal")
    if np.any(D < 0):
        raise ConfigurationError("dissimilarities must be nonnegative")
    return (D + D.T) / 2.0


def _embedded(X):
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def normalized_stress(D, X) -> float:
    """``sqrt(sum_{i!=j} (||x_i - x_j|| - D_ij)^2 / sum_{i!=j} D_ij^2)``."""
    D = np.asarray(D, dtype=float)
    den = float(np.sum(D * D))
    if den == 0.0:
        return 0.0
    return float(np.sqrt(np.sum((_embedded(X) - D) ** 2) / den))


def classical_mds(D, n_components=2) -> np.ndarray:
    """Torgerson scaling from the double-centred squared dissimilarities."""
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    H = np.eye(n) - 1.0 / n
    B = -0.5 * H @ (D * D) @ H
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1][:n_components]
    lam = np.clip(evals[order], 0.0, None)
    X = evecs[:, order] * np.sqrt(lam)
    if X.shape[1] < n_components:
        X = np.hstack([X, np.zeros((n, n_components - X.shape[1]))])
    return X


def _r_squared(D, X):
    iu = np.triu_indices(D.shape[0], k=1)
    a, b = D[iu], _embedded(X)[iu]
    if a.std() == 0 or b.std() == 0:
        return 1.0 if np.allclose(a, b) else 0.0
    return float(np.corrcoef(a, b)[0, 1] ** 2)


def mds_2d(D, max_iter=300, tol=1e-9) -> Embedding2D:
    """Metric two-dimensional scaling.

    Starts from classical scaling and refines with Guttman-transform
    (SMACOF) iterations, which never increase the stress, until the relative
    change in stress drops below ``tol``.
    """
    D = _check_dissimilarity(D)
    n = D.shape[0]
    if n < 3:
        X = classical_mds(D) if n else np.zeros((0, 2))
        return Embedding2D(X, 0.0, 1.0, 0, [0.0])
    X = classical_mds(D)
    history = [normalized_stress(D, X)]
    it = 0
    for it in range(1, max_iter + 1):
        E = _embedded(X)
        with np.errstate(divide="ignore", invalid="ignore"):
            R = np.where(E > 0, D / E, 0.0)
        Bm = -R
        np.fill_diagonal(Bm, 0.0)
        np.fill_diagonal(Bm, -Bm.sum(axis=1))
        X_new = Bm @ X / n
        s = normalized_stress(D, X_new)
        prev = history[-1]
        history.append(s)
        X = X_new
        if prev == 0.0 or abs(prev - s) <= tol * prev:
            break
    return Embedding2D(X, history[-1], _r_squared(D, X), it, history)

"""Quantile cross-spectral density estimation and the QCD feature distance.

The estimator works on the ranks of each component: every column is mapped
through its empirical distribution function, thresholded at each quantile
level, and the resulting indicator series are Fourier transformed. Outer
products of those transforms give the rank-based copula cross-periodogram,
which is then smoothed with a periodized Epanechnikov kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import ConfigurationError, IncompatibleFeaturesError, InvalidInputError, PanelShapeError

__all__ = [
    "DEFAULT_TAUS",
    "CcrTensor",
    "check_taus",
    "default_bandwidth",
    "epanechnikov",
    "ecdf_ranks",
    "ccr_periodogram",
    "smooth_ccr",
    "feature_length",
    "flatten_features",
    "qcd_feature_vector",
    "qcd_features",
    "qcd_distance",
    "qcd_distance_matrix",
    "pairwise_euclidean",
]

DEFAULT_TAUS = (0.1, 0.5, 0.9)

MIN_LENGTH = 8


@dataclass(frozen=True)
class CcrTensor:
    """Cross-periodogram values indexed as ``(k, j1, j2, i, i')``.

    ``values[k, j1, j2, i, ip]`` holds the (raw or smoothed) estimate at
    angular frequency ``freqs[k]`` for components ``j1, j2`` and quantile
    levels ``taus[i], taus[ip]``. Raw tensors cover the full Fourier circle
    ``2*pi*s/T, s = 0..T-1``; smoothed tensors cover ``k = 0..T//2``.
    """

    values: np.ndarray
    freqs: np.ndarray
    taus: tuple
    T: int
    smoothed: bool = False
    bandwidth: float | None = None

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def r(self) -> int:
        return self.values.shape[3]


def check_taus(taus) -> np.ndarray:
    taus = np.asarray(taus, dtype=float).ravel()
    if taus.size < 1:
        raise ConfigurationError("at least one quantile level is required")
    if np.any(~np.isfinite(taus)) or np.any(taus <= 0.0) or np.any(taus >= 1.0):
        raise ConfigurationError(f"quantile levels must lie in (0, 1), got {taus.tolist()}")
    if np.any(np.diff(taus) <= 0.0):
        raise ConfigurationError(f"quantile levels must be strictly increasing, got {taus.tolist()}")
    return taus


def default_bandwidth(T: int) -> float:
    """Default smoothing bandwidth ``1.5 * T**(-1/4)`` in radians."""
    return 1.5 * float(T) ** -0.25


def epanechnikov(u):
    u = np.asarray(u, dtype=float)
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


def _as_series(series, series_id="series") -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise InvalidInputError(f"{series_id}: expected a T x d matrix, got shape {x.shape}")
    bad = np.argwhere(~np.isfinite(x))
    if bad.size:
        t, j = bad[0]
        raise InvalidInputError(f"{series_id}: non-finite value at row {t}, column {j}")
    return x


def ecdf_ranks(series, series_id="series") -> np.ndarray:
    """Evaluate each column's empirical distribution function at its own points.

    Entry ``(t, j)`` is ``#{s : X[s, j] <= X[t, j]} / T``, so ties all map to
    the largest rank of the tied block.

    Parameters
    ----------
    series : array_like, shape (T,) or (T, d)
    series_id : str
        Label used in error messages.

    Returns
    -------
    ndarray, shape (T, d)
    """
    x = _as_series(series, series_id)
    T = x.shape[0]
    out = np.empty_like(x)
    for j in range(x.shape[1]):
        col = x[:, j]
        srt = np.sort(col)
        out[:, j] = np.searchsorted(srt, col, side="right") / T
    return out


def _indicator_dfts(ranks: np.ndarray, taus: np.ndarray) -> np.ndarray:
    # d^j(omega_s, tau) for s = 0..T-1 with time index t = 1..T; shape (T, d, r)
    # numpy indexes time from 0 rather than 1; the resulting unit phase
    # factor cancels in every cross product d^{j1} * conj(d^{j2})
    ind = (ranks[:, :, None] <= taus[None, None, :]).astype(float)
    return np.fft.fft(ind, axis=0)


def ccr_periodogram(series, taus=DEFAULT_TAUS, series_id="series") -> CcrTensor:
    """Rank-based copula cross-periodogram on the full Fourier circle.

    ``I[s, j1, j2, i, i'] = d^{j1}(w_s, tau_i) * d^{j2}(-w_s, tau_i') / (2 pi T)``
    with ``w_s = 2 pi s / T``. Since the indicator series are real,
    ``d(-w) = conj(d(w))``.
    """
    taus = check_taus(taus)
    ranks = ecdf_ranks(series, series_id)
    T = ranks.shape[0]
    if T < MIN_LENGTH:
        raise InvalidInputError(f"{series_id}: series length {T} is below the minimum of {MIN_LENGTH}")
    dft = _indicator_dfts(ranks, taus)
    vals = np.einsum("sai,sbj->sabij", dft, dft.conj()) / (2.0 * np.pi * T)
    freqs = 2.0 * np.pi * np.arange(T) / T
    return CcrTensor(values=vals, freqs=freqs, taus=tuple(taus.tolist()), T=T)


@lru_cache(maxsize=32)
def _kernel_spectrum(T: int, bandwidth: float) -> np.ndarray:
    """DFT of the periodized kernel weights ``(2 pi / T) W_T(2 pi j / T)``, ``j = 0..T-1``."""
    u = 2.0 * np.pi * np.arange(T) / T
    w = np.zeros(T)
    # bandwidth < pi, so |v| <= 1 covers the whole kernel support
    for v in (-1, 0, 1):
        w += epanechnikov((u + 2.0 * np.pi * v) / bandwidth) / bandwidth
    w *= 2.0 * np.pi / T
    spec = np.fft.fft(w)
    spec.setflags(write=False)
    return spec


def smooth_ccr(raw: CcrTensor, bandwidth: float | None = None) -> CcrTensor:
    """Kernel-smooth a raw cross-periodogram onto frequencies ``2 pi k / T``, ``k = 0..T//2``.

    The sum over Fourier frequencies is a circular convolution on the grid,
    evaluated by FFT. The ordinate at frequency zero is left out.
    """
    if raw.smoothed:
        raise ConfigurationError("tensor is already smoothed")
    T = raw.T
    if bandwidth is None:
        bandwidth = default_bandwidth(T)
    bandwidth = float(bandwidth)
    if not (0.0 < bandwidth < np.pi):
        raise ConfigurationError(f"bandwidth must lie in (0, pi), got {bandwidth}")
    K = T // 2 + 1
    vals = raw.values.copy()
    vals[0] = 0.0
    spec = _kernel_spectrum(T, bandwidth).reshape((T,) + (1,) * (vals.ndim - 1))
    sm = np.fft.ifft(np.fft.fft(vals, axis=0) * spec, axis=0)[:K]
    freqs = 2.0 * np.pi * np.arange(K) / T
    return CcrTensor(values=sm, freqs=freqs, taus=raw.taus, T=T, smoothed=True, bandwidth=bandwidth)


def feature_length(d: int, r: int, T: int) -> int:
    return 2 * d * d * r * r * (T // 2 + 1)


def flatten_features(tensor: CcrTensor) -> np.ndarray:
    """Canonical real feature vector: all real parts, then all imaginary parts.

    Within each half the nesting is ``j1``, ``j2``, frequency, then the
    ``r x r`` quantile matrix row by row.
    """
    v = np.transpose(tensor.values, (1, 2, 0, 3, 4)).reshape(-1)
    return np.concatenate([v.real, v.imag])


def qcd_feature_vector(series, taus=DEFAULT_TAUS, bandwidth=None, series_id="series") -> np.ndarray:
    """QCD feature vector of one multivariate series.

    Parameters
    ----------
    series : array_like, shape (T, d)
    taus : sequence of float
        Quantile levels, strictly increasing in (0, 1).
    bandwidth : float or None
        Kernel bandwidth in radians; ``None`` uses :func:`default_bandwidth`.

    Returns
    -------
    ndarray of length ``2 d^2 r^2 (T//2 + 1)``
    """
    raw = ccr_periodogram(series, taus, series_id=series_id)
    return flatten_features(smooth_ccr(raw, bandwidth))


def _common_length(lengths, truncate: bool) -> int | None:
    lengths = set(lengths)
    if len(lengths) == 1:
        return None
    if not truncate:
        raise PanelShapeError(
            f"series lengths differ ({sorted(lengths)}); pass truncate=True to cut them to a common length"
        )
    L = min(lengths)
    return L - (L % 2)


def qcd_features(panel, taus=DEFAULT_TAUS, bandwidth=None, truncate=False, n_jobs=1) -> np.ndarray:
    """Stack feature vectors of every series in ``panel`` into an ``n x q`` matrix.

    ``panel`` is an :class:`~qcdfuzzy.panel.MtsPanel` or a sequence of
    ``T x d`` arrays. All series must share ``d``. Unequal lengths are an
    error unless ``truncate`` is set, in which case every series is cut to
    the shortest even length.
    """
    series = list(getattr(panel, "series", panel))
    ids = list(getattr(panel, "ids", [f"series[{i}]" for i in range(len(series))]))
    if not series:
        raise PanelShapeError("panel is empty")
    arrays = [_as_series(s, sid) for s, sid in zip(series, ids)]
    dims = {a.shape[1] for a in arrays}
    if len(dims) > 1:
        raise PanelShapeError(f"series have different numbers of components: {sorted(dims)}")
    L = _common_length([a.shape[0] for a in arrays], truncate)
    if L is not None:
        arrays = [a[:L] for a in arrays]

    def one(args):
        a, sid = args
        return qcd_feature_vector(a, taus, bandwidth, series_id=sid)

    if n_jobs == 1:
        rows = [one(item) for item in zip(arrays, ids)]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            rows = list(pool.map(one, zip(arrays, ids)))
    return np.vstack(rows)


def qcd_distance(a, b) -> float:
    """Euclidean distance between two QCD feature vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise IncompatibleFeaturesError(f"feature vectors have different shapes: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def qcd_distance_matrix(panel, taus=DEFAULT_TAUS, bandwidth=None, truncate=False, n_jobs=1) -> np.ndarray:
    feats = qcd_features(panel, taus, bandwidth, truncate=truncate, n_jobs=n_jobs)
    return pairwise_euclidean(feats)


def pairwise_euclidean(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    D = np.zeros((n, n))
    # per-pair norms keep every entry independent of the others
    for i in range(n):
        D[i, i + 1:] = np.linalg.norm(X[i + 1:] - X[i], axis=1)
    return D + D.T

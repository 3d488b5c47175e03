"""Containers for collections of multivariate series."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError, PanelShapeError


@dataclass
class MtsPanel:
    """A named collection of ``T x d`` series.

    Attributes
    ----------
    series : list of ndarray
        One ``T_i x d`` array per series; all share ``d``.
    ids : list of str
        Series labels, unique.
    true_labels : ndarray of int, optional
        Reference group of every series.
    switch_index : int, optional
        Position of the switching series, for the two-cluster designs.
    """

    series: list
    ids: list = field(default_factory=list)
    true_labels: np.ndarray | None = None
    switch_index: int | None = None

    def __post_init__(self):
        self.series = [np.asarray(s, dtype=float) for s in self.series]
        self.series = [s[:, None] if s.ndim == 1 else s for s in self.series]
        if not self.ids:
            self.ids = [f"s{i}" for i in range(len(self.series))]
        if len(self.ids) != len(self.series):
            raise PanelShapeError("number of ids does not match number of series")
        if len(set(self.ids)) != len(self.ids):
            raise PanelShapeError("series ids must be unique")
        for s, sid in zip(self.series, self.ids):
            if s.ndim != 2:
                raise InvalidInputError(f"{sid}: expected a T x d matrix, got shape {s.shape}")
        dims = {s.shape[1] for s in self.series}
        if len(dims) > 1:
            raise PanelShapeError(f"series have different numbers of components: {sorted(dims)}")
        if self.true_labels is not None:
            self.true_labels = np.asarray(self.true_labels, dtype=int)
            if self.true_labels.shape != (len(self.series),):
                raise PanelShapeError("true_labels must have one entry per series")

    def __len__(self):
        return len(self.series)

    @property
    def d(self) -> int:
        return self.series[0].shape[1] if self.series else 0

    @property
    def lengths(self) -> list:
        return [s.shape[0] for s in self.series]

    def preprocess(self, logdiff=False, standardize=False) -> "MtsPanel":
        """Return a transformed copy.

        ``logdiff`` takes first differences of the natural logarithm (values
        must be positive); ``standardize`` scales each component to zero mean
        and unit variance.
        """
        out = []
        for s, sid in zip(self.series, self.ids):
            x = s
            if logdiff:
                if np.any(x <= 0):
                    raise InvalidInputError(f"{sid}: log-differencing needs strictly positive values")
                x = np.diff(np.log(x), axis=0)
            if standardize:
                sd = x.std(axis=0)
                if np.any(sd == 0):
                    raise InvalidInputError(f"{sid}: a constant component cannot be standardized")
                x = (x - x.mean(axis=0)) / sd
            out.append(x)
        return MtsPanel(out, list(self.ids), self.true_labels, self.switch_index)

"""Shared domain types.

Conventions used throughout the package:

* a panel is a ``T x n`` matrix whose rows are observations of an
  ``n``-dimensional process, columns are assets;
* a weight matrix ``W`` stores one component per row, and the component
  series of a panel is ``values @ W.T`` (one column per component);
* components are sorted by lag autocorrelation, largest first, so
  component 0 is always the slowest.

All types are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyPanel,
    NonFiniteValue,
    NonMonotonicTime,
    ShapeMismatch,
)


class Kind(enum.Enum):
    """What the panel values represent. Carried as metadata, never inferred."""

    PRICES = "prices"
    RETURNS = "returns"


class Method(enum.Enum):
    """Which solver produced a decomposition."""

    LINEAR_TICA = "linear"
    TAIL_DEFLATION = "tail-deflation"
    TAIL_PARALLEL = "tail-parallel"


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SeriesMatrix:
    """An aligned panel of observations with a strictly increasing time index.

    Parameters
    ----------
    timestamps : array of int, shape (T,)
        Ordinal or epoch time points, strictly increasing.
    values : array of float, shape (T, n)
        Row ``t`` is the observation at ``timestamps[t]``.
    labels : tuple of str, length n
        Column (asset) names.
    kind : Kind
        Prices or returns; metadata only.
    """

    timestamps: np.ndarray
    values: np.ndarray
    labels: tuple[str, ...]
    kind: Kind

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ShapeMismatch(f"values must be 2-D, got shape {values.shape}")
        timestamps = np.asarray(self.timestamps, dtype=np.int64)
        if timestamps.ndim != 1 or len(timestamps) != values.shape[0]:
            raise ShapeMismatch("timestamps length must equal the number of rows")
        labels = tuple(str(x) for x in self.labels)
        if len(labels) != values.shape[1]:
            raise ShapeMismatch("labels length must equal the number of columns")
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "timestamps", _freeze(timestamps))
        object.__setattr__(self, "labels", labels)

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]

    @property
    def n_assets(self) -> int:
        return self.values.shape[1]

    def window(self, start: int, end: int) -> "SeriesMatrix":
        """Rows with ``start <= timestamp < end``."""
        lo = int(np.searchsorted(self.timestamps, start, side="left"))
        hi = int(np.searchsorted(self.timestamps, end, side="left"))
        return SeriesMatrix(self.timestamps[lo:hi], self.values[lo:hi],
                            self.labels, self.kind)


def validate_series(m: SeriesMatrix) -> SeriesMatrix:
    """Check panel invariants and return the input unchanged.

    Raises
    ------
    EmptyPanel
        Fewer than 2 rows or no columns.
    NonMonotonicTime
        Timestamps not strictly increasing.
    NonFiniteValue
        A NaN or infinity anywhere in the values.
    """
    if m.n_obs < 2 or m.n_assets < 1:
        raise EmptyPanel(f"panel must be at least 2 x 1, got {m.n_obs} x {m.n_assets}")
    if np.any(np.diff(m.timestamps) <= 0):
        raise NonMonotonicTime("timestamps must be strictly increasing")
    finite = np.isfinite(m.values)
    if not finite.all():
        row, col = np.argwhere(~finite)[0]
        raise NonFiniteValue(int(row), int(col))
    return m


def canonicalize_signs(weights: np.ndarray) -> np.ndarray:
    """Flip row signs so the largest-magnitude entry of each row is positive.

    Ties resolve to the first maximal entry. All-zero rows are left alone.
    Idempotent; magnitudes are unchanged.
    """
    w = np.array(weights, dtype=np.float64, copy=True)
    for i in range(w.shape[0]):
        j = int(np.argmax(np.abs(w[i])))
        if w[i, j] < 0:
            w[i] = -w[i]
    return w


@dataclass(frozen=True)
class CovPair:
    """Instantaneous covariance and symmetrized lagged autocovariance.

    ``c0`` is positive definite after regularization, ``cT`` is exactly
    symmetric by construction, ``lag`` is the lag in sample steps and
    ``sample_count`` the number of (t, t+lag) pairs used.
    """

    c0: np.ndarray
    cT: np.ndarray
    lag: int
    sample_count: int

    def __post_init__(self):
        c0 = np.asarray(self.c0, dtype=np.float64)
        cT = np.asarray(self.cT, dtype=np.float64)
        if c0.shape != cT.shape or c0.ndim != 2 or c0.shape[0] != c0.shape[1]:
            raise ShapeMismatch("c0 and cT must be square matrices of equal shape")
        object.__setattr__(self, "c0", _freeze(c0))
        object.__setattr__(self, "cT", _freeze(cT))


@dataclass(frozen=True)
class Decomposition:
    """Result of a timescale separation fit.

    Attributes
    ----------
    weights : (n, n) array
        Row ``i`` is the weight vector of component ``i``.
    lambdas : (n,) array
        Lag autocorrelations (linear eigenvalues or higher-moment tail
        autocorrelations), sorted descending.
    timescales : (n,) array
        Relaxation timescales ``-2*lag / (lambda - 1)``; ``+inf`` marks a
        stationary direction. For the tail methods this is the same formula
        applied to the tail autocorrelation (an analogue, not a derived
        quantity).
    lag : int
        Lag in sample steps used for the fit.
    order_k : int
        Moment half-order (1 = linear).
    method : Method
    fit_window : (start, end) timestamps, half-open.
    labels : column names of the fitted panel.
    betas : (n,) array or None
        Lagrange-multiplier estimates for the tail methods.
    """

    weights: np.ndarray
    lambdas: np.ndarray
    timescales: np.ndarray
    lag: int
    order_k: int
    method: Method
    fit_window: tuple[int, int]
    labels: tuple[str, ...] = ()
    betas: np.ndarray | None = field(default=None)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        lam = np.asarray(self.lambdas, dtype=np.float64)
        ts = np.asarray(self.timescales, dtype=np.float64)
        if w.ndim != 2 or len(lam) != w.shape[0] or len(ts) != w.shape[0]:
            raise ShapeMismatch("weights, lambdas and timescales must agree in length")
        if np.any(np.diff(lam) > 0):
            raise ShapeMismatch("lambdas must be sorted descending")
        object.__setattr__(self, "weights", _freeze(w))
        object.__setattr__(self, "lambdas", _freeze(lam))
        object.__setattr__(self, "timescales", _freeze(ts))
        if self.betas is not None:
            object.__setattr__(self, "betas", _freeze(np.asarray(self.betas, dtype=np.float64)))

    @property
    def n_components(self) -> int:
        return self.weights.shape[0]

    def project(self, m: SeriesMatrix) -> np.ndarray:
        """Component series of a panel: ``values @ weights.T``."""
        if m.n_assets != self.weights.shape[1]:
            raise ShapeMismatch(f"panel has {m.n_assets} columns, weights expect "
                                f"{self.weights.shape[1]}")
        return m.values @ self.weights.T


@dataclass(frozen=True)
class LagrangeScalars:
    """A (beta, lambda) pair at a given lag.

    For the linear solver the two are tied by ``lam = (1 + beta) / (2 * lag)``.
    """

    beta: float
    lam: float
    lag: int

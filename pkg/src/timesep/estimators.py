"""Covariance and higher-moment estimators.

All estimators are pure functions of a :class:`~timesep.core.SeriesMatrix`
and an :class:`EstimatorConfig`. Expectations are replaced by sample means;
when a lag ``L`` is involved the means run over the ``T - L`` overlapping
(t, t+L) pairs (the common support).

Centering subtracts the in-window column means (the means of *all* rows of
the input), so the instantaneous and lagged estimates always share the same
centering.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import CovPair, SeriesMatrix
from .errors import BadSpec, ConfigError, InsufficientData, SingularCovariance


class Denominator(enum.Enum):
    """Sample-mean divisor convention.

    ``N`` divides by the full row count and uses every row for the
    instantaneous covariance. ``N_MINUS_LAG`` restricts both estimates to
    the common support of the (t, t+lag) pairing and divides by ``T - lag``,
    which keeps the generalized eigenvalues true sample autocorrelations up
    to O(1/N) edge effects.
    """

    N = "n"
    N_MINUS_LAG = "n-lag"


@dataclass(frozen=True)
class EstimatorConfig:
    """Estimation options shared by the solvers.

    Parameters
    ----------
    lag : int
        Lag in sample steps, at least 1.
    center : bool
        Subtract in-window column means before forming moments.
    ridge : float or None
        Amount added to the diagonal of the instantaneous covariance;
        ``None`` selects ``1e-10 * trace(c0) / n`` automatically.
    denominator : Denominator
        Divisor convention, see :class:`Denominator`.
    """

    lag: int = 1
    center: bool = True
    ridge: float | None = None
    denominator: Denominator = Denominator.N_MINUS_LAG

    def __post_init__(self):
        if int(self.lag) != self.lag or self.lag < 1:
            raise BadSpec(f"lag must be a positive integer, got {self.lag!r} "
                          "(lag 0 is the covariance op)")
        if self.ridge is not None and self.ridge < 0:
            raise BadSpec(f"ridge must be nonnegative, got {self.ridge!r}")


def _centered(m: SeriesMatrix, center: bool) -> np.ndarray:
    if center:
        return m.values - m.values.mean(axis=0)
    return m.values


def _second_moment(X: np.ndarray, lag: int, denominator: Denominator) -> np.ndarray:
    """Symmetrized lagged second moment of pre-centered rows; lag 0 allowed."""
    T = X.shape[0]
    npairs = T - lag
    lead = X[lag:]
    base = X[: T - lag]
    denom = npairs if denominator is Denominator.N_MINUS_LAG else T
    raw = lead.T @ base / denom
    return 0.5 * (raw + raw.T)


def _auto_ridge(c0: np.ndarray) -> float:
    return 1e-10 * float(np.trace(c0)) / c0.shape[0]


def covariance(m: SeriesMatrix, cfg: EstimatorConfig) -> np.ndarray:
    """Instantaneous covariance (ridge-regularized, exactly symmetric).

    No lag shift is applied. Under ``N_MINUS_LAG`` the estimate is
    restricted to the first ``T - lag`` rows so it shares the support of
    :func:`lagged_autocovariance`; under ``N`` it uses every row.

    Raises
    ------
    InsufficientData
        Fewer than 2 usable rows.
    """
    X = _centered(m, cfg.center)
    rows = X.shape[0] - (cfg.lag if cfg.denominator is Denominator.N_MINUS_LAG else 0)
    if rows < 2:
        raise InsufficientData(f"need at least 2 usable rows, have {rows}")
    X = X[:rows]
    c0 = _second_moment(X, 0, Denominator.N)
    ridge = _auto_ridge(c0) if cfg.ridge is None else cfg.ridge
    if ridge:
        c0 = c0 + ridge * np.eye(c0.shape[0])
    return c0


def lagged_autocovariance(m: SeriesMatrix, cfg: EstimatorConfig) -> np.ndarray:
    """Symmetrized lag-``cfg.lag`` autocovariance, ``(C + C.T) / 2``.

    Same centering and divisor rules as :func:`covariance`; no ridge is
    added.

    Raises
    ------
    InsufficientData
        Not enough rows for the requested lag.
    """
    if m.n_obs <= cfg.lag:
        raise InsufficientData(f"lag {cfg.lag} needs more than {m.n_obs} rows")
    X = _centered(m, cfg.center)
    return _second_moment(X, cfg.lag, cfg.denominator)


def cov_pair(m: SeriesMatrix, cfg: EstimatorConfig) -> CovPair:
    """Bundle ``(c0, cT)`` with matching centering and divisor.

    Raises
    ------
    SingularCovariance
        Smallest eigenvalue of ``c0`` not positive (to machine precision)
        after the ridge.
    """
    c0 = covariance(m, cfg)
    cT = lagged_autocovariance(m, cfg)
    eigvals = np.linalg.eigvalsh(c0)
    tiny = c0.shape[0] * np.finfo(np.float64).eps * max(eigvals[-1], 0.0)
    if eigvals[0] <= tiny:
        raise SingularCovariance(
            f"covariance not positive definite (min eigenvalue {eigvals[0]:.3e}); "
            "increase ridge or drop collinear columns")
    return CovPair(c0=c0, cT=cT, lag=cfg.lag, sample_count=m.n_obs - cfg.lag)


def tail_moment(m: SeriesMatrix, w: np.ndarray, k: int) -> float:
    """Scaled moment of order ``2k`` of the projection: ``mean((x.w)^2k) / 2k``.

    Computed on the raw values over all rows; always nonnegative.
    """
    if k < 1 or int(k) != k:
        raise ConfigError(f"k must be a positive integer, got {k!r}")
    u = m.values @ np.asarray(w, dtype=np.float64)
    return float(np.mean(u ** (2 * k))) / (2 * k)


def tail_autocorrelation(m: SeriesMatrix, w: np.ndarray, k: int, lag: int) -> float:
    """Tail autocorrelation of order ``k``: ``mean((x_t.w)^(2k-1) * (x_{t+lag}.w))``.

    For ``k = 1`` on a unit-variance projection this is the ordinary lag
    autocorrelation. Computed on the raw values over the common support.

    Raises
    ------
    InsufficientData
        Not enough rows for the requested lag.
    """
    if k < 1 or int(k) != k:
        raise ConfigError(f"k must be a positive integer, got {k!r}")
    if lag < 1 or m.n_obs <= lag:
        raise InsufficientData(f"lag {lag} needs more than {m.n_obs} rows")
    u = m.values @ np.asarray(w, dtype=np.float64)
    return _projected_tail_autocorr(u, k, lag)


def _projected_tail_autocorr(u: np.ndarray, k: int, lag: int) -> float:
    base = u[: len(u) - lag]
    lead = u[lag:]
    return float(np.mean(base ** (2 * k - 1) * lead))

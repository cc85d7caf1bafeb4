"""Linear timescale separation.

Solves the generalized symmetric eigenproblem ``cT w = lambda c0 w`` for a
:class:`~timesep.core.CovPair` by Cholesky reduction: factor ``c0 = L L^T``,
form the symmetric ``B = L^-1 cT L^-T``, diagonalize ``B`` with a standard
symmetric eigensolver, and back-transform the eigenvectors with ``L^-T``.
The resulting weight rows satisfy ``W c0 W^T = I`` (unit variance and
mutual decorrelation of the component series on the fit window).

Eigenvalues are the lag autocorrelations of the components; they convert
to relaxation timescales via ``t = -2*lag / (lambda - 1)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import (
    CovPair,
    Decomposition,
    Method,
    SeriesMatrix,
    canonicalize_signs,
    validate_series,
)
from .errors import EigenNoConvergence, NotPositiveDefinite, NumericalError
from .estimators import EstimatorConfig, cov_pair

_ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class GevSolution:
    """Full spectrum of the pencil (cT, c0).

    ``eigenvalues`` are sorted descending; row ``i`` of ``eigenvectors``
    belongs to ``eigenvalues[i]``; ``residual_norms[i]`` is
    ``||cT w_i - lambda_i c0 w_i||_2``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norms: np.ndarray


def solve_gev(pair: CovPair) -> GevSolution:
    """Solve ``cT w = lambda c0 w`` for all eigenpairs.

    Rows of the returned eigenvector matrix are c0-orthonormal and
    sign-canonicalized; ties in the (stable, descending) eigenvalue sort
    are broken lexicographically on the canonicalized weights.

    Raises
    ------
    NotPositiveDefinite
        ``c0`` has no Cholesky factorization.
    EigenNoConvergence
        The symmetric eigensolver failed.
    """
    c0, cT = pair.c0, pair.cT
    n = c0.shape[0]
    try:
        L = scipy.linalg.cholesky(c0, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"Cholesky factorization failed: {exc}") from exc
    Li = scipy.linalg.solve_triangular(L, np.eye(n), lower=True)
    B = Li @ cT @ Li.T
    B = 0.5 * (B + B.T)
    try:
        eigvals, V = scipy.linalg.eigh(B)
    except scipy.linalg.LinAlgError as exc:
        raise EigenNoConvergence(0, f"symmetric eigensolver failed: {exc}") from exc
    W = (Li.T @ V).T  # rows are pencil eigenvectors

    W = canonicalize_signs(W)
    order = sorted(range(n), key=lambda i: (-eigvals[i], tuple(W[i])))
    eigvals = eigvals[order]
    W = W[order]

    residuals = np.array([
        np.linalg.norm(cT @ W[i] - eigvals[i] * (c0 @ W[i])) for i in range(n)
    ])
    scale = np.linalg.norm(cT, "fro") + np.abs(eigvals) * np.linalg.norm(c0, "fro")
    if np.any(residuals > _ORTHO_TOL * scale):
        raise NumericalError("generalized eigenpair residuals exceed tolerance")
    gram = W @ c0 @ W.T
    if np.max(np.abs(gram - np.eye(n))) > _ORTHO_TOL:
        raise NumericalError("eigenvectors lost c0-orthonormality")
    return GevSolution(eigenvalues=eigvals, eigenvectors=W, residual_norms=residuals)


def timescales(eigenvalues: np.ndarray, lag: int, *, warn_above_one: bool = True) -> np.ndarray:
    """Relaxation timescales ``-2*lag / (lambda - 1)``.

    ``lambda = 1`` maps to ``+inf`` (stationary direction). ``lambda > 1``
    (possible through sampling noise) also maps to ``+inf``, with a warning
    unless suppressed. ``lambda <= -1`` is clamped to ``-1 + 1e-12`` before
    the formula is applied.
    """
    lam = np.atleast_1d(np.asarray(eigenvalues, dtype=np.float64))
    out = np.empty_like(lam)
    for i, x in enumerate(lam):
        if x > 1.0 and warn_above_one:
            warnings.warn(f"autocorrelation {x:.6g} > 1 (sampling noise); "
                          "timescale reported as +inf", stacklevel=2)
        if x >= 1.0:
            out[i] = np.inf
        else:
            if x <= -1.0:
                x = -1.0 + 1e-12
            out[i] = -2.0 * lag / (x - 1.0)
    return out


def beta_from_lambda(lam: float, lag: int) -> float:
    """Lagrange multiplier from an autocorrelation: ``beta = 2*lag*lambda - 1``."""
    return 2.0 * lag * lam - 1.0


def lambda_from_beta(beta: float, lag: int) -> float:
    """Inverse of :func:`beta_from_lambda`: ``lambda = (1 + beta) / (2*lag)``."""
    return (1.0 + beta) / (2.0 * lag)


def fit_linear(m: SeriesMatrix, cfg: EstimatorConfig) -> Decomposition:
    """Covariance pair, generalized eigensolve, timescales, in one call."""
    validate_series(m)
    pair = cov_pair(m, cfg)
    sol = solve_gev(pair)
    tsc = timescales(sol.eigenvalues, cfg.lag)
    return Decomposition(
        weights=sol.eigenvectors,
        lambdas=sol.eigenvalues,
        timescales=tsc,
        lag=cfg.lag,
        order_k=1,
        method=Method.LINEAR_TICA,
        fit_window=(int(m.timestamps[0]), int(m.timestamps[-1]) + 1),
        labels=m.labels,
    )

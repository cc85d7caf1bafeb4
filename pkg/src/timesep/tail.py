"""Higher-moment ("tail") timescale separation by fixed-point iteration.

The linear solver orders components by ordinary lag autocorrelation; this
module orders them by the *tail autocorrelation of order k*,

    lambda = E[(x_t . w)^(2k-1) * (x_{t+L} . w)],

which up-weights extreme observations and therefore separates directions
by the persistence of their tails rather than of their variance. The
constrained stationarity problem is nonlinear for k > 1 and is solved by a
FastICA-style fixed-point iteration on whitened data, where the unit-norm
and unit-variance constraints coincide.

One update step, with whitened rows x and projection u = x . w:

    w  <-  Fsym(w) - (2k-1) * E[u^(2k-2)] * w,       then renormalize,

where ``Fsym(w) = (E[x_t u_{t+L}^(2k-1)] + E[x_{t+L} u_t^(2k-1)]) / 2``
couples the data with the lag-shifted projection symmetrically in time.
``Fsym`` is exactly the gradient of the time-symmetrized tail
autocorrelation (up to the constant 1/2k), so fixed points are the
constrained stationary directions; at k = 1 the step reduces to power
iteration on the symmetrized lag matrix, whose fixed points are the linear
solver's eigenvectors.

Deflation mode extracts one component at a time, projecting each new
iterate against the components already found. Parallel mode updates all
rows simultaneously and re-orthonormalizes with an ordered Gram-Schmidt
(QR) decorrelation. A symmetric inverse-square-root decorrelation is *not*
used: for the k = 1 step, which is linear in W, it provably maps any
orthonormal W to itself up to a fixed involution (polar factors strip all
magnitude information), so it cannot separate components; the ordered
decorrelation is the parallel counterpart of deflation and converges for
every k.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import (
    CovPair,
    Decomposition,
    LagrangeScalars,
    Method,
    SeriesMatrix,
    canonicalize_signs,
    validate_series,
)
from .errors import (
    BadSpec,
    ConfigError,
    DegenerateUpdate,
    InsufficientData,
    NoConvergence,
    NotPositiveDefinite,
    NumericalError,
)
from .estimators import Denominator, EstimatorConfig, cov_pair, _projected_tail_autocorr
from .linear import timescales

_CONSTRAINT_TOL = 1e-6
_NORM_FLOOR = 1e-14


class TailMode(enum.Enum):
    DEFLATION = "deflation"
    PARALLEL = "parallel"


@dataclass(frozen=True)
class TailConfig:
    """Options for the fixed-point solver.

    ``lag`` defaults to the estimator lag; setting both to different
    values is rejected. Convergence is measured on the direction change
    ``1 - |w_new . w_old|`` (sign-blind). ``restarts`` is the number of
    additional random initializations tried when an iteration fails to
    converge; all randomness derives from ``seed``.
    """

    k: int = 4
    lag: int | None = None
    max_iters: int = 500
    tol: float = 1e-10
    restarts: int = 8
    seed: int = 0
    mode: TailMode = TailMode.DEFLATION

    def __post_init__(self):
        if self.k < 1 or int(self.k) != self.k:
            raise BadSpec(f"k must be a positive integer, got {self.k!r}")
        if self.tol <= 0:
            raise BadSpec("tol must be positive")
        if self.max_iters < 1:
            raise BadSpec("max_iters must be positive")
        if self.restarts < 0:
            raise BadSpec("restarts must be nonnegative")


@dataclass(frozen=True)
class TailIterate:
    """State of one fixed-point step: current weight(s), direction change,
    iteration counter, and whether the tolerance has been met."""

    w: np.ndarray
    delta: float
    iter: int
    converged: bool


def matrix_inv_sqrt(s: np.ndarray) -> np.ndarray:
    """Symmetric inverse square root: returns M with ``M s M = I``.

    Raises
    ------
    NotPositiveDefinite
        ``s`` has a non-positive eigenvalue (to machine precision).
    """
    s = np.asarray(s, dtype=np.float64)
    eigvals, V = np.linalg.eigh(0.5 * (s + s.T))
    tiny = s.shape[0] * np.finfo(np.float64).eps * max(eigvals[-1], 0.0)
    if eigvals[0] <= tiny:
        raise NotPositiveDefinite(
            f"matrix not positive definite (min eigenvalue {eigvals[0]:.3e})")
    M = (V / np.sqrt(eigvals)) @ V.T
    return 0.5 * (M + M.T)


def whiten(m: SeriesMatrix, pair: CovPair) -> SeriesMatrix:
    """Right-multiply the panel by ``c0^(-1/2)`` so its covariance becomes I.

    A pure linear map: no centering is applied here. Labels, timestamps
    and kind are preserved.
    """
    M = matrix_inv_sqrt(pair.c0)
    return SeriesMatrix(m.timestamps, m.values @ M, m.labels, m.kind)


def _lag_views(Z: np.ndarray, lag: int) -> tuple[np.ndarray, np.ndarray]:
    return Z[: len(Z) - lag], Z[lag:]


def _step(base: np.ndarray, lead: np.ndarray, w: np.ndarray, k: int) -> np.ndarray:
    """Raw (unnormalized) fixed-point update in whitened coordinates."""
    u = base @ w
    up = lead @ w
    npairs = len(u)
    grad = 0.5 * (base.T @ (up ** (2 * k - 1)) + lead.T @ (u ** (2 * k - 1))) / npairs
    shift = (2 * k - 1) * np.mean(u ** (2 * k - 2))
    return grad - shift * w


def tail_step_deflation(mw: SeriesMatrix, w: np.ndarray, k: int, lag: int) -> np.ndarray:
    """One renormalized fixed-point step for a single component.

    ``mw`` must already be whitened (and centered, if centering is wanted);
    ``w`` must have unit Euclidean norm. The result has unit norm and is
    sign-aligned with the input.

    Raises
    ------
    DegenerateUpdate
        The unnormalized update has norm below 1e-14.
    """
    if lag < 1 or mw.n_obs <= lag:
        raise InsufficientData(f"lag {lag} needs more than {mw.n_obs} rows")
    w = np.asarray(w, dtype=np.float64)
    base, lead = _lag_views(mw.values, lag)
    wn = _step(base, lead, w, k)
    norm = np.linalg.norm(wn)
    if norm < _NORM_FLOOR:
        raise DegenerateUpdate(f"update norm {norm:.3e} below {_NORM_FLOOR}")
    wn = wn / norm
    if wn @ w < 0:
        wn = -wn
    return wn


def iterate_deflation(mw: SeriesMatrix, w0: np.ndarray, k: int, lag: int,
                      tol: float = 1e-10, max_iters: int = 500) -> TailIterate:
    """Run single-component fixed-point steps from ``w0`` until the direction
    change drops below ``tol``; returns the final iterate state (no restarts)."""
    w = np.asarray(w0, dtype=np.float64)
    w = w / np.linalg.norm(w)
    delta = np.inf
    it = 0
    for it in range(1, max_iters + 1):
        wn = tail_step_deflation(mw, w, k, lag)
        delta = 1.0 - abs(min(wn @ w, 1.0))
        w = wn
        if delta < tol:
            return TailIterate(w=w, delta=delta, iter=it, converged=True)
    return TailIterate(w=w, delta=delta, iter=it, converged=False)


def _random_unit(rng: np.random.Generator, n: int, found: np.ndarray | None) -> np.ndarray:
    """Seeded unit start vector, orthogonal to the components already found."""
    for _ in range(64):
        q, _ = np.linalg.qr(rng.normal(size=(n, n)))
        w = q[:, 0]
        if found is not None and len(found):
            w = w - found.T @ (found @ w)
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            return w / norm
    raise NumericalError("could not draw a start vector outside the found span")


def _deflation(base, lead, k, cfg: TailConfig, rng) -> np.ndarray:
    n = base.shape[1]
    found: list[np.ndarray] = []
    for comp in range(n):
        Vf = np.array(found) if found else None
        accepted = None
        for _attempt in range(1 + cfg.restarts):
            w = _random_unit(rng, n, Vf)
            converged = False
            for _ in range(cfg.max_iters):
                wn = _step(base, lead, w, k)
                if Vf is not None:
                    wn = wn - Vf.T @ (Vf @ wn)
                norm = np.linalg.norm(wn)
                if norm < _NORM_FLOOR:
                    break  # degenerate direction; restart
                wn = wn / norm
                if wn @ w < 0:
                    wn = -wn
                delta = 1.0 - abs(min(wn @ w, 1.0))
                w = wn
                if delta < cfg.tol:
                    converged = True
                    break
            if converged:
                accepted = w
                break
        if accepted is None:
            raise NoConvergence(comp, cfg.max_iters)
        found.append(accepted)
    return np.array(found)


def _qr_rows(W: np.ndarray) -> np.ndarray:
    """Orthonormalize rows in order (Gram-Schmidt via QR), signs fixed."""
    q, r = np.linalg.qr(W.T)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return (q * signs).T


def _parallel(base, lead, k, cfg: TailConfig, rng) -> np.ndarray:
    n = base.shape[1]
    npairs = base.shape[0]
    for _attempt in range(1 + cfg.restarts):
        W = _qr_rows(rng.normal(size=(n, n)))
        converged = False
        for _ in range(cfg.max_iters):
            U = base @ W.T
            Up = lead @ W.T
            grad = 0.5 * (base.T @ (Up ** (2 * k - 1)) + lead.T @ (U ** (2 * k - 1))) / npairs
            shift = (2 * k - 1) * np.mean(U ** (2 * k - 2), axis=0)
            Wn = grad.T - shift[:, None] * W
            Wn = _qr_rows(Wn)
            dots = np.abs(np.sum(Wn * W, axis=1))
            Wn = np.where((np.sum(Wn * W, axis=1) < 0)[:, None], -Wn, Wn)
            delta = float(np.max(1.0 - np.minimum(dots, 1.0)))
            W = Wn
            if delta < cfg.tol:
                converged = True
                break
        if converged:
            return W
    raise NoConvergence(None, cfg.max_iters)


def tail_solve(m: SeriesMatrix, est: EstimatorConfig, cfg: TailConfig) -> Decomposition:
    """Full tail decomposition of a panel.

    Whitens the (optionally centered) panel with ``c0^(-1/2)``, runs the
    fixed-point iteration in whitened coordinates, and maps the recovered
    directions back so the final rows satisfy ``W c0 W^T = I``. Components
    are sorted by tail autocorrelation, largest first; timescales apply the
    linear formula to the tail autocorrelation (an analogue; tail values
    above 1 are reported as ``+inf`` without a warning). The ``betas``
    field carries the Lagrange-multiplier estimates
    ``2k * mean(u^(2k-1) * (u_{t+L} - u_t) / L)``.
    """
    validate_series(m)
    lag = cfg.lag if cfg.lag is not None else est.lag
    if cfg.lag is not None and cfg.lag != est.lag:
        raise ConfigError(f"tail lag {cfg.lag} conflicts with estimator lag {est.lag}")
    pair = cov_pair(m, est)
    X = m.values - m.values.mean(axis=0) if est.center else m.values
    unwhiten = matrix_inv_sqrt(pair.c0)
    Z = X @ unwhiten
    base, lead = _lag_views(Z, lag)

    rng = np.random.default_rng(cfg.seed)
    if cfg.mode is TailMode.DEFLATION:
        V = _deflation(base, lead, cfg.k, cfg, rng)
        method = Method.TAIL_DEFLATION
    else:
        V = _parallel(base, lead, cfg.k, cfg, rng)
        method = Method.TAIL_PARALLEL

    lambdas = np.array([
        _projected_tail_autocorr(Z @ v, cfg.k, lag) for v in V
    ])
    betas = np.array([_beta_estimate(Z @ v, cfg.k, lag) for v in V])

    W = canonicalize_signs(V @ unwhiten)
    order = sorted(range(len(lambdas)), key=lambda i: (-lambdas[i], tuple(W[i])))
    W, lambdas, betas = W[order], lambdas[order], betas[order]

    gram = W @ pair.c0 @ W.T
    if np.max(np.abs(gram - np.eye(len(W)))) > _CONSTRAINT_TOL:
        raise NumericalError("tail weights lost c0-orthonormality")

    return Decomposition(
        weights=W,
        lambdas=lambdas,
        timescales=timescales(lambdas, lag, warn_above_one=False),
        lag=lag,
        order_k=cfg.k,
        method=method,
        fit_window=(int(m.timestamps[0]), int(m.timestamps[-1]) + 1),
        labels=m.labels,
        betas=betas,
    )


def _beta_estimate(u: np.ndarray, k: int, lag: int) -> float:
    base = u[: len(u) - lag]
    lead = u[lag:]
    return 2 * k * float(np.mean(base ** (2 * k - 1) * (lead - base))) / lag


def tail_beta(m: SeriesMatrix, w: np.ndarray, k: int, lag: int) -> LagrangeScalars:
    """Lagrange multiplier and tail autocorrelation of a projection.

    ``beta`` uses the forward difference ``(u_{t+lag} - u_t) / lag`` of the
    projected series; ``lam`` is the order-k tail autocorrelation of the
    same projection. Both are computed on the raw values.

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
    return LagrangeScalars(
        beta=_beta_estimate(u, k, lag),
        lam=_projected_tail_autocorr(u, k, lag),
        lag=lag,
    )

"""Synthetic multiscale panels with known ground truth.

Latents are independent AR(1) processes (the discrete Ornstein-Uhlenbeck
process), for which the lag-L autocorrelation is exactly ``phi**L`` and the
relaxation timescale formula is exact. Observed panels are static mixtures
of the latents. Everything is deterministic under the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from .core import Kind, SeriesMatrix
from .errors import BadSpec, ShapeMismatch

_BURN_IN = 1000


@dataclass(frozen=True)
class Innovation:
    """Innovation law of one latent: standard normal, or Student-t
    standardized to unit variance (requires dof > 2)."""

    law: str  # "gaussian" | "student-t"
    dof: float | None = None

    def __post_init__(self):
        if self.law not in ("gaussian", "student-t"):
            raise BadSpec(f"unknown innovation law {self.law!r}")
        if self.law == "student-t":
            if self.dof is None or self.dof <= 2:
                raise BadSpec("student-t innovations need dof > 2 (finite variance)")

    @staticmethod
    def parse(text: str) -> "Innovation":
        """Parse "gaussian" or "student-t:<dof>"."""
        if text == "gaussian":
            return Innovation("gaussian")
        if text.startswith("student-t:"):
            return Innovation("student-t", dof=float(text.split(":", 1)[1]))
        raise BadSpec(f"cannot parse innovation {text!r}")

    def __str__(self) -> str:
        return "gaussian" if self.law == "gaussian" else f"student-t:{self.dof:g}"


@dataclass(frozen=True)
class SynthSpec:
    """Description of a mixed AR(1) panel.

    ``phis`` are the per-component AR coefficients (all inside the unit
    interval), ``mixing`` an invertible matrix applied to the latent vector
    at each time step (None means identity), ``scales`` per-component
    innovation volatilities.
    """

    phis: tuple[float, ...]
    length: int
    seed: int = 0
    innovations: tuple[Innovation, ...] | None = None
    mixing: np.ndarray | None = None
    scales: tuple[float, ...] | None = None

    def __post_init__(self):
        phis = tuple(float(p) for p in self.phis)
        if not phis:
            raise BadSpec("need at least one component")
        if any(abs(p) >= 1 for p in phis):
            raise BadSpec("AR coefficients must satisfy |phi| < 1")
        if self.length < 2:
            raise BadSpec("length must be at least 2")
        n = len(phis)
        innov = self.innovations or tuple(Innovation("gaussian") for _ in range(n))
        if len(innov) != n:
            raise BadSpec("innovations must match the number of components")
        scales = self.scales or tuple(1.0 for _ in range(n))
        if len(scales) != n or any(s <= 0 for s in scales):
            raise BadSpec("scales must be positive, one per component")
        mixing = self.mixing
        if mixing is not None:
            mixing = np.asarray(mixing, dtype=np.float64)
            if mixing.shape != (n, n):
                raise BadSpec(f"mixing must be {n}x{n}")
            if np.linalg.cond(mixing) >= 1e6:
                raise BadSpec("mixing matrix is too ill-conditioned")
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "innovations", innov)
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "mixing", mixing)

    @property
    def n_components(self) -> int:
        return len(self.phis)


@dataclass(frozen=True)
class GroundTruth:
    """Exact generator facts retained for oracle checks."""

    phis: tuple[float, ...]
    latents: np.ndarray
    mixing: np.ndarray
    unmixing: np.ndarray
    innovations: tuple[Innovation, ...] = field(default=())

    def lag_autocorr(self, lag: int) -> np.ndarray:
        """Exact lag-``lag`` autocorrelation of each latent: ``phi**lag``."""
        return np.asarray(self.phis) ** lag

    def timescale(self, lag: int) -> np.ndarray:
        """Exact relaxation timescale of each latent at lag ``lag``."""
        rho = self.lag_autocorr(lag)
        return -2.0 * lag / (rho - 1.0)


def random_mixing(n: int, seed: int) -> np.ndarray:
    """A seeded random invertible matrix with moderate condition number."""
    rng = np.random.default_rng(seed)
    for _ in range(64):
        a = rng.normal(size=(n, n))
        if np.linalg.cond(a) < 1e3:
            return a
    raise BadSpec("failed to draw a well-conditioned mixing matrix")


def generate(spec: SynthSpec) -> tuple[SeriesMatrix, GroundTruth]:
    """Simulate the panel described by ``spec``.

    The AR recursion is run for 1000 burn-in steps that are discarded, so
    the retained sample is effectively stationary.
    """
    n = spec.n_components
    total = spec.length + _BURN_IN
    rng = np.random.default_rng(spec.seed)
    eps = np.empty((total, n))
    for j, law in enumerate(spec.innovations):
        if law.law == "gaussian":
            draw = rng.standard_normal(total)
        else:
            draw = rng.standard_t(law.dof, size=total)
            draw = draw / np.sqrt(law.dof / (law.dof - 2.0))
        eps[:, j] = spec.scales[j] * draw
    latents = np.empty((total, n))
    for j, phi in enumerate(spec.phis):
        latents[:, j] = scipy.signal.lfilter([1.0], [1.0, -phi], eps[:, j])
    latents = latents[_BURN_IN:]
    mixing = spec.mixing if spec.mixing is not None else np.eye(n)
    values = latents @ mixing.T
    m = SeriesMatrix(
        timestamps=np.arange(spec.length, dtype=np.int64),
        values=values,
        labels=tuple(f"x{i}" for i in range(n)),
        kind=Kind.RETURNS,
    )
    truth = GroundTruth(
        phis=spec.phis,
        latents=latents,
        mixing=np.array(mixing),
        unmixing=np.linalg.inv(mixing),
        innovations=spec.innovations,
    )
    return m, truth


def alignment_score(recovered: np.ndarray, truth: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Greedy maximum-|correlation| matching of two sets of series.

    ``recovered`` and ``truth`` are ``T x m`` column stacks. Returns
    ``(perm, scores)`` where ``perm[i]`` is the truth column matched to
    recovered column ``i`` and ``scores[i]`` the |correlation| of the pair.

    Raises
    ------
    ShapeMismatch
        Different series counts or lengths.
    """
    R = np.asarray(recovered, dtype=np.float64)
    S = np.asarray(truth, dtype=np.float64)
    if R.ndim != 2 or S.ndim != 2 or R.shape != S.shape:
        raise ShapeMismatch(f"series sets must have equal shape, got {R.shape} vs {S.shape}")
    m = R.shape[1]
    corr = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            c = np.corrcoef(R[:, i], S[:, j])[0, 1]
            corr[i, j] = 0.0 if not np.isfinite(c) else abs(c)
    perm = np.full(m, -1, dtype=np.int64)
    scores = np.zeros(m)
    open_rows = set(range(m))
    open_cols = set(range(m))
    for _ in range(m):
        best = max(((corr[i, j], i, j) for i in open_rows for j in open_cols),
                   key=lambda t: t[0])
        _, i, j = best
        perm[i] = j
        scores[i] = corr[i, j]
        open_rows.remove(i)
        open_cols.remove(j)
    return perm, scores

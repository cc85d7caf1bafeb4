"""Independent brute-force oracles.

Deliberately naive reference implementations (double loops, determinant
root scans). They share no code with the package and exist only to pin
expected values in tests.
"""

from __future__ import annotations

import numpy as np


def brute_covariance(values, center=True, rows=None):
    """Plain double-loop second-moment matrix over the first `rows` rows."""
    X = np.asarray(values, dtype=float)
    if rows is not None:
        X = X[:rows]
    T, n = X.shape
    mu = X.mean(axis=0) if center else np.zeros(n)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for t in range(T):
                s += (X[t, i] - mu[i]) * (X[t, j] - mu[j])
            out[i, j] = s / T
    return out


def brute_lagged_autocovariance(values, lag, center=True, denom=None):
    """Double-loop symmetrized lagged second moment.

    ``denom`` defaults to the number of (t, t+lag) pairs.
    """
    X = np.asarray(values, dtype=float)
    T, n = X.shape
    mu = X.mean(axis=0) if center else np.zeros(n)
    npairs = T - lag
    if denom is None:
        denom = npairs
    raw = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for t in range(npairs):
                s += (X[t + lag, i] - mu[i]) * (X[t, j] - mu[j])
            raw[i, j] = s / denom
    return 0.5 * (raw + raw.T)


def brute_tail_moment(values, w, k):
    X = np.asarray(values, dtype=float)
    w = np.asarray(w, dtype=float)
    T = X.shape[0]
    s = 0.0
    for t in range(T):
        s += float(X[t] @ w) ** (2 * k)
    return s / (2 * k * T)


def brute_tail_autocorrelation(values, w, k, lag):
    X = np.asarray(values, dtype=float)
    w = np.asarray(w, dtype=float)
    npairs = X.shape[0] - lag
    s = 0.0
    for t in range(npairs):
        s += float(X[t] @ w) ** (2 * k - 1) * float(X[t + lag] @ w)
    return s / npairs


def gev_root_scan(cT, c0, n_grid=20001, refine=200):
    """All real generalized eigenvalues of (cT, c0) via determinant sign scan.

    Scans det(cT - lam*c0) on a bracket derived from a crude norm bound,
    then bisects each sign change. Assumes distinct roots (fixtures are
    chosen that way).
    """
    cT = np.asarray(cT, dtype=float)
    c0 = np.asarray(c0, dtype=float)
    # crude bound: |lam| <= ||c0^-1 cT|| in any induced norm
    bound = np.linalg.norm(np.linalg.solve(c0, cT), ord="fro") + 1.0
    grid = np.linspace(-bound, bound, n_grid)
    vals = np.array([np.linalg.det(cT - lam * c0) for lam in grid])
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
            continue
        if vals[i] * vals[i + 1] < 0:
            a, b, fa = grid[i], grid[i + 1], vals[i]
            for _ in range(refine):
                mid = 0.5 * (a + b)
                fm = np.linalg.det(cT - mid * c0)
                if fm == 0.0:
                    a = b = mid
                    break
                if fa * fm < 0:
                    b = mid
                else:
                    a, fa = mid, fm
            roots.append(0.5 * (a + b))
    return np.sort(np.array(roots))[::-1]


def gev_eigenvector(cT, c0, lam):
    """Null-space direction of (cT - lam*c0) via SVD, unit Euclidean norm."""
    M = cT - lam * c0
    _, _, vt = np.linalg.svd(M)
    v = vt[-1]
    return v / np.linalg.norm(v)

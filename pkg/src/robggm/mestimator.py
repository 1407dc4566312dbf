"""t_nu M-estimation of multivariate location and scatter.

The estimator minimises

    sum_i rho(r_i) + n log det S,    rho(x) = (nu + p) log(1 + x / nu),

over location ``mu`` and positive definite scatter ``S``, where ``r_i`` is the
squared Mahalanobis distance of observation ``i``. ``nu = inf`` gives the
sample mean and the sample covariance with denominator ``n``.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import ConvergenceWarning, DegenerateData, InputError, NotPositiveDefinite
from .linalg import cholesky


@dataclass(frozen=True)
class DataMatrix:
    """An n x p numeric data set with column names."""

    values: np.ndarray
    column_names: tuple

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]


@dataclass
class ScatterFit:
    location: np.ndarray
    scatter: np.ndarray
    df: float
    iterations: int
    converged: bool
    final_step: float


def check_df(df):
    """Validate degrees of freedom; returns a float (possibly ``inf``)."""
    df = float(df)
    if math.isnan(df) or df <= 0:
        raise InputError(f"degrees of freedom must be positive, got {df}")
    if df <= 0.5:
        warnings.warn(
            f"df = {df} is very small; the M-estimator may not exist for this data",
            RuntimeWarning,
            stacklevel=3,
        )
    return df


def as_data(X):
    """Return the data as a finite float64 (n, p) array with n > p."""
    if isinstance(X, DataMatrix):
        X = X.values
    X = np.array(X, dtype=float)
    if X.ndim != 2:
        raise DegenerateData(f"data must be two-dimensional, got {X.ndim} dimension(s)")
    n, p = X.shape
    if p < 1 or n <= p:
        raise DegenerateData(f"need more observations than variables, got n={n}, p={p}")
    if not np.all(np.isfinite(X)):
        raise DegenerateData("data contain non-finite values")
    return X


def psi(x, df, p):
    """Weight function ``(nu + p) / (nu + x)``; identically one for ``nu = inf``."""
    x = np.asarray(x, dtype=float)
    if math.isinf(df):
        return np.ones_like(x)
    return (df + p) / (df + x)


def rho(x, df, p):
    """t_nu loss ``(nu + p) log(1 + x / nu)``; the identity for ``nu = inf``."""
    x = np.asarray(x, dtype=float)
    if math.isinf(df):
        return x
    return (df + p) * np.log1p(x / df)


def _mahalanobis_rows(X, mu, L):
    Z = linalg.solve_triangular(L, (X - mu).T, lower=True, check_finite=False)
    return np.sum(Z * Z, axis=0)


def mahalanobis_sq(x, mu, S):
    """Squared Mahalanobis distance ``(x - mu)' S^{-1} (x - mu)``.

    ``x`` may be a single vector or an (n, p) array of rows; the latter
    returns one distance per row.
    """
    L = cholesky(S)
    x = np.asarray(x, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if x.ndim == 1:
        return float(_mahalanobis_rows(x[None, :], mu, L)[0])
    return _mahalanobis_rows(x, mu, L)


def t_objective(X, mu, S, df):
    """Value of the t_nu M-estimation objective at ``(mu, S)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, p = X.shape
    L = cholesky(S)
    r = _mahalanobis_rows(X, np.asarray(mu, dtype=float), L)
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    return float(np.sum(rho(r, df, p)) + n * logdet)


def _weighted_moments(X, w, mu):
    Xc = X - mu
    return (Xc * w[:, None]).T @ Xc / X.shape[0]


def fit_t_m_estimator(X, df=3.0, tol=1e-8, max_iter=500, trace=None):
    """Fit the t_nu M-estimator of location and scatter by fixed-point iteration.

    Parameters
    ----------
    X : array_like or DataMatrix, shape (n, p)
        Observations in rows; ``n > p`` is required.
    df : float
        Degrees of freedom nu of the loss; ``math.inf`` gives the sample mean
        and covariance (denominator ``n``).
    tol : float
        Iteration stops once the relative Frobenius change of the scatter and
        the relative Euclidean change of the location both fall below ``tol``.
    max_iter : int
        Iteration limit. Reaching it emits a :class:`ConvergenceWarning` and
        returns the last iterate with ``converged=False``.
    trace : list, optional
        If given, the objective value after every iteration is appended.

    Returns
    -------
    ScatterFit
    """
    X = as_data(X)
    df = check_df(df)
    n, p = X.shape

    mu = X.mean(axis=0)
    S = _weighted_moments(X, np.ones(n), mu)
    try:
        L = cholesky(S)
    except NotPositiveDefinite:
        raise DegenerateData("sample covariance matrix is singular") from None

    if math.isinf(df):
        if trace is not None:
            trace.append(t_objective(X, mu, S, df))
        return ScatterFit(mu, S, df, iterations=1, converged=True, final_step=0.0)

    step = math.inf
    for it in range(1, max_iter + 1):
        w = psi(_mahalanobis_rows(X, mu, L), df, p)
        mu_new = w @ X / np.sum(w)
        S_new = _weighted_moments(X, w, mu_new)
        S_new = (S_new + S_new.T) / 2
        step_S = np.linalg.norm(S_new - S) / np.linalg.norm(S_new)
        step_mu = np.linalg.norm(mu_new - mu) / max(np.linalg.norm(mu_new), np.sqrt(np.trace(S_new) / p))
        step = max(step_S, step_mu)
        mu, S = mu_new, S_new
        L = cholesky(S)
        if trace is not None:
            trace.append(t_objective(X, mu, S, df))
        if step <= tol:
            return ScatterFit(mu, S, df, it, True, step)

    warnings.warn(
        f"t M-estimator did not converge in {max_iter} iterations (last step {step:.3g})",
        ConvergenceWarning,
        stacklevel=2,
    )
    return ScatterFit(mu, S, df, max_iter, False, step)


def estimating_equation_residuals(X, mu, S, df):
    """Relative residuals of the location and scatter estimating equations."""
    X = as_data(X)
    n, p = X.shape
    w = psi(mahalanobis_sq(X, mu, S), df, p)
    loc = np.linalg.norm(w @ (X - mu)) / np.linalg.norm(w @ X)
    M = _weighted_moments(X, w, mu)
    scat = np.linalg.norm(M - S) / np.linalg.norm(S)
    return loc, scat

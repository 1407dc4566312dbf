"""Partial correlations and the (pseudo-)deviance goodness-of-fit test."""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .constants import ConstantsQuery, find_sigma1
from .errors import ConflictingModeWarning, DimensionMismatch, InputError, NegativeDeviance
from .graph import missing_edge_count
from .graphfit import DIRECT, PLUG_IN, direct_fit, plug_in_fit
from .linalg import invert_pd, log_det_pd, to_correlation
from .mestimator import as_data, check_df

DEVIANCE_CLAMP = 1e-8


@dataclass
class TestResult:
    constrained_scatter: np.ndarray
    unconstrained_scatter: np.ndarray
    deviance: float
    df_chisq: int
    sigma1: float
    p_value: float
    mode: str
    df_est: float
    n: int
    converged: bool
    location: np.ndarray = None

    __test__ = False  # not a pytest class


def partial_correlations(S):
    """Partial correlation matrix ``-K_ij / sqrt(K_ii K_jj)`` with unit diagonal."""
    P = -to_correlation(invert_pd(S))
    np.fill_diagonal(P, 1.0)
    return P


def deviance(S_unconstrained, S_constrained, n):
    """``n (log det S_constrained - log det S_unconstrained)``.

    Values in ``[-1e-8 n, 0)`` are round-off of an exact fit and are returned
    as zero; anything more negative raises :class:`NegativeDeviance`.
    """
    S_unconstrained = np.asarray(S_unconstrained, dtype=float)
    S_constrained = np.asarray(S_constrained, dtype=float)
    if S_unconstrained.shape != S_constrained.shape:
        raise DimensionMismatch(
            f"scatter shapes differ: {S_unconstrained.shape} vs {S_constrained.shape}"
        )
    if n < 1:
        raise InputError(f"sample size must be positive, got {n}")
    D = n * (log_det_pd(S_constrained) - log_det_pd(S_unconstrained))
    if D < 0:
        if D < -DEVIANCE_CLAMP * n:
            raise NegativeDeviance(
                f"deviance {D:.6g} is negative; the constrained matrix was not fitted "
                "from the unconstrained one"
            )
        D = 0.0
    return float(D)


def chi_sq_sf(x, q):
    """Upper tail probability of the chi-square distribution with ``q`` degrees of freedom."""
    if x < 0:
        raise InputError(f"chi-square statistic must be non-negative, got {x}")
    if q < 1:
        raise InputError(f"chi-square degrees of freedom must be positive, got {q}")
    return float(special.gammaincc(q / 2.0, x / 2.0))


def resolve_mode(mode=None, *, plug_in=None, direct=None):
    """Choose between the plug-in and the direct estimator.

    ``mode`` may be given directly as ``"plug_in"`` or ``"direct"``.
    Otherwise the boolean flags decide: the direct estimator is used when
    ``direct=True`` or ``plug_in=False``. Contradicting flags
    (``plug_in=True, direct=True`` or both ``False``) fall back to the
    plug-in estimator with a :class:`ConflictingModeWarning`.
    """
    if mode is not None:
        if mode not in (PLUG_IN, DIRECT):
            raise InputError(f"unknown mode {mode!r}, expected 'plug_in' or 'direct'")
        if plug_in is None and direct is None:
            return mode
        # flags given alongside a mode are checked for consistency below
        wants = {PLUG_IN: (True, False), DIRECT: (False, True)}[mode]
        plug_in = wants[0] if plug_in is None else plug_in
        direct = wants[1] if direct is None else direct
    if plug_in is None and direct is None:
        return PLUG_IN
    if plug_in is None:
        return DIRECT if direct else PLUG_IN
    if direct is None:
        return PLUG_IN if plug_in else DIRECT
    if bool(plug_in) != bool(direct):
        return PLUG_IN if plug_in else DIRECT
    warnings.warn(
        "conflicting estimator options (plug_in and direct); plug_in has priority",
        ConflictingModeWarning,
        stacklevel=3,
    )
    return PLUG_IN


def default_sigma1(p, df_est):
    """``sigma1`` for the t_df M-estimator at Gaussian data."""
    return find_sigma1(ConstantsQuery(p, df_est, math.inf))


def p_value(D, q, sigma1):
    """Upper chi-square(q) tail probability of ``D / sigma1``; 1 when ``q == 0``."""
    if q == 0:
        return 1.0
    return chi_sq_sf(D / sigma1, q)


def deviance_test(
    X,
    G,
    df=3.0,
    mode=None,
    sigma1=None,
    *,
    plug_in=None,
    direct=None,
    tol=1e-8,
    max_iter=500,
):
    """Pseudo-deviance test of the graphical model ``G`` against the full model.

    Parameters
    ----------
    X : array_like or DataMatrix, shape (n, p)
    G : Graph
        Hypothesised graph on ``p`` vertices.
    df : float
        Degrees of freedom of the t M-estimator (``math.inf``: sample
        covariance).
    mode : {"plug_in", "direct"}, optional
        Constrained estimator; see :func:`resolve_mode` for the ``plug_in``
        and ``direct`` flags.
    sigma1 : float, optional
        Scale of the chi-square limit. Defaults to the value for the t_df
        M-estimator at Gaussian data.

    Returns
    -------
    TestResult
    """
    X = as_data(X)
    n, p = X.shape
    df = check_df(df)
    if G.p != p:
        raise DimensionMismatch(f"graph has {G.p} vertices, data have {p} columns")
    mode = resolve_mode(mode, plug_in=plug_in, direct=direct)
    if sigma1 is None:
        sigma1 = default_sigma1(p, df)
    elif not sigma1 > 0:
        raise InputError(f"sigma1 must be positive, got {sigma1}")

    if mode == DIRECT:
        fit = direct_fit(X, G, df, outer_tol=tol, max_iter=max_iter)
    else:
        fit = plug_in_fit(X, G, df, tol=tol, max_iter=max_iter)
    S_n = fit.unconstrained.scatter
    q = missing_edge_count(G)
    if q == 0:
        D = 0.0
    elif mode == DIRECT:
        # the direct fit is not a function of S_n, so small negative values
        # are legitimate sampling noise rather than a fitting error
        D = max(0.0, n * (log_det_pd(fit.scatter) - log_det_pd(S_n)))
    else:
        D = deviance(S_n, fit.scatter, n)
    return TestResult(
        constrained_scatter=fit.scatter,
        unconstrained_scatter=S_n,
        deviance=D,
        df_chisq=q,
        sigma1=float(sigma1),
        p_value=p_value(D, q, sigma1),
        mode=mode,
        df_est=df,
        n=n,
        converged=fit.converged,
        location=fit.location,
    )

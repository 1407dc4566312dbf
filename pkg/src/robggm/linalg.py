"""Dense symmetric positive definite matrix primitives.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. Functions in
this module never modify their arguments.
"""

import numpy as np
from scipy import linalg

from .errors import DimensionMismatch, NonPositiveDiagonal, NotPositiveDefinite, NotSymmetric

# pivots at or below this fraction of the largest diagonal entry are rejected
PIVOT_RTOL = 1e-14


def as_symmetric(A, atol=None):
    """Validate a square symmetric matrix and return an exactly symmetric copy.

    Asymmetry up to ``atol`` (default: 1e-10 times the largest absolute entry)
    is treated as round-off and averaged away.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NotSymmetric("matrix contains non-finite entries")
    if atol is None:
        atol = 1e-10 * max(np.max(np.abs(A)), 1.0)
    if np.max(np.abs(A - A.T)) > atol:
        raise NotSymmetric("matrix is not symmetric")
    return (A + A.T) / 2


def cholesky(A):
    """Lower Cholesky factor ``L`` with ``L @ L.T == A``.

    Raises
    ------
    NotPositiveDefinite
        If ``A`` is not positive definite, or a pivot ``L[i, i]**2`` is at or
        below ``1e-14 * max(diag(A))``.
    """
    A = as_symmetric(A)
    try:
        L = linalg.cholesky(A, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    dmax = np.max(np.diag(A))
    pivots = np.diag(L) ** 2
    if dmax <= 0 or np.min(pivots) <= PIVOT_RTOL * dmax:
        raise NotPositiveDefinite(
            f"smallest Cholesky pivot {np.min(pivots):.3g} is not positive relative "
            f"to the largest diagonal entry {dmax:.3g}"
        )
    return L


def log_det_pd(A):
    """log det A for positive definite A, computed from the Cholesky factor."""
    L = cholesky(A)
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def invert_pd(A):
    """Inverse of a positive definite matrix, symmetric by construction."""
    L = cholesky(A)
    inv = linalg.cho_solve((L, True), np.eye(L.shape[0]), check_finite=False)
    return (inv + inv.T) / 2


def to_correlation(A):
    """Scale a matrix with positive diagonal to unit diagonal.

    >>> to_correlation([[4.0, 2.0], [2.0, 4.0]])
    array([[1. , 0.5],
           [0.5, 1. ]])
    """
    A = as_symmetric(A)
    d = np.diag(A)
    if np.any(d <= 0):
        raise NonPositiveDiagonal("correlation scaling needs a strictly positive diagonal")
    s = np.sqrt(d)
    R = A / np.outer(s, s)
    np.fill_diagonal(R, 1.0)
    return R

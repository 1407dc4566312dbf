"""Graph-constrained scatter estimation.

Two estimators are provided:

* the plug-in estimator, which fits a Gaussian graphical model to an
  unconstrained scatter estimate, and
* the direct estimator, which minimises the t_nu M-estimation objective over
  scatter matrices whose inverse has zeros at the missing edges of the graph.
  It is computed by nesting the Gaussian graph fit inside the reweighting
  loop of the M-estimator.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceWarning, DimensionMismatch
from .graph import Graph
from .linalg import as_symmetric, cholesky, invert_pd
from .mestimator import ScatterFit, _weighted_moments, as_data, check_df, fit_t_m_estimator, mahalanobis_sq, psi

PLUG_IN = "plug_in"
DIRECT = "direct"


@dataclass
class ConstrainedFit:
    scatter: np.ndarray
    location: np.ndarray
    graph: Graph
    mode: str
    inner_iterations: int
    outer_iterations: int
    converged: bool
    unconstrained: ScatterFit = None


def constraint_violations(S_in, S_G, G):
    """Violations of the two Gaussian graph-fit estimating equations.

    Returns ``(moment, zero)``: the largest deviation of ``S_G`` from ``S_in``
    on edges and the diagonal relative to ``max|S_in|``, and the largest
    absolute entry of ``inv(S_G)`` at a missing edge relative to the largest
    absolute entry of the inverse.
    """
    S_in = np.asarray(S_in, dtype=float)
    mask = G.adjacency().astype(bool)
    moment = np.max(np.abs(S_G - S_in)[mask]) / np.max(np.abs(S_in))
    missing = G.missing_edges
    if not missing:
        return moment, 0.0
    K = invert_pd(S_G)
    rows, cols = zip(*missing)
    zero = np.max(np.abs(K[rows, cols])) / np.max(np.abs(K))
    return moment, zero


def fit_gaussian_graph(S_in, G, tol=1e-10, max_iter=5000):
    """Maximum likelihood covariance under the Gaussian graphical model ``G``.

    Solves for ``W`` with ``W[i, j] == S_in[i, j]`` on the edges and the
    diagonal and ``inv(W)[i, j] == 0`` at the missing edges. Each sweep
    regresses one vertex on its neighbours using the current ``W`` and
    overwrites the corresponding row and column (Hastie, Tibshirani and
    Friedman, Elements of Statistical Learning, Algorithm 17.1). The moment
    equations therefore hold after every sweep and convergence is declared
    once the zero pattern of the inverse is met to ``tol``.

    Returns
    -------
    ConstrainedFit
        ``location`` is left empty (``None``), ``mode`` is ``"plug_in"``.
    """
    S_in = as_symmetric(S_in)
    p = S_in.shape[0]
    if G.p != p:
        raise DimensionMismatch(f"graph has {G.p} vertices, matrix is {p} x {p}")
    cholesky(S_in)

    if G.is_full():
        return ConstrainedFit(S_in.copy(), None, G, PLUG_IN, 0, 0, True)
    if not G.edges:
        return ConstrainedFit(np.diag(np.diag(S_in)), None, G, PLUG_IN, 0, 0, True)

    neighbors = [np.array(G.neighbors(j), dtype=int) for j in range(p)]
    W = S_in.copy()
    zero = math.inf
    for it in range(1, max_iter + 1):
        for j in range(p):
            nb = neighbors[j]
            others = np.delete(np.arange(p), j)
            if nb.size == 0:
                w12 = np.zeros(p - 1)
            else:
                beta = np.linalg.solve(W[np.ix_(nb, nb)], S_in[nb, j])
                w12 = W[np.ix_(others, nb)] @ beta
            W[others, j] = w12
            W[j, others] = w12
        _, zero = constraint_violations(S_in, W, G)
        if zero <= tol:
            return ConstrainedFit(W, None, G, PLUG_IN, it, 0, True)

    warnings.warn(
        f"Gaussian graph fit did not converge in {max_iter} sweeps "
        f"(zero-pattern violation {zero:.3g})",
        ConvergenceWarning,
        stacklevel=2,
    )
    return ConstrainedFit(W, None, G, PLUG_IN, max_iter, 0, False)


def plug_in_fit(X, G, df=3.0, tol=1e-8, max_iter=500):
    """Gaussian graph fit applied to the unconstrained t_nu M-estimate."""
    X = as_data(X)
    if G.p != X.shape[1]:
        raise DimensionMismatch(f"graph has {G.p} vertices, data have {X.shape[1]} columns")
    unconstrained = fit_t_m_estimator(X, df, tol=tol, max_iter=max_iter)
    fit = fit_gaussian_graph(unconstrained.scatter, G)
    fit.location = unconstrained.location
    fit.outer_iterations = unconstrained.iterations
    fit.converged = fit.converged and unconstrained.converged
    fit.unconstrained = unconstrained
    return fit


def direct_fit(X, G, df=3.0, inner_tol=1e-10, outer_tol=1e-8, max_outer=200, max_iter=500):
    """Direct graph-constrained t_nu M-estimator.

    The iteration starts at the plug-in solution. Every outer step computes
    weights ``psi(r_i)`` from the current fit, updates the location to the
    weighted mean and then refits the scatter as the Gaussian graph fit of
    the weighted second-moment matrix. It stops once the relative changes of
    location and scatter fall below ``outer_tol``.

    ``max_iter`` bounds the unconstrained M-estimation used for the start.
    """
    X = as_data(X)
    df = check_df(df)
    n, p = X.shape
    start = plug_in_fit(X, G, df, tol=outer_tol, max_iter=max_iter)
    mu, S = start.location, start.scatter
    inner_total = start.inner_iterations
    step = math.inf
    for it in range(1, max_outer + 1):
        w = psi(mahalanobis_sq(X, mu, S), df, p)
        mu_new = w @ X / np.sum(w)
        M = _weighted_moments(X, w, mu_new)
        inner = fit_gaussian_graph((M + M.T) / 2, G, tol=inner_tol)
        S_new = inner.scatter
        inner_total += inner.inner_iterations
        step_S = np.linalg.norm(S_new - S) / np.linalg.norm(S_new)
        step_mu = np.linalg.norm(mu_new - mu) / max(np.linalg.norm(mu_new), np.sqrt(np.trace(S_new) / p))
        step = max(step_S, step_mu)
        mu, S = mu_new, S_new
        if step <= outer_tol:
            return ConstrainedFit(S, mu, G, DIRECT, inner_total, it, inner.converged, start.unconstrained)

    warnings.warn(
        f"direct estimator did not converge in {max_outer} outer iterations (last step {step:.3g})",
        ConvergenceWarning,
        stacklevel=2,
    )
    return ConstrainedFit(S, mu, G, DIRECT, inner_total, max_outer, False, start.unconstrained)


def direct_equation_residuals(X, fit, df):
    """Residuals of the direct estimator's three groups of estimating equations.

    Returns ``(location, moment, zero)`` as relative errors.
    """
    X = as_data(X)
    p = X.shape[1]
    w = psi(mahalanobis_sq(X, fit.location, fit.scatter), df, p)
    loc = np.linalg.norm(w @ (X - fit.location)) / np.linalg.norm(w @ X)
    M = _weighted_moments(X, w, fit.location)
    moment, zero = constraint_violations(M, fit.scatter, fit.graph)
    return loc, moment, zero

"""Explorative graph selection by backward edge removal.

Every p-value produced here compares a candidate graph with the full model.
Because the candidates are chosen from the data, these p-values guide the
search only. They are not valid tests of the selected graph.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .graph import Graph
from .inference import deviance_test, partial_correlations
from .mestimator import as_data

EXPLORATIVE_NOTE = (
    "explorative model search: p-values of data-selected graphs are not valid tests"
)


@dataclass
class SearchStep:
    graph: Graph
    deviance: float
    p_value: float
    removed_edge: tuple = None


@dataclass
class SearchTrace:
    """Accepted graphs in order, plus the candidate that ended the search.

    ``steps[0]`` is the start graph; every later step has exactly one edge
    fewer than its predecessor. ``accepted`` is False only when the start
    graph itself was rejected.
    """

    steps: list
    final_graph: Graph
    accepted: bool
    rejected: SearchStep = None
    alpha: float = None
    note: str = field(default=EXPLORATIVE_NOTE)


def threshold_graph(P, tau, labels=None):
    """Graph with an edge wherever ``|P[i, j]| > tau``."""
    P = np.asarray(P, dtype=float)
    if not 0 <= tau < 1:
        raise InputError(f"threshold must lie in [0, 1), got {tau}")
    p = P.shape[0]
    edges = {(i, j) for i in range(p) for j in range(i + 1, p) if abs(P[i, j]) > tau}
    return Graph(p, frozenset(edges), labels)


def _weakest_edge(G, P):
    # ties go to the lexicographically smallest edge
    return min(G.sorted_edges(), key=lambda e: (abs(P[e]), e))


def backward_search(X, df=3.0, alpha=0.05, mode=None, start=None, tau=None, labels=None, **test_kwargs):
    """Backward stepwise removal of the weakest edge while the deviance test accepts.

    Parameters
    ----------
    X : array_like or DataMatrix
    df : float
        Degrees of freedom of the t M-estimator.
    alpha : float
        A candidate graph is kept when its p-value is at least ``alpha``.
    mode : {"plug_in", "direct"}, optional
    start : Graph, optional
        Start graph. Defaults to the full graph, or to the thresholded
        unconstrained partial correlations when ``tau`` is given.
    tau : float, optional
        Partial-correlation threshold for the start graph.
    **test_kwargs
        Passed on to :func:`deviance_test` (``sigma1``, ``tol``, ...).

    Returns
    -------
    SearchTrace
    """
    if not 0 < alpha < 1:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    X = as_data(X)
    p = X.shape[1]
    if start is not None and tau is not None:
        raise InputError("give either a start graph or a threshold, not both")
    if start is None:
        start = Graph.full(p, labels)
        if tau is not None:
            full = deviance_test(X, start, df, mode, **test_kwargs)
            start = threshold_graph(partial_correlations(full.unconstrained_scatter), tau, start.labels)

    result = deviance_test(X, start, df, mode, **test_kwargs)
    current = SearchStep(start, result.deviance, result.p_value)
    if result.p_value < alpha:
        return SearchTrace([current], start, False, alpha=alpha)

    steps = [current]
    rejected = None
    while current.graph.edges:
        P = partial_correlations(result.constrained_scatter)
        edge = _weakest_edge(current.graph, P)
        candidate = current.graph.remove_edge(*edge)
        cand_result = deviance_test(X, candidate, df, mode, **test_kwargs)
        step = SearchStep(candidate, cand_result.deviance, cand_result.p_value, edge)
        if cand_result.p_value < alpha:
            rejected = step
            break
        steps.append(step)
        current, result = step, cand_result
    return SearchTrace(steps, current.graph, True, rejected, alpha)

"""Robust fitting and testing of Gaussian graphical models.

Scatter is estimated by t_nu M-estimation, graph-constrained fits are
obtained either by plugging the robust estimate into the Gaussian graph fit
or directly, and graphs are tested with the sigma1-scaled pseudo-deviance.
"""

__version__ = "0.1.0"

from .constants import ConstantsQuery, find_eta, find_sigma1, find_sigma2, t_density_constant
from .graph import Graph, missing_edge_count, parse_adjacency, to_dot
from .graphfit import ConstrainedFit, direct_fit, fit_gaussian_graph, plug_in_fit
from .inference import TestResult, chi_sq_sf, deviance, deviance_test, partial_correlations
from .io import ingest_adjacency, ingest_csv
from .linalg import cholesky, invert_pd, log_det_pd, to_correlation
from .mestimator import DataMatrix, ScatterFit, fit_t_m_estimator, mahalanobis_sq, t_objective
from .search import SearchTrace, backward_search, threshold_graph

__all__ = [
    "ConstantsQuery", "ConstrainedFit", "DataMatrix", "Graph", "ScatterFit", "SearchTrace",
    "TestResult", "backward_search", "chi_sq_sf", "cholesky", "deviance", "deviance_test",
    "direct_fit", "find_eta", "find_sigma1", "find_sigma2", "fit_gaussian_graph",
    "fit_t_m_estimator", "ingest_adjacency", "ingest_csv", "invert_pd", "log_det_pd",
    "mahalanobis_sq", "missing_edge_count", "parse_adjacency", "partial_correlations",
    "plug_in_fit", "t_density_constant", "t_objective", "threshold_graph", "to_correlation",
    "to_dot",
]

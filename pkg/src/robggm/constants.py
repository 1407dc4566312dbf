"""Asymptotic constants of t_nu M-estimators of scatter at elliptical laws.

For an affine equivariant scatter estimator at an elliptical population with
shape matrix ``S``, the estimator converges to ``eta * S`` and its asymptotic
covariance is determined by two scalars ``sigma1`` and ``sigma2`` (Tyler,
1982). For M-estimators they are expectations over the radial variable
``R = (X - mu)' S^{-1} (X - mu)`` (Tyler, 1983):

    E phi(R / eta) = p
    gamma1 = E phi(R / eta)^2 / (p (p + 2))
    gamma2 = E (R / eta) phi'(R / eta) / p
    sigma1 = (p + 2)^2 gamma1 / (2 gamma2 + p)^2
    sigma2 = [gamma1 - 1 - 2 gamma1 (gamma2 - 1)(p + (p + 4) gamma2) / (2 gamma2 + p)^2] / gamma2^2

with ``phi(x) = x psi(x)``. ``R`` is chi-square(p) for Gaussian data and
``p * F(p, nu)`` for elliptical t_nu data.

``df_est = 0`` denotes Tyler's distribution-free estimator, for which
``sigma1 = 1 + 2/p`` at every elliptical law.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special, stats

from .errors import BracketFailure, IntegrationFailure, InvalidQuery

QUAD_EPSABS = 1e-10
QUAD_MAX_ERROR = 1e-8
ETA_BRACKET = (1e-6, 1e6)
ETA_MAX_EXPANSION = 1e6


def _as_df(value, name):
    value = float(value)
    if math.isnan(value) or value < 0:
        raise InvalidQuery(f"{name} must be non-negative, got {value}")
    return value


@dataclass(frozen=True)
class ConstantsQuery:
    """Dimension ``p``, estimator degrees of freedom and population degrees of freedom.

    ``df_est = inf`` is the sample covariance, ``df_est = 0`` Tyler's
    estimator; ``df_data = inf`` is the normal distribution.
    """

    p: int
    df_est: float = 3.0
    df_data: float = math.inf

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 2:
            raise InvalidQuery(f"dimension p must be an integer >= 2, got {self.p}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "df_est", _as_df(self.df_est, "df_est"))
        df_data = _as_df(self.df_data, "df_data")
        if df_data == 0:
            raise InvalidQuery("df_data = 0 is not allowed (there is no t_0 distribution)")
        object.__setattr__(self, "df_data", df_data)

    @property
    def law(self):
        return RadialLaw(self.p, self.df_data)


@dataclass(frozen=True)
class RadialLaw:
    """Law of the squared Mahalanobis distance of an elliptical observation."""

    p: int
    df_data: float = math.inf

    @property
    def distribution(self):
        """Frozen ``scipy.stats`` distribution of R (for sampling and checks)."""
        if math.isinf(self.df_data):
            return stats.chi2(self.p)
        return stats.f(self.p, self.df_data, scale=self.p)

    def _log_norm(self):
        k = self.p / 2
        if math.isinf(self.df_data):
            return -k * math.log(2.0) - math.lgamma(k)
        nu = self.df_data
        return math.lgamma(k + nu / 2) - math.lgamma(k) - math.lgamma(nu / 2) - k * math.log(nu)

    def pdf(self, r):
        """Density of R at a scalar ``r > 0``."""
        # scipy.stats pdf calls are too slow inside scalar quadrature loops
        k = self.p / 2
        if math.isinf(self.df_data):
            kernel = (k - 1) * math.log(r) - r / 2
        else:
            nu = self.df_data
            kernel = (k - 1) * math.log(r) - (k + nu / 2) * math.log1p(r / nu)
        return math.exp(self._log_norm() + kernel)


@dataclass(frozen=True)
class LossDerivatives:
    """``psi``, ``phi`` and ``phi'`` of the t_nu loss; ``df_est = inf`` is the Gaussian loss."""

    df_est: float
    p: int

    def psi(self, x):
        if math.isinf(self.df_est):
            return np.ones_like(np.asarray(x, dtype=float))
        return (self.df_est + self.p) / (self.df_est + x)

    def phi(self, x):
        if math.isinf(self.df_est):
            return np.asarray(x, dtype=float)
        return x * (self.df_est + self.p) / (self.df_est + x)

    def dphi(self, x):
        if math.isinf(self.df_est):
            return np.ones_like(np.asarray(x, dtype=float))
        nu = self.df_est
        return nu * (nu + self.p) / (nu + x) ** 2


def radial_expectation(f, law):
    """``E f(R)`` by adaptive quadrature.

    The half line is mapped onto ``[0, 1)`` by ``r = p (u / (1 - u))^2``.
    The square keeps the transformed integrand bounded at ``u = 1`` even
    for Cauchy-like tails, where ``r = p t / (1 - t)`` leaves an
    inverse square-root singularity.

    Raises
    ------
    IntegrationFailure
        If the quadrature error estimate exceeds ``1e-8 * max(1, |E f(R)|)``
        or the result is not finite (for instance when the moment does not exist).
    """
    scale = float(law.p)

    def integrand(u):
        if u >= 1.0:
            return 0.0
        ratio = u / (1.0 - u)
        r = scale * ratio * ratio
        if r <= 0.0:
            return 0.0
        dens = law.pdf(r)
        if dens == 0.0:
            return 0.0
        return float(f(r)) * dens * 2.0 * scale * ratio / (1.0 - u) ** 2

    try:
        with np.errstate(over="ignore", invalid="ignore"):
            value, err = integrate.quad(
                integrand, 0.0, 1.0, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=500, full_output=1
            )[:2]
    except (OverflowError, ZeroDivisionError) as exc:
        raise IntegrationFailure(f"quadrature failed: {exc}") from None
    # the bound is absolute for O(1) expectations and relative beyond
    if not math.isfinite(value) or not err <= QUAD_MAX_ERROR * max(1.0, abs(value)):
        raise IntegrationFailure(
            f"quadrature error estimate {err:.3g} exceeds {QUAD_MAX_ERROR:g} "
            "(the expectation may not exist for this law)"
        )
    return value


def _check_moments(q, order):
    # E R^k is finite under p F(p, nu) only for k < nu / 2; the Gaussian loss
    # has unbounded phi and needs it, bounded t losses do not.
    if math.isinf(q.df_est) and not math.isinf(q.df_data) and q.df_data <= 2 * order:
        raise InvalidQuery(
            f"the sample covariance needs finite moments of order {2 * order}; "
            f"t_{q.df_data:g} data have none"
        )


def find_eta(q):
    """Consistency factor ``eta`` solving ``E phi(R / eta) = p``."""
    if q.df_est == 0:
        raise InvalidQuery("eta is not defined for Tyler's estimator (df_est = 0)")
    _check_moments(q, 1)
    loss, law, p = LossDerivatives(q.df_est, q.p), q.law, q.p

    def h(eta):
        return radial_expectation(lambda r: loss.phi(r / eta), law) - p

    lo, hi = ETA_BRACKET
    h_lo, h_hi = h(lo), h(hi)
    expansion = 1.0
    # h is strictly decreasing: positive for small eta, negative for large
    while (h_lo <= 0 or h_hi >= 0) and expansion < ETA_MAX_EXPANSION:
        expansion *= 10.0
        if h_lo <= 0:
            lo /= 10.0
            h_lo = h(lo)
        if h_hi >= 0:
            hi *= 10.0
            h_hi = h(hi)
    if h_lo <= 0 or h_hi >= 0:
        raise BracketFailure(f"E phi(R/eta) - p does not change sign on [{lo:g}, {hi:g}]")
    return optimize.brentq(h, lo, hi, xtol=1e-300, rtol=1e-14, maxiter=500)


def _gammas(q):
    _check_moments(q, 2)
    eta = find_eta(q)
    loss, law, p = LossDerivatives(q.df_est, q.p), q.law, q.p
    gamma1 = radial_expectation(lambda r: loss.phi(r / eta) ** 2, law) / (p * (p + 2))
    gamma2 = radial_expectation(lambda r: (r / eta) * loss.dphi(r / eta), law) / p
    return eta, gamma1, gamma2


def _sigma1(p, g1, g2):
    return (p + 2) ** 2 * g1 / (2 * g2 + p) ** 2


def _sigma2(p, g1, g2):
    return (g1 - 1 - 2 * g1 * (g2 - 1) * (p + (p + 4) * g2) / (2 * g2 + p) ** 2) / g2**2


def find_sigma1(q):
    """Scale factor of the chi-square limit of scale-invariant statistics."""
    p = q.p
    if q.df_est == 0:
        return 1.0 + 2.0 / p
    _, g1, g2 = _gammas(q)
    return _sigma1(p, g1, g2)


def find_sigma2(q):
    """Second asymptotic variance constant; not defined for Tyler's estimator."""
    if q.df_est == 0:
        raise InvalidQuery("sigma2 is not available for Tyler's estimator (df_est = 0)")
    p = q.p
    _, g1, g2 = _gammas(q)
    return _sigma2(p, g1, g2)


def find_constants(q):
    """``{"eta", "sigma1", "sigma2"}`` for a query; Tyler queries give ``None`` for the others."""
    if q.df_est == 0:
        return {"eta": None, "sigma1": find_sigma1(q), "sigma2": None}
    eta, g1, g2 = _gammas(q)
    p = q.p
    return {"eta": eta, "sigma1": _sigma1(p, g1, g2), "sigma2": _sigma2(p, g1, g2)}


def log_t_density_constant(p, df):
    """Logarithm of the normalising constant of the elliptical t_nu density."""
    df = float(df)
    if not df > 0:
        raise InvalidQuery(f"df must be positive, got {df}")
    return special.gammaln((df + p) / 2) - (p / 2) * math.log(df * math.pi) - special.gammaln(df / 2)


def t_density_constant(p, df):
    """``Gamma((nu + p)/2) / ((nu pi)^(p/2) Gamma(nu/2))``."""
    return math.exp(log_t_density_constant(p, df))

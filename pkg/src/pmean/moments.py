"""Gaussian shift moments and the nine-row regime table.

The central objects are the moment functions

    lambda_p(s)   = E|Z + s|^p                     (p > -1)
    lambda_pm(s)  = E| |Z+s|^p - lambda_p(s) |^m   (p > -1/m)
    log-moments   E ln|Z+s| and central absolute powers of ln|Z+s|
    mu_tilde_d(s) = E(|Z+s|^{-1} /\\ d)
    lambda_inf(s) = -ln P(|Z+s| <= c_{d,alpha})

and the regime table mapping each exponent p in [-inf, inf] to the triple
(f_p, kappa_p, K_{alpha,beta;p}) that characterizes asymptotically sufficient
shifts through  sum_j f_p(s_j) ~ K * kappa_p(d).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln, log_ndtr, ndtri

from .numcore import DEFAULT_QUAD, DomainError, Quadrature, gauss_expect

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

# Exact-equality dispatch at p in {-1, -1/2, 0}; values within BOUNDARY_EPS of a
# boundary are snapped onto it (the regimes have different rates, so nearby
# finite p does not approximate the boundary row).
BOUNDARY_EPS = 1e-12
_BOUNDARIES = (-1.0, -0.5, 0.0)


class Regime(enum.Enum):
    NEG_INF = "p = -inf"
    BELOW_NEG_ONE = "p in (-inf, -1)"
    NEG_ONE = "p = -1"
    NEG_ONE_TO_NEG_HALF = "p in (-1, -1/2)"
    NEG_HALF = "p = -1/2"
    NEG_HALF_TO_ZERO = "p in (-1/2, 0)"
    ZERO = "p = 0"
    ZERO_TO_INF = "p in (0, inf)"
    POS_INF = "p = +inf"


@dataclass(frozen=True)
class ExtendedP:
    """Exponent on the extended real line with exact regime classification."""

    value: float

    @staticmethod
    def of(p) -> "ExtendedP":
        if isinstance(p, ExtendedP):
            return p
        v = float(p)
        if math.isnan(v):
            raise DomainError("p must not be NaN")
        for b in _BOUNDARIES:
            if v != b and abs(v - b) <= BOUNDARY_EPS:
                warnings.warn(
                    f"p={v!r} snapped to boundary {b}; boundary regimes have "
                    f"their own rates", stacklevel=2)
                v = b
                break
        return ExtendedP(v)

    @property
    def regime(self) -> Regime:
        v = self.value
        if v == -math.inf:
            return Regime.NEG_INF
        if v == math.inf:
            return Regime.POS_INF
        if v == -1.0:
            return Regime.NEG_ONE
        if v == -0.5:
            return Regime.NEG_HALF
        if v == 0.0:
            return Regime.ZERO
        if v < -1.0:
            return Regime.BELOW_NEG_ONE
        if v < -0.5:
            return Regime.NEG_ONE_TO_NEG_HALF
        if v < 0.0:
            return Regime.NEG_HALF_TO_ZERO
        return Regime.ZERO_TO_INF

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self) -> float:
        return self.value


# ---------------------------------------------------------------------------
# Moment functions
# ---------------------------------------------------------------------------

def lambda_p_zero(p: float) -> float:
    """Closed form lambda_p(0) = 2^{p/2} Gamma((p+1)/2) / sqrt(pi), p > -1."""
    if p <= -1.0:
        raise DomainError(f"lambda_p(0) requires p > -1, got {p}")
    return math.exp(0.5 * p * math.log(2.0) + gammaln(0.5 * (p + 1.0)) - 0.5 * math.log(math.pi))


@lru_cache(maxsize=200_000)
def _lambda_p_cached(p: float, s: float, abs_tol: float, rel_tol: float) -> float:
    quad = Quadrature(abs_tol=abs_tol, rel_tol=rel_tol, max_subdiv=300, points=(0.0,))
    return gauss_expect(lambda y: abs(y) ** p, s, quad)


def lambda_p(p: float, s: float, quad: Quadrature = DEFAULT_QUAD) -> float:
    """E|Z + s|^p by singularity-split quadrature; requires p > -1."""
    if p <= -1.0:
        raise DomainError(f"lambda_p requires p > -1 (moment infinite), got p={p}")
    return _lambda_p_cached(float(p), float(abs(s)), quad.abs_tol, quad.rel_tol)


def lambda_pm(p: float, m: float, s: float, quad: Quadrature = DEFAULT_QUAD) -> float:
    """Central absolute moment E||Z+s|^p - lambda_p(s)|^m; requires p > -1/m."""
    if m <= 0:
        raise DomainError(f"lambda_pm requires m > 0, got m={m}")
    if p <= -1.0 / m:
        raise DomainError(f"lambda_pm requires p > -1/m = {-1.0/m}, got p={p}")
    if m == 2.0 and 2.0 * p > -1.0:
        # lambda_{p,2}(s) = lambda_{2p}(s) - lambda_p(s)^2, numerically stabler
        return lambda_p(2.0 * p, s, quad) - lambda_p(p, s, quad) ** 2
    c = lambda_p(p, s, quad)
    pts = [0.0]
    if p != 0.0 and c > 0.0:
        r = c ** (1.0 / p)
        pts += [-r, r]
    q = Quadrature(abs_tol=quad.abs_tol, rel_tol=quad.rel_tol,
                   max_subdiv=max(quad.max_subdiv, 300), points=tuple(pts))
    return gauss_expect(lambda y: abs(abs(y) ** p - c) ** m, s, q)


@lru_cache(maxsize=100_000)
def _log_mean_cached(s: float) -> float:
    quad = Quadrature(max_subdiv=300, points=(0.0,))
    return gauss_expect(lambda y: math.log(abs(y)) if y != 0.0 else -math.inf, s, quad)


def log_moment(m: int, s: float, quad: Quadrature = DEFAULT_QUAD) -> float:
    """E ln|Z+s| for m = 1; central moments E|ln|Z+s| - E ln|Z+s||^m for m in {2, 3}."""
    if m not in (1, 2, 3):
        raise DomainError(f"log_moment supports m in {{1,2,3}}, got {m}")
    s = float(abs(s))
    mean = _log_mean_cached(s)
    if m == 1:
        return mean
    if m == 2:
        # Var ln|Z+s| = E ln^2|Z+s| - (E ln|Z+s|)^2
        q = Quadrature(abs_tol=quad.abs_tol, rel_tol=quad.rel_tol,
                       max_subdiv=300, points=(0.0,))
        second = gauss_expect(lambda y: math.log(abs(y)) ** 2, s, q)
        return second - mean ** 2
    r = math.exp(mean)
    q = Quadrature(abs_tol=quad.abs_tol, rel_tol=quad.rel_tol,
                   max_subdiv=300, points=(0.0, -r, r))
    return gauss_expect(lambda y: abs(math.log(abs(y)) - mean) ** 3, s, q)


@lru_cache(maxsize=100_000)
def _mu_tilde_cached(d: int, s: float) -> float:
    inv = 1.0 / d
    quad = Quadrature(max_subdiv=300, points=(-inv, 0.0, inv))
    return gauss_expect(lambda y: min(1.0 / abs(y), float(d)) if y != 0.0 else float(d), s, quad)


def mu_tilde(d: int, s: float) -> float:
    """Truncated inverse moment E(|Z+s|^{-1} /\\ d), d >= 1."""
    if d < 1:
        raise DomainError(f"mu_tilde requires d >= 1, got {d}")
    return _mu_tilde_cached(int(d), float(abs(s)))


def c_crit_inf(d: int, alpha: float) -> float:
    """The p = +inf critical-value scale c_{d,alpha} = sqrt(2 ln(-d / (sqrt(pi ln d) ln(1-alpha))))."""
    if d < 2:
        raise DomainError(f"c_crit_inf requires d >= 2, got {d}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0,1), got {alpha}")
    arg = -d / math.sqrt(math.pi * math.log(d)) / math.log1p(-alpha)
    if arg <= 1.0:
        raise DomainError(f"degenerate c_{{d,alpha}}: inner log argument {arg} <= 1")
    return math.sqrt(2.0 * math.log(arg))


def _log_prob_abs_le(c: float, s: float) -> float:
    """ln P(|Z+s| <= c), stable far into the tails."""
    s = abs(s)
    hi = log_ndtr(c - s)
    lo = log_ndtr(-c - s)
    # ln(e^hi - e^lo)
    return hi + math.log1p(-math.exp(min(lo - hi, -1e-300)))


def lambda_inf(d: int, alpha: float, s: float) -> float:
    """-ln P(|Z+s| <= c_{d,alpha})."""
    c = c_crit_inf(d, alpha)
    return -_log_prob_abs_le(c, s)


def b_p(p: float) -> float:
    """Drift characteristic of the limiting stable law (only defined for p < -1/2)."""
    if p == -1.0:
        return -SQRT_2_OVER_PI
    if p < -0.5:
        return -SQRT_2_OVER_PI / (p + 1.0)
    raise DomainError(f"b_p is defined for p in (-inf, -1/2), got {p}")


# ---------------------------------------------------------------------------
# Regime table
# ---------------------------------------------------------------------------

def _vectorized(scalar_fn: Callable[[float], float]) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorize a scalar s->f(s) by evaluating once per distinct |s|."""

    def wrapped(s):
        arr = np.abs(np.asarray(s, dtype=float))
        if arr.ndim == 0:
            return scalar_fn(float(arr))
        vals, inverse = np.unique(arr, return_inverse=True)
        out = np.array([scalar_fn(float(v)) for v in vals])
        return out[inverse].reshape(arr.shape)

    return wrapped


@dataclass(frozen=True)
class RegimeRow:
    """One row of the regime table: f_p, kappa_p, and K_{alpha,beta;p}.

    ``f`` accepts scalars or arrays.  Rows for p = -1 and p = +inf close over
    (d, alpha) at construction; all other rows are d-free.
    """

    regime: Regime
    p: float
    f: Callable[[np.ndarray], np.ndarray]
    kappa: Callable[[int], float]
    K: Callable[[float, float], float]
    b: Optional[float] = None
    f_sup: float = math.inf      # sup_s f(s); finite for the p < 0 rows
    f_at_zero: float = 0.0       # f(0); equals 1 on the two exponential rows


def _check_alpha_beta(alpha: float, beta: float) -> None:
    if not (0.0 < alpha < beta < 1.0):
        raise DomainError(f"need 0 < alpha < beta < 1, got alpha={alpha}, beta={beta}")


def _stable_quantiles(p: float, alpha: float, beta: float) -> tuple[float, float]:
    from .stable import StableLaw, stable_quantile

    law = StableLaw(p, b_p(p))
    return stable_quantile(law, alpha), stable_quantile(law, beta)


def regime_row(p, alpha: float, beta: float, d: int) -> RegimeRow:
    """The (f_p, kappa_p, K_{alpha,beta;p}) triple for the regime containing p."""
    _check_alpha_beta(alpha, beta)
    ep = ExtendedP.of(p)
    reg = ep.regime
    pv = ep.value

    if reg is Regime.NEG_INF:
        def K(a, b):
            _check_alpha_beta(a, b)
            return math.log(b) / math.log(a)

        return RegimeRow(reg, pv, lambda s: np.exp(-0.5 * np.square(np.asarray(s, dtype=float))),
                         kappa=lambda dd: float(dd), K=K, f_sup=1.0, f_at_zero=1.0)

    if reg is Regime.BELOW_NEG_ONE:
        def K(a, b, _p=pv):
            _check_alpha_beta(a, b)
            qa, qb = _stable_quantiles(_p, a, b)
            return (qb / qa) ** (1.0 / _p)

        return RegimeRow(reg, pv, lambda s: np.exp(-0.5 * np.square(np.asarray(s, dtype=float))),
                         kappa=lambda dd: float(dd), K=K, b=b_p(pv), f_sup=1.0, f_at_zero=1.0)

    if reg is Regime.NEG_ONE:
        mu0 = mu_tilde(d, 0.0)
        f = _vectorized(lambda s, _d=d, _m=mu0: _m - mu_tilde(_d, s))

        def K(a, b):
            _check_alpha_beta(a, b)
            qa, qb = _stable_quantiles(-1.0, a, b)
            return qb - qa

        return RegimeRow(reg, pv, f, kappa=lambda dd: float(dd), K=K,
                         b=b_p(-1.0), f_sup=mu0)

    if reg is Regime.NEG_ONE_TO_NEG_HALF:
        lam0 = lambda_p_zero(pv)
        f = _vectorized(lambda s, _p=pv, _l=lam0: _l - lambda_p(_p, s))

        def K(a, b, _p=pv):
            _check_alpha_beta(a, b)
            qa, qb = _stable_quantiles(_p, a, b)
            return qb - qa

        return RegimeRow(reg, pv, f, kappa=lambda dd: float(dd) ** abs(pv), K=K,
                         b=b_p(pv), f_sup=lam0)

    if reg is Regime.NEG_HALF:
        lam0 = lambda_p_zero(-0.5)
        f = _vectorized(lambda s, _l=lam0: _l - lambda_p(-0.5, s))

        def K(a, b):
            _check_alpha_beta(a, b)
            return (ndtri(b) - ndtri(a)) * (2.0 / math.pi) ** 0.25

        return RegimeRow(reg, pv, f, kappa=lambda dd: math.sqrt(dd * math.log(dd)),
                         K=K, f_sup=lam0)

    if reg is Regime.NEG_HALF_TO_ZERO:
        lam0 = lambda_p_zero(pv)
        sd = math.sqrt(lambda_p_zero(2.0 * pv) - lam0 ** 2)
        f = _vectorized(lambda s, _p=pv, _l=lam0: _l - lambda_p(_p, s))

        def K(a, b, _sd=sd):
            _check_alpha_beta(a, b)
            return (ndtri(b) - ndtri(a)) * _sd

        return RegimeRow(reg, pv, f, kappa=lambda dd: math.sqrt(dd), K=K, f_sup=lam0)

    if reg is Regime.ZERO:
        tl0 = log_moment(1, 0.0)
        sd = math.sqrt(log_moment(2, 0.0))
        f = _vectorized(lambda s, _t=tl0: log_moment(1, s) - _t)

        def K(a, b, _sd=sd):
            _check_alpha_beta(a, b)
            return (ndtri(b) - ndtri(a)) * _sd

        return RegimeRow(reg, pv, f, kappa=lambda dd: math.sqrt(dd), K=K)

    if reg is Regime.ZERO_TO_INF:
        lam0 = lambda_p_zero(pv)
        sd = math.sqrt(lambda_p_zero(2.0 * pv) - lam0 ** 2)
        if pv == 2.0:
            f = lambda s: np.square(np.asarray(s, dtype=float))
        else:
            f = _vectorized(lambda s, _p=pv, _l=lam0: lambda_p(_p, s) - _l)

        def K(a, b, _sd=sd):
            _check_alpha_beta(a, b)
            return (ndtri(b) - ndtri(a)) * _sd

        return RegimeRow(reg, pv, f, kappa=lambda dd: math.sqrt(dd), K=K)

    # Regime.POS_INF
    lam0 = lambda_inf(d, alpha, 0.0)
    c = c_crit_inf(d, alpha)

    def f_inf(s, _c=c, _l0=lam0):
        arr = np.abs(np.asarray(s, dtype=float))
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        out = np.array([-_log_prob_abs_le(_c, float(v)) - _l0 for v in arr])
        return float(out[0]) if scalar else out.reshape(np.shape(s))

    def K(a, b):
        _check_alpha_beta(a, b)
        return math.log1p(-a) - math.log1p(-b)

    return RegimeRow(reg, pv, f_inf, kappa=lambda dd: 1.0, K=K)

"""The p-mean test: statistics, decisions, critical values, asymptotic power,
sample size, and feasibility of directions.

Under the Gaussian limit model the null statistic is <Z>_p with
Z ~ N(0, I_d), so a size-alpha critical value c solves P(<Z>_p > c) = alpha.
Asymptotic critical values translate the per-regime limit laws into <.>_p
units.  For p < 0 the rejection region flips once through the p-th power:

    <z>_p > c   <=>   sum_j |z_j|^p < d c^p,

so the limit quantile enters at level alpha (not 1 - alpha); the algebra per
regime is spelled out in ``critical_value``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import ndtr, ndtri

from .moments import ExtendedP, Regime, RegimeRow, b_p, c_crit_inf, lambda_p_zero, log_moment, mu_tilde, regime_row
from .numcore import BracketError, ConfigError, DomainError, RngStream, find_root
from .stable import StableLaw, stable_cdf, stable_quantile


class InfeasibleError(ValueError):
    """The direction cannot reach the requested power for this p (too many zeros)."""

    def __init__(self, message: str, threshold: float, d0: int):
        super().__init__(message)
        self.threshold = threshold
        self.d0 = d0


# ---------------------------------------------------------------------------
# p-means
# ---------------------------------------------------------------------------

def pmean(p, s) -> float:
    """The p-mean <s>_p = ((1/d) sum |s_j|^p)^(1/p), extended by continuity:
    min |s_j| at p = -inf, geometric mean at p = 0, max |s_j| at p = +inf.
    For p < 0, any exact zero coordinate gives <s>_p = 0."""
    return float(pmean_rows(p, np.atleast_2d(np.asarray(s, dtype=float)))[0])


def pmean_rows(p, x: np.ndarray) -> np.ndarray:
    """Row-wise p-means of a 2-D array, in log space for overflow safety."""
    pv = float(ExtendedP.of(p).value)
    x = np.abs(np.asarray(x, dtype=float))
    if x.ndim != 2 or x.shape[1] == 0:
        raise DomainError("pmean expects a nonempty vector or 2-D array of rows")
    if pv == math.inf:
        return x.max(axis=1)
    if pv == -math.inf:
        return x.min(axis=1)
    with np.errstate(divide="ignore"):
        logs = np.log(x)
    if pv == 0.0:
        return np.exp(np.mean(logs, axis=1))
    a = pv * logs
    m = a.max(axis=1)
    with np.errstate(invalid="ignore"):
        out = np.exp((m + np.log(np.mean(np.exp(a - m[:, None]), axis=1))) / pv)
    # all-zero rows: max is -inf, exp(nan) above; the p-mean is 0
    out = np.where(np.isfinite(m), out, 0.0)
    if pv < 0.0:
        out = np.where((x == 0.0).any(axis=1), 0.0, out)
    return out


def decide(p, c: float, n: int, sample_mean) -> bool:
    """The test delta_{n,p,c}: reject iff sqrt(n) <mean>_p > c (strict)."""
    if n < 1:
        raise DomainError(f"decide requires n >= 1, got {n}")
    return bool(math.sqrt(n) * pmean(p, sample_mean) > c)


# ---------------------------------------------------------------------------
# Shift vectors and plans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShiftVector:
    """A shift s = sqrt(n) theta_1 with its exact-zero count d_0 cached."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=float))
        if self.entries.ndim != 1 or self.entries.size == 0:
            raise DomainError("ShiftVector must be a nonempty 1-D vector")

    @property
    def d0(self) -> int:
        """Number of exactly-zero coordinates (bitwise test; threshold noisy
        directions upstream)."""
        return int(np.count_nonzero(self.entries == 0.0))

    def __len__(self) -> int:
        return self.entries.size


@dataclass(frozen=True)
class TestPlan:
    """One power / sample-size / feasibility query."""

    __test__ = False  # not a pytest class, despite the name

    p: Union[float, ExtendedP]
    d: int
    alpha: float
    beta: float
    theta1: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", ExtendedP.of(self.p))
        object.__setattr__(self, "theta1", np.asarray(self.theta1, dtype=float))
        if not (0.0 < self.alpha < self.beta < 1.0):
            raise DomainError(f"need 0 < alpha < beta < 1, got ({self.alpha}, {self.beta})")
        if self.theta1.shape != (self.d,):
            raise DomainError(f"theta1 must have dimension d={self.d}, got shape {self.theta1.shape}")

    @property
    def direction(self) -> np.ndarray:
        """theta1 normalized to a <.>_2-unit vector."""
        norm = pmean(2.0, self.theta1)
        if norm == 0.0:
            return np.zeros_like(self.theta1)
        u = self.theta1 / norm
        assert abs(pmean(2.0, u) - 1.0) <= 1e-12
        return u


# ---------------------------------------------------------------------------
# Critical values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalValue:
    value: float
    method: str
    half_width: Optional[float] = None   # 95% CI half-width (Monte Carlo only)
    reps: Optional[int] = None

    def __float__(self) -> float:
        return self.value


def _stable_alpha_quantile(p: float, alpha: float) -> float:
    return stable_quantile(StableLaw(p, b_p(p)), alpha)


def critical_value(p, d: int, alpha: float, method: str = "asymptotic",
                   reps: int = 100_000, rng: Optional[RngStream] = None) -> CriticalValue:
    """Size-alpha critical value for <Z>_p in <.>_p units.

    ``asymptotic`` uses the per-regime limit law; ``mc`` uses the empirical
    (1 - alpha)-quantile of <Z>_p with an order-statistic CI.
    """
    ep = ExtendedP.of(p)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0,1), got {alpha}")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")

    if method == "mc":
        if reps < 1000:
            raise ConfigError(f"MonteCarlo critical value needs reps >= 1000, got {reps}")
        if rng is None:
            rng = RngStream(0, 0)
        stats = _null_statistics(ep, d, reps, rng)
        stats.sort()
        k = int(math.ceil((1.0 - alpha) * reps)) - 1
        k = min(max(k, 0), reps - 1)
        spread = 1.959964 * math.sqrt(reps * alpha * (1.0 - alpha))
        lo = stats[max(0, k - int(spread) - 1)]
        hi = stats[min(reps - 1, k + int(spread) + 1)]
        return CriticalValue(float(stats[k]), "mc", half_width=float(hi - lo) / 2.0, reps=reps)

    if method != "asymptotic":
        raise ConfigError(f"unknown critical-value method {method!r}")

    reg = ep.regime
    pv = ep.value
    zq = ndtri(1.0 - alpha)

    if reg is Regime.POS_INF:
        return CriticalValue(c_crit_inf(d, alpha), "asymptotic")
    if reg is Regime.NEG_INF:
        return CriticalValue(-math.log(alpha) * math.sqrt(2.0 * math.pi) / (2.0 * d), "asymptotic")
    if reg is Regime.ZERO_TO_INF:
        base = lambda_p_zero(pv) + zq * math.sqrt((lambda_p_zero(2 * pv) - lambda_p_zero(pv) ** 2) / d)
        return CriticalValue(base ** (1.0 / pv), "asymptotic")
    if reg is Regime.ZERO:
        return CriticalValue(math.exp(log_moment(1, 0.0) + zq * math.sqrt(log_moment(2, 0.0) / d)),
                             "asymptotic")
    if reg is Regime.NEG_HALF_TO_ZERO:
        base = lambda_p_zero(pv) - zq * math.sqrt((lambda_p_zero(2 * pv) - lambda_p_zero(pv) ** 2) / d)
        if base <= 0:
            raise DomainError(f"d={d} too small for the p={pv} asymptotic critical value")
        return CriticalValue(base ** (1.0 / pv), "asymptotic")
    if reg is Regime.NEG_HALF:
        base = lambda_p_zero(-0.5) - zq * (2.0 / math.pi) ** 0.25 * math.sqrt(math.log(d) / d)
        if base <= 0:
            raise DomainError(f"d={d} too small for the p=-1/2 asymptotic critical value")
        return CriticalValue(base ** -2.0, "asymptotic")
    if reg is Regime.NEG_ONE_TO_NEG_HALF:
        qa = _stable_alpha_quantile(pv, alpha)
        base = lambda_p_zero(pv) + qa * d ** (abs(pv) - 1.0)
        if base <= 0:
            raise DomainError(f"d={d} too small for the p={pv} asymptotic critical value")
        return CriticalValue(base ** (1.0 / pv), "asymptotic")
    if reg is Regime.NEG_ONE:
        qa = _stable_alpha_quantile(-1.0, alpha)
        base = mu_tilde(d, 0.0) + qa
        if base <= 0:
            raise DomainError(f"d={d} too small for the p=-1 asymptotic critical value")
        return CriticalValue(1.0 / base, "asymptotic")
    # Regime.BELOW_NEG_ONE: sum |Z_j|^p / d^{|p|} -> zeta, no centering
    qa = _stable_alpha_quantile(pv, alpha)
    return CriticalValue(qa ** (1.0 / pv) * d ** (-(1.0 + pv) / pv), "asymptotic")


def _null_statistics(ep: ExtendedP, d: int, reps: int, rng: RngStream,
                     chunk_rows: int = 65536) -> np.ndarray:
    """reps draws of <Z>_p, chunked to bound memory."""
    chunk_rows = max(1, min(chunk_rows, max(1, 2 ** 22 // max(d, 1))))
    out = np.empty(reps)
    gen = rng.generator()
    done = 0
    while done < reps:
        m = min(chunk_rows, reps - done)
        z = gen.standard_normal((m, d))
        out[done:done + m] = pmean_rows(ep, z)
        done += m
    return out


# ---------------------------------------------------------------------------
# Power, sample size, feasibility
# ---------------------------------------------------------------------------

def _solve_beta(row: RegimeRow, alpha: float, R: float) -> float:
    """Invert K_{alpha,beta} = R for beta on the row's limit-law scale."""
    reg = row.regime
    if reg is Regime.NEG_INF:
        return alpha ** R
    if reg is Regime.POS_INF:
        return 1.0 - (1.0 - alpha) * math.exp(-R)
    if reg is Regime.BELOW_NEG_ONE:
        law = StableLaw(row.p, row.b)
        qa = stable_quantile(law, alpha)
        return float(stable_cdf(law, qa * R ** row.p))
    if reg in (Regime.NEG_ONE, Regime.NEG_ONE_TO_NEG_HALF):
        law = StableLaw(row.p, row.b)
        qa = stable_quantile(law, alpha)
        return float(stable_cdf(law, qa + R))
    # CLT rows; K = (z_beta - z_alpha) * sd
    sd = row.K(0.25, 0.75) / (ndtri(0.75) - ndtri(0.25))
    return float(ndtr(ndtri(alpha) + R / sd))


def power_asymptotic(p, d: int, alpha: float, shift) -> float:
    """Asymptotic power of the size-alpha test against the shift s = sqrt(n) theta_1,
    obtained by solving the sufficient-shift relation for beta."""
    sv = shift if isinstance(shift, ShiftVector) else ShiftVector(np.asarray(shift, dtype=float))
    if len(sv) != d:
        raise DomainError(f"shift dimension {len(sv)} != d = {d}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0,1), got {alpha}")
    # beta plays no role when solving *for* beta; the row only needs a valid pair
    row = regime_row(p, alpha, (1.0 + alpha) / 2.0, d)
    R = float(np.sum(row.f(sv.entries))) / row.kappa(d)
    return _solve_beta(row, alpha, R)


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    threshold: float     # sharp bound on d_0 for this (p, d, alpha, beta)
    d0: int
    detail: str = ""


def feasibility(plan: TestPlan, slack: float = 0.0) -> Feasibility:
    """Whether the direction of theta1 can reach power beta at size alpha.

    Always feasible for p >= 0.  For p < 0, compares the exact zero count
    d_0(u) against the sharp threshold of the matching regime line; ``slack``
    loosens the comparison multiplicatively (the theory carries o(1) terms)."""
    ep = plan.p
    d = plan.d
    u = plan.direction
    d0 = int(np.count_nonzero(u == 0.0))
    if ep.value >= 0.0:
        return Feasibility(True, float(d), d0, "p >= 0: every nonzero direction is feasible")
    row = regime_row(ep, plan.alpha, plan.beta, d)
    K = row.K(plan.alpha, plan.beta)
    if ep.regime in (Regime.NEG_INF, Regime.BELOW_NEG_ONE):
        thr = K * d
        detail = f"d_0 <= K*d with K={K:.6g}"
    else:
        thr = d - K * row.kappa(d) / row.f_sup
        detail = f"d_0 <= d - K*kappa/f_sup, K={K:.6g}, kappa={row.kappa(d):.6g}, sup f={row.f_sup:.6g}"
    ok = d0 <= thr * (1.0 + slack) if thr >= 0 else False
    return Feasibility(bool(ok), float(thr), d0, detail)


def as_shift_scale(plan: TestPlan, slack: float = 0.0) -> float:
    """The scalar t* > 0 with sum_j f_p(t* theta_j) = K kappa_p(d); the
    asymptotically sufficient shift in the direction of theta1 is t* theta1."""
    ep = plan.p
    if not np.any(plan.theta1 != 0.0):
        raise DomainError("theta1 must be nonzero")
    feas = feasibility(plan, slack=slack)
    if not feas.feasible:
        raise InfeasibleError(
            f"direction infeasible for p={ep.value}: d_0={feas.d0} exceeds threshold "
            f"{feas.threshold:.6g} ({feas.detail})", feas.threshold, feas.d0)
    row = regime_row(ep, plan.alpha, plan.beta, plan.d)
    target = row.K(plan.alpha, plan.beta) * row.kappa(plan.d)
    theta = plan.theta1

    def g(t):
        return float(np.sum(row.f(t * theta))) - target

    increasing = ep.regime not in (Regime.NEG_INF, Regime.BELOW_NEG_ONE)
    g0 = g(0.0)
    t_hi = 1.0
    for _ in range(200):
        gt = g(t_hi)
        if (gt >= 0.0) if increasing else (gt <= 0.0):
            break
        t_hi *= 2.0
    else:
        raise BracketError("could not bracket the sufficient-shift equation; "
                           "direction may be borderline infeasible")
    if (g0 > 0 and g(t_hi) > 0) or (g0 < 0 and g(t_hi) < 0):
        raise BracketError("sufficient-shift equation has no sign change on the bracket")
    return find_root(g, 0.0, t_hi, tol=1e-12)


def sample_size(plan: TestPlan, slack: float = 0.0) -> int:
    """Smallest integer n with asymptotic power >= beta: n = ceil(t*^2) with
    t* from the sufficient-shift equation (ceiling of ||s||^2 / ||theta1||^2)."""
    t = as_shift_scale(plan, slack=slack)
    return max(1, int(math.ceil(t * t - 1e-9)))


def as_shift_residual(p, d: int, alpha: float, beta: float, s) -> float:
    """(sum_j f_p(s_j) - K kappa_p(d)) / kappa_p(d): zero iff s satisfies the
    sufficient-shift equation; the sign says over- vs under-powered."""
    sv = s if isinstance(s, ShiftVector) else ShiftVector(np.asarray(s, dtype=float))
    if len(sv) != d:
        raise DomainError(f"shift dimension {len(sv)} != d = {d}")
    row = regime_row(p, alpha, beta, d)
    K = row.K(alpha, beta)
    return (float(np.sum(row.f(sv.entries))) - K * row.kappa(d)) / row.kappa(d)

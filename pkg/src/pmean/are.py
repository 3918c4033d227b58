"""Asymptotic relative efficiency of the p-mean test against the 2-mean test.

Covers the equalized-direction efficiency constant a_p and its Gamma-ratio
bound, the positive-homogeneous direction functional ||.||_{p,2} governing the
p < 2 phase transition, the large-d phase-transition classifier, exact
finite-d ARE by quadrature for d <= 3 in the continuous-sample-size Gaussian
model, and the block construction attaining intermediate ARE values.

For p in (-1/2, infinity) the constant collapses to

    a_p = |p| / sqrt(2 (r(p) - 1)),    r(p) = Gamma(1/2) Gamma(p+1/2) / Gamma((p+1)/2)^2,

which is the form used throughout (log-Gamma evaluation, expm1 for r - 1, and
a Taylor branch of ln r around the removable point p = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln, ndtr

from .moments import ExtendedP, lambda_p, lambda_p_zero, regime_row
from .numcore import AccuracyError, DomainError, Quadrature, find_root
from .hypotest import pmean

# psi'(1/2), psi''(1/2), psi'''(1/2) for the ln r Taylor branch at p = 0
_PSI1_HALF = math.pi ** 2 / 2.0
_PSI2_HALF = -16.828762155555034   # -14 zeta(3)
_PSI3_HALF = math.pi ** 4


class IndeterminateGrowthError(RuntimeError):
    """Growth-exponent regression landed inside the dead band; no verdict."""


def gamma_ratio(p) -> np.ndarray:
    """r(p) = Gamma(1/2) Gamma(p+1/2) / Gamma((p+1)/2)^2 for p > -1/2."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= -0.5):
        raise DomainError("gamma_ratio requires p > -1/2")
    lnr = gammaln(0.5) + gammaln(p + 0.5) - 2.0 * gammaln((p + 1.0) / 2.0)
    small = np.abs(p) < 1e-3
    if np.any(small):
        ps = np.where(small, p, 0.0)
        series = (_PSI1_HALF / 4.0) * ps ** 2 + (_PSI2_HALF / 8.0) * ps ** 3 \
            + (7.0 * _PSI3_HALF / 192.0) * ps ** 4
        lnr = np.where(small, series, lnr)
    out = np.exp(lnr)
    return float(out) if out.ndim == 0 else out


def _expm1_lnr(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    lnr = gammaln(0.5) + gammaln(p + 0.5) - 2.0 * gammaln((p + 1.0) / 2.0)
    small = np.abs(p) < 1e-3
    if np.any(small):
        ps = np.where(small, p, 0.0)
        series = (_PSI1_HALF / 4.0) * ps ** 2 + (_PSI2_HALF / 8.0) * ps ** 3 \
            + (7.0 * _PSI3_HALF / 192.0) * ps ** 4
        lnr = np.where(small, series, lnr)
    return np.expm1(lnr)


def a_p(p) -> float:
    """The equalized-direction ARE constant; extended by 0 on [-inf,-1/2] and
    at p = +inf, by 2/pi at p = 0, and exactly 1 at p = 2."""
    ep = ExtendedP.of(p)
    v = ep.value
    if v == 2.0:
        return 1.0
    if v == 0.0:
        return 2.0 / math.pi
    if v <= -0.5 or v == math.inf:
        return 0.0
    return abs(v) / math.sqrt(2.0 * float(_expm1_lnr(v)))


def a_p_moment_route(p: float, quad: Quadrature = Quadrature()) -> float:
    """a_p via the sufficient-shift constants: (K_2/K_p) |p| lambda_p(0) / 2,
    with the lambda pieces evaluated by quadrature (independent of the Gamma
    route up to the normal quantiles)."""
    if not (-0.5 < p) or p == 0.0 or not math.isfinite(p):
        raise DomainError("moment route needs finite p in (-1/2, inf), p != 0")
    lam_p0 = lambda_p(p, 0.0, quad)
    lam_2p0 = lambda_p(2.0 * p, 0.0, quad)
    # K_2 / K_p = sqrt(lambda_{2,2}(0) / lambda_{p,2}(0)); the quantile factor cancels
    ratio = math.sqrt(2.0 / (lam_2p0 - lam_p0 ** 2))
    return ratio * abs(p) * lam_p0 / 2.0


# ---------------------------------------------------------------------------
# Gamma-ratio bound r(p) > 1 + p^2/2
# ---------------------------------------------------------------------------

def r1(p):
    p = np.asarray(p, dtype=float)
    return (p + 1.0) ** 2 / (2.0 * p + 1.0)


def r2(p):
    p = np.asarray(p, dtype=float)
    out = (p + 1.0) ** 2 / 3.0
    for j in (1, 2, 3):
        out = out * ((p + 1.0) / 2.0 + j) ** 2 / ((1.5 + j) * (p - 0.5 + j))
    return out


def r3(p):
    p = np.asarray(p, dtype=float)
    out = np.exp((p - 0.5) * math.log(2.0))
    for j in (0, 1):
        out = out * ((p + 1.0) / 2.0 + j) ** 2 / ((p / 2.0 + 0.25 + j) * (p / 2.0 + 0.75 + j))
    return out


def _r_tilde(i: int, p):
    p = np.asarray(p, dtype=float)
    if i == 1:
        ln = gammaln(1.5) + gammaln(p + 1.5) - 2.0 * gammaln((p + 1.0) / 2.0 + 1.0)
    elif i == 2:
        ln = gammaln(5.5) + gammaln(p + 3.5) - 2.0 * gammaln((p + 1.0) / 2.0 + 4.0)
    elif i == 3:
        ln = gammaln(p / 2.0 + 2.25) + gammaln(p / 2.0 + 2.75) - 2.0 * gammaln((p + 1.0) / 2.0 + 2.0)
    else:
        raise DomainError(f"no factorization index {i}")
    return np.exp(ln)


@dataclass(frozen=True)
class ApBoundReport:
    grid: np.ndarray
    r_values: np.ndarray
    bound: np.ndarray                 # 1 + p^2/2
    r_margin_min: float               # min of r - bound over the grid
    partial_margin_min: float         # min of max(r1,r2,r3) - bound
    r_violations: int
    partial_violations: int

    @property
    def ok(self) -> bool:
        return self.r_violations == 0 and self.partial_violations == 0


def verify_ap_bound(p_grid) -> ApBoundReport:
    """Check r(p) > 1 + p^2/2 and max(r1, r2, r3)(p) > 1 + p^2/2 on a grid
    excluding the equality points {0, 2}."""
    grid = np.asarray(p_grid, dtype=float)
    if np.any(grid <= -0.5):
        raise DomainError("grid must lie in (-1/2, inf)")
    if np.any(grid == 0.0) or np.any(grid == 2.0):
        raise DomainError("grid must exclude the equality points 0 and 2")
    bound = 1.0 + grid ** 2 / 2.0
    r = 1.0 + _expm1_lnr(grid)
    rbest = np.maximum(np.maximum(r1(grid), r2(grid)), r3(grid))
    r_margin = r - bound
    part_margin = rbest - bound
    return ApBoundReport(
        grid=grid, r_values=r, bound=bound,
        r_margin_min=float(r_margin.min()),
        partial_margin_min=float(part_margin.min()),
        r_violations=int(np.count_nonzero(r_margin <= 0.0)),
        partial_violations=int(np.count_nonzero(part_margin <= 0.0)),
    )


def ap_curve(p_samples, with_transform: bool = False) -> np.ndarray:
    """Tabulate (p, a_p); with_transform adds the figure coordinates
    (psi(p/4), psi(a_p)) with psi(x) = 2x / (2|x| + 3)."""

    def psi(x):
        x = np.asarray(x, dtype=float)
        return 2.0 * x / (2.0 * np.abs(x) + 3.0)

    ps = np.asarray(list(p_samples), dtype=float)
    avals = np.array([a_p(v) for v in ps])
    if not with_transform:
        return np.column_stack([ps, avals])
    return np.column_stack([ps, avals, psi(ps / 4.0), psi(avals)])


# ---------------------------------------------------------------------------
# The ||.||_{p,2} functional
# ---------------------------------------------------------------------------

def _g_fn(p: float) -> tuple[Callable[[np.ndarray], np.ndarray], float]:
    """(g_p vectorized over |s|, sup g_p); p in (-1/2, 2)."""
    if p == 0.0:
        def g(s):
            s = np.abs(np.asarray(s, dtype=float))
            return np.where(s <= math.e, s ** 2 / math.e ** 2,
                            np.log(np.maximum(s, 1e-300)))
        return g, math.inf
    if 0.0 < p < 2.0:
        def g(s, _p=p):
            s = np.abs(np.asarray(s, dtype=float))
            return np.where(s <= 1.0, s ** 2, s ** _p)
        return g, math.inf
    # p in (-1/2, 0): g_p = f_p = lambda_p(0) - lambda_p(s), bounded by lambda_p(0)
    lam0 = lambda_p_zero(p)

    def g(s, _p=p, _l=lam0):
        arr = np.abs(np.asarray(s, dtype=float))
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        vals, inv = np.unique(arr, return_inverse=True)
        out = np.array([_l - lambda_p(_p, float(v)) for v in vals])[inv]
        return float(out[0]) if scalar else out.reshape(np.shape(s))

    return g, lam0


def orlicz_norm(p: float, alpha: float, beta: float, v) -> float:
    """||v||_{p,2} = inf{ t > 0 : sum_j g_p(v_j / t) <= K_p sqrt(d) }; may be 0
    for p in (-1/2, 0), where g_p is bounded."""
    if not -0.5 < p < 2.0:
        raise DomainError(f"orlicz_norm requires p in (-1/2, 2), got {p}")
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DomainError("v must be a nonempty vector")
    d = v.size
    budget = regime_row(p, alpha, beta, max(d, 2)).K(alpha, beta) * math.sqrt(d)
    nz = v[v != 0.0]
    if nz.size == 0:
        return 0.0
    g, gsup = _g_fn(p)
    if nz.size * gsup <= budget:
        return 0.0

    def excess(log_t):
        return float(np.sum(g(nz / math.exp(log_t)))) - budget

    lo = math.log(np.abs(nz).max()) - 40.0
    hi = math.log(np.abs(nz).max()) + 5.0
    while excess(hi) > 0.0:
        hi += 5.0
    while excess(lo) < 0.0:
        lo -= 10.0
        if lo < -750.0:
            return 0.0
    return math.exp(find_root(excess, lo, hi, tol=1e-12))


# ---------------------------------------------------------------------------
# Phase-transition classifier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectionSequence:
    """A varying <.>_2-unit direction d -> u(d), probed at finitely many dims."""

    generator: Callable[[int], np.ndarray]
    probe_dims: tuple = (100, 10_000, 1_000_000)

    def probe(self, d: int) -> np.ndarray:
        u = np.asarray(self.generator(int(d)), dtype=float)
        if u.shape != (d,):
            raise DomainError(f"generator returned shape {u.shape} for d={d}")
        if abs(pmean(2.0, u) - 1.0) > 1e-12:
            raise DomainError(f"u(d={d}) is not <.>_2-unit")
        return u


def equalized_sequence() -> DirectionSequence:
    return DirectionSequence(lambda d: np.ones(d))


def spike_sequence() -> DirectionSequence:
    def gen(d):
        u = np.zeros(d)
        u[0] = math.sqrt(d)
        return u
    return DirectionSequence(gen)


def block_sequence(gamma: float) -> DirectionSequence:
    """u(d) with ceil(d^gamma) equal coordinates and zeros elsewhere."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"block exponent must be in [0,1], got {gamma}")

    def gen(d):
        k = max(1, min(d, int(math.ceil(d ** gamma))))
        u = np.zeros(d)
        u[:k] = math.sqrt(d / k)
        return u

    return DirectionSequence(gen)


@dataclass(frozen=True)
class AREVerdict:
    tag: str                      # "zero" | "finite" | "infinite" | "interval"
    value: Optional[float]        # the ARE for "finite"; a_p for "interval" upper end
    rationale: str

    @property
    def interval(self) -> Optional[tuple[float, float]]:
        return (0.0, self.value) if self.tag == "interval" else None


GROWTH_DEAD_BAND = 0.02


def _log_slope(dims: np.ndarray, ratios: np.ndarray) -> float:
    x = np.log(dims)
    y = np.log(ratios)
    x = x - x.mean()
    return float(np.dot(x, y) / np.dot(x, x))


def classify_are(p, useq: DirectionSequence, alpha: float, beta: float,
                 dead_band: float = GROWTH_DEAD_BAND) -> AREVerdict:
    """Large-d ARE verdict for the direction sequence, decided from the probes'
    growth against the phase-transition threshold by log-log regression.

    The probe dimensions must span at least 3 decades.  For p in (2, inf) and
    p = inf, a regression slope inside the dead band raises
    IndeterminateGrowthError rather than guessing a side.
    """
    ep = ExtendedP.of(p)
    v = ep.value
    dims = np.asarray(sorted(useq.probe_dims), dtype=float)
    if len(dims) < 3 or dims[-1] / dims[0] < 999.0:
        raise DomainError("probe dimensions must span at least 3 decades")

    if v == 2.0:
        return AREVerdict("finite", 1.0, "p = 2: the tests coincide up to critical value")
    if v <= -0.5:
        return AREVerdict("zero", 0.0, "p in [-inf, -1/2]: ARE vanishes for every direction")

    probes = [useq.probe(int(d)) for d in dims]
    equalized = all(np.allclose(np.abs(u), np.abs(u[0]), rtol=0.0, atol=1e-12) for u in probes)

    if v == math.inf:
        vals = np.array([np.max(np.abs(u)) for u in probes])
        thr = dims ** 0.25 * np.sqrt(np.log(dims))
        slope = _log_slope(dims, vals / thr)
        if slope < -dead_band:
            return AREVerdict("zero", 0.0, f"<u>_inf << d^(1/4) sqrt(ln d): slope {slope:+.4f}")
        if slope > dead_band:
            return AREVerdict("infinite", None, f"<u>_inf >> d^(1/4) sqrt(ln d): slope {slope:+.4f}")
        raise IndeterminateGrowthError(
            f"growth slope {slope:+.4f} within +-{dead_band} of the p=inf threshold")

    if v > 2.0:
        vals = np.array([pmean(v, u) for u in probes])
        expo = (v - 2.0) / (4.0 * v)
        slope = _log_slope(dims, vals / dims ** expo)
        if slope < -dead_band:
            return AREVerdict("finite", a_p(v),
                              f"<u>_p << d^({expo:.4g}): slope {slope:+.4f}; ARE = a_p")
        if slope > dead_band:
            return AREVerdict("infinite", None, f"<u>_p >> d^({expo:.4g}): slope {slope:+.4f}")
        raise IndeterminateGrowthError(
            f"growth slope {slope:+.4f} within +-{dead_band} of the threshold exponent")

    # p in (-1/2, 2)
    if equalized:
        return AREVerdict("finite", a_p(v), "equalized direction: ARE = a_p")
    vals = np.array([orlicz_norm(v, alpha, beta, u) for u in probes])
    if np.any(vals == 0.0):
        return AREVerdict("zero", 0.0, "||u||_{p,2} = 0 at a probe dimension")
    slope = _log_slope(dims, vals / dims ** 0.25)
    if slope < -dead_band:
        return AREVerdict("zero", 0.0, f"||u||_{{p,2}} << d^(1/4): slope {slope:+.4f}")
    return AREVerdict("interval", a_p(v),
                      f"||u||_{{p,2}} of order d^(1/4) (slope {slope:+.4f}); ARE in (0, a_p]")


def attaining_sequence(p: float, target: float, alpha: float, beta: float) -> DirectionSequence:
    """Block direction sequence whose ARE converges to ``target``: k(d) blocks of
    equal coordinates sized so the block shift solves the sufficient-shift
    equation at scale s* with (K_2/K_p) f_p(s*)/s*^2 = target."""
    if not (math.isfinite(p) and p > -0.5 and p not in (0.0, 2.0)):
        raise DomainError("attaining_sequence supports finite p in (-1/2, 2) u (2, inf), p not 0 or 2")
    apv = a_p(p)
    lo_val, hi_val = (0.0, apv) if p < 2.0 else (apv, math.inf)
    if not lo_val < target < hi_val:
        raise DomainError(f"target {target} outside the attainable open interval "
                          f"({lo_val}, {hi_val}) for p={p}")
    row2 = regime_row(2.0, alpha, beta, 2)
    rowp = regime_row(p, alpha, beta, 2)
    K2, Kp = row2.K(alpha, beta), rowp.K(alpha, beta)

    def ratio(s):
        return K2 * float(rowp.f(s)) / (Kp * s * s)

    # ratio(s) runs from a_p at s -> 0 monotonically to 0 (p < 2) or to
    # infinity (p > 2); grow hi toward the far end, shrink lo if the target
    # sits next to a_p
    lo, hi = 1e-3, 1.0
    for _ in range(60):
        if (ratio(hi) > target) != (ratio(lo) > target):
            break
        if (ratio(hi) > target) == (p < 2.0):
            hi *= 2.0
        else:
            lo /= 2.0
    else:
        raise AccuracyError("could not bracket the block scale", hi, target)
    s_star = find_root(lambda s: ratio(s) - target, lo, hi, tol=1e-12)
    f_star = float(rowp.f(s_star))

    def gen(d):
        k = max(1, min(d, int(round(Kp * math.sqrt(d) / f_star))))
        u = np.zeros(d)
        u[:k] = math.sqrt(d / k)
        return u

    return DirectionSequence(gen)


# ---------------------------------------------------------------------------
# Exact finite-d ARE (d <= 3)
# ---------------------------------------------------------------------------

def _bracket_halfwidth(p: float, budget: float, partial: float) -> float:
    """Half-width of the z-interval {|z|: partial + |z|^p <= / >= budget} for the
    region <z>_p <= c; inf means the whole line, 0 means empty."""
    rem = budget - partial
    if p > 0.0:
        return rem ** (1.0 / p) if rem > 0.0 else 0.0
    # p < 0: region is sum |z_j|^p >= budget
    if rem <= 0.0:
        return math.inf
    return rem ** (1.0 / p)


def _prob_le(p: float, v: np.ndarray, c: float, tol: float = 1e-11) -> float:
    """P(<Z + v>_p <= c) for d = len(v) in {1, 2, 3} and c > 0."""
    d = len(v)
    pv = float(ExtendedP.of(p).value)
    if pv == math.inf:
        return float(np.prod([ndtr(c - vj) - ndtr(-c - vj) for vj in v]))
    if pv == -math.inf:
        return 1.0 - float(np.prod([1.0 - (ndtr(c - vj) - ndtr(-c - vj)) for vj in v]))
    if d == 1:
        return float(ndtr(c - v[0]) - ndtr(-c - v[0]))

    def _phi(x):
        return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)

    if d == 2:
        if pv == 0.0:
            def integrand(z1):
                if z1 == 0.0:
                    return _phi(-v[0])
                g = c * c / abs(z1)
                return _phi(z1 - v[0]) * (ndtr(g - v[1]) - ndtr(-g - v[1]))

            val, err = integrate.quad(integrand, v[0] - 9.0, v[0] + 9.0,
                                      points=[0.0] if abs(v[0]) < 9.0 else None,
                                      epsabs=tol, epsrel=tol, limit=400)
            return val
        budget = d * c ** pv

        def integrand(z1):
            g = _bracket_halfwidth(pv, budget, abs(z1) ** pv if z1 != 0.0 else math.inf if pv < 0 else 0.0)
            if g == 0.0:
                return 0.0
            if g == math.inf:
                return _phi(z1 - v[0])
            return _phi(z1 - v[0]) * (ndtr(g - v[1]) - ndtr(-g - v[1]))

        if pv > 0.0:
            L = budget ** (1.0 / pv)
            lo, hi = max(-L, v[0] - 9.0), min(L, v[0] + 9.0)
            pts = [0.0] if lo < 0.0 < hi else None
        else:
            lo, hi = v[0] - 9.0, v[0] + 9.0
            edge = budget ** (1.0 / pv)  # |z1| below this leaves the whole line for z2
            pts = [x for x in (-edge, 0.0, edge) if lo < x < hi]
        val, err = integrate.quad(integrand, lo, hi, points=pts,
                                  epsabs=tol, epsrel=tol, limit=400)
        return val

    if d != 3:
        raise DomainError(f"finite-d ARE quadrature supports d in {{1,2,3}}, got {d}")

    inner_tol = max(tol, 1e-9)

    def prob2(z1):
        """conditional over (z2, z3) given z1."""
        if pv == 0.0:
            if z1 == 0.0:
                return 1.0
            cc = (c ** 3 / abs(z1)) ** 0.5
        else:
            part = abs(z1) ** pv if z1 != 0.0 else (math.inf if pv < 0 else 0.0)
            rem = 3.0 * c ** pv - part
            if pv > 0.0:
                if rem <= 0.0:
                    return 0.0
                cc = (rem / 2.0) ** (1.0 / pv)
            else:
                if rem <= 0.0:
                    return 1.0
                cc = (rem / 2.0) ** (1.0 / pv)
        # two-coordinate region with per-axis budget 2 cc^p
        return _prob_le(pv, v[1:], cc, tol=inner_tol)

    def integrand(z1):
        return _phi(z1 - v[0]) * prob2(z1)

    if pv > 0.0:
        L = (3.0 ** (1.0 / pv)) * c
        lo, hi = max(-L, v[0] - 9.0), min(L, v[0] + 9.0)
        pts = None
    else:
        lo, hi = v[0] - 9.0, v[0] + 9.0
        pts = [0.0] if lo < 0.0 < hi else None
    val, err = integrate.quad(integrand, lo, hi, points=pts,
                              epsabs=inner_tol, epsrel=inner_tol, limit=200)
    return val


def are_finite(p, d: int, u, alpha: float, beta: float,
               quad: Optional[Quadrature] = None) -> float:
    """Exact finite-d ARE of the p-mean test vs the 2-mean test in the
    continuous-sample-size Gaussian model: t_2^2 / t_p^2 where t_r solves
    P(<Z + t u>_r > c_r) = beta at the exact size-alpha critical value c_r."""
    if d not in (1, 2, 3):
        raise DomainError(f"are_finite supports d in {{1, 2, 3}}, got {d}")
    if not (0.0 < alpha < beta < 1.0):
        raise DomainError(f"need 0 < alpha < beta < 1")
    u = np.asarray(u, dtype=float)
    if u.shape != (d,):
        raise DomainError(f"u must have dimension {d}")
    norm = pmean(2.0, u)
    if norm == 0.0:
        raise DomainError("u must be nonzero")
    u = u / norm
    tol = quad.abs_tol if quad is not None else 1e-11

    def solve_for(pp):
        def size_gap(c):
            return (1.0 - _prob_le(pp, np.zeros(d), c, tol=tol)) - alpha

        c_hi = 1.0
        while size_gap(c_hi) > 0.0:
            c_hi *= 2.0
        c_lo = c_hi / 2.0
        while size_gap(c_lo) < 0.0:
            c_lo /= 2.0
        c = find_root(size_gap, c_lo, c_hi, tol=1e-13)

        def power_gap(t):
            return (1.0 - _prob_le(pp, t * u, c, tol=tol)) - beta

        t_hi = 1.0
        while power_gap(t_hi) < 0.0:
            t_hi *= 2.0
        return find_root(power_gap, 0.0, t_hi, tol=1e-13)

    t2 = solve_for(2.0)
    tp = solve_for(ExtendedP.of(p).value)
    return t2 * t2 / (tp * tp)

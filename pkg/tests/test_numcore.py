import math

import numpy as np
import pytest

from pmean.numcore import (AccuracyError, BracketError, DomainError, Quadrature,
                           RngStream, expand_bracket, find_root, gauss_expect,
                           normal_cdf, normal_pdf, normal_quantile)


def mp_quantile_oracle(q):
    """Bisection on the high-precision mpmath normal CDF."""
    import mpmath as mp
    mp.mp.dps = 30
    lo, hi = mp.mpf(-10), mp.mpf(10)
    for _ in range(120):
        mid = (lo + hi) / 2
        if mp.ncdf(mid) < q:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def test_normal_quantile_values():
    assert normal_quantile(0.5) == 0.0
    assert abs(normal_quantile(0.975) - mp_quantile_oracle(0.975)) < 1e-12
    assert abs(normal_quantile(0.95) - mp_quantile_oracle(0.95)) < 1e-12


def test_normal_pdf_cdf_basics():
    assert abs(normal_pdf(0.0) - 1.0 / math.sqrt(2 * math.pi)) < 1e-15
    xs = np.linspace(-6, 6, 101)
    assert np.all(normal_pdf(xs) == normal_pdf(-xs))
    cdf = normal_cdf(xs)
    assert np.all(np.diff(cdf) > 0)


def test_cdf_quantile_roundtrip():
    for q in np.linspace(0.001, 0.999, 41):
        assert abs(normal_cdf(normal_quantile(q)) - q) <= 1e-12


def test_cdf_symmetry_identity():
    xs = np.linspace(-8, 8, 161)
    assert np.max(np.abs(normal_cdf(xs) + normal_cdf(-xs) - 1.0)) <= 1e-14


def test_quantile_domain_errors():
    for q in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(DomainError):
            normal_quantile(q)


def test_gauss_expect_moments():
    assert abs(gauss_expect(lambda x: x * x, 0.0) - 1.0) < 1e-12
    assert abs(gauss_expect(abs, 0.0) - math.sqrt(2 / math.pi)) < 1e-12
    assert abs(gauss_expect(lambda x: x * x, 1.0) - 2.0) < 1e-12


def test_gauss_expect_reflection_symmetry():
    # E f(Z+s) = E f~(Z-s) with f~(x) = f(-x), for a fixed function family
    rng = np.random.default_rng(1234)
    for _ in range(20):
        a = rng.uniform(0.3, 2.5)
        k = rng.uniform(-2.0, 2.0)
        s = rng.uniform(-3.0, 3.0)
        f = lambda x, a=a, k=k: abs(x - k) ** a + math.sin(a * x)
        g = lambda x, f=f: f(-x)
        assert abs(gauss_expect(f, s) - gauss_expect(g, -s)) < 1e-9


def test_gauss_expect_singular_split():
    q = Quadrature(points=(0.0,))
    val = gauss_expect(lambda y: abs(y) ** -0.5, 0.0, q)
    # E|Z|^{-1/2} = 2^{-1/4} Gamma(1/4) / sqrt(pi)
    from scipy.special import gamma
    assert abs(val - 2 ** -0.25 * gamma(0.25) / math.sqrt(math.pi)) < 1e-9


def test_gauss_expect_budget_exhaustion():
    q = Quadrature(max_subdiv=2, abs_tol=1e-13, rel_tol=1e-13)
    with pytest.raises(AccuracyError) as exc:
        gauss_expect(lambda x: math.cos(200.0 * x * x), 0.0, q)
    assert math.isfinite(exc.value.estimate)
    assert exc.value.error_bound > 0


def test_quadrature_validation():
    with pytest.raises(DomainError):
        Quadrature(abs_tol=0.0)
    with pytest.raises(DomainError):
        Quadrature(max_subdiv=0)


def test_find_root_examples():
    assert abs(find_root(lambda x: x * x - 2.0, 1.0, 2.0) - math.sqrt(2)) < 1e-12
    r = find_root(lambda x: normal_cdf(x) - 0.975, 0.0, 4.0)
    assert abs(r - mp_quantile_oracle(0.975)) < 1e-10
    with pytest.raises(BracketError):
        find_root(lambda x: x - 1.0, 2.0, 3.0)


def test_find_root_idempotent():
    g = lambda x: math.cos(x) - x
    r1 = find_root(g, 0.0, 1.0)
    r2 = find_root(g, max(0.0, r1 - 1e-6), min(1.0, r1 + 1e-6))
    assert abs(r1 - r2) < 1e-11


def test_expand_bracket():
    lo, hi = expand_bracket(lambda t: t - 5.0)
    assert lo == 0.0 and hi >= 5.0
    with pytest.raises(BracketError):
        expand_bracket(lambda t: -1.0, max_iter=5)


def test_rng_stream_reproducible():
    a = RngStream(123, 4).standard_normal(64)
    b = RngStream(123, 4).standard_normal(64)
    assert np.array_equal(a, b)
    c = RngStream(123, 5).standard_normal(64)
    assert not np.array_equal(a, c)
    d = RngStream(124, 4).standard_normal(64)
    assert not np.array_equal(a, d)


def test_rng_substream_deterministic():
    s = RngStream(7, 1)
    x = s.substream(3).standard_normal(8)
    y = s.substream(3).standard_normal(8)
    assert np.array_equal(x, y)
    z = s.substream(4).standard_normal(8)
    assert not np.array_equal(x, z)

import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import ndtr, ndtri

from pmean.moments import b_p
from pmean.numcore import DomainError, RngStream
from pmean.stable import (StableLaw, cf_exponent, stable_cdf, stable_quantile,
                          stable_sample, support_lower_bound)

CPLUS = math.sqrt(2 / math.pi)
LEVY_LAW = StableLaw(-2.0, b_p(-2.0))  # b_{-2} = sqrt(2/pi): the standard Levy law


def levy_cdf(x):
    x = np.asarray(x, dtype=float)
    return np.where(x <= 0, 0.0, 2.0 * (1.0 - ndtr(1.0 / np.sqrt(np.maximum(x, 1e-300)))))


class TestLaw:
    def test_index_range(self):
        for p in (-0.6, -1.0, -2.0, -10.0):
            law = StableLaw(p, b_p(p))
            assert 0.0 < law.alpha < 2.0
        with pytest.raises(DomainError):
            StableLaw(-0.4, 0.0)
        with pytest.raises(DomainError):
            StableLaw(1.0, 0.0)

    def test_levy_density(self):
        law = StableLaw(-2.0, 0.0)
        x = 1.7
        assert abs(law.levy_density(x) - CPLUS * 0.5 * x ** -1.5) < 1e-14
        assert law.levy_density(-1.0) == 0.0


class TestCfExponent:
    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_against_direct_levy_integral(self):
        # two routes: the closed form vs direct quadrature of the Levy integral
        # (the direct oscillatory integral carries its own O(1e-3) error for
        # heavy tails, so the tolerance is loose; exactness is pinned by the
        # Levy closed-form CDF match below)
        for p in (-0.7, -1.0, -2.0):
            law = StableLaw(p, b_p(p))
            a = law.alpha
            dens = lambda x: CPLUS * a * x ** (-1.0 - a)
            for u in (0.5, 2.0):
                re = integrate.quad(lambda x: (math.cos(u * x) - 1) * dens(x),
                                    0, np.inf, limit=800)[0]
                im1 = integrate.quad(lambda x: (math.sin(u * x) - u * x) * dens(x),
                                     0, 1, limit=400)[0]
                im2 = integrate.quad(lambda x: math.sin(u * x) * dens(x),
                                     1, np.inf, limit=800)[0]
                direct = complex(1j * law.b * u + re + 1j * (im1 + im2))
                assert abs(cf_exponent(law, u) - direct) < 5e-3

    def test_conjugate_symmetry(self):
        law = StableLaw(-1.5, b_p(-1.5))
        u = 1.3
        assert abs(cf_exponent(law, -u) - np.conj(cf_exponent(law, u))) < 1e-14


class TestCdf:
    def test_levy_support(self):
        for x in (-1.0, 0.0, -1e-9):
            assert stable_cdf(LEVY_LAW, x) == 0.0

    def test_levy_probe_points(self):
        for x in (0.1, 0.5, 1.0, 2.198, 10.0, 254.31):
            assert abs(stable_cdf(LEVY_LAW, x) - float(levy_cdf(x))) < 1e-6

    def test_levy_named_values(self):
        assert abs(stable_cdf(LEVY_LAW, 2.198) - 0.5) < 1e-4
        assert abs(stable_cdf(LEVY_LAW, 0.26032) - 0.05) < 1e-5

    def test_monotone_in_x(self):
        for p in (-0.7, -1.0, -3.0):
            law = StableLaw(p, b_p(p))
            xs = np.linspace(-3, 30, 25) if law.alpha >= 1 else np.linspace(0.01, 30, 25)
            F = stable_cdf(law, xs)
            assert np.all(np.diff(F) >= -1e-12)
            assert np.all((F >= 0) & (F <= 1))


class TestQuantile:
    def test_levy_closed_form_inversion(self):
        assert abs(stable_quantile(LEVY_LAW, 0.5) - 1.0 / ndtri(0.75) ** 2) < 1e-6
        assert abs(stable_quantile(LEVY_LAW, 0.95) - 254.3144445) < 1e-3
        assert abs(stable_quantile(LEVY_LAW, 0.05) - 0.2603177716) < 1e-8

    def test_roundtrip(self):
        for p in (-2.0, -0.7, -1.0, -3.0):
            law = StableLaw(p, b_p(p))
            for q in (0.05, 0.5, 0.95):
                assert abs(stable_cdf(law, stable_quantile(law, q)) - q) < 1e-8

    def test_domain(self):
        with pytest.raises(DomainError):
            stable_quantile(LEVY_LAW, 0.0)
        with pytest.raises(DomainError):
            stable_quantile(LEVY_LAW, 1.0)


class TestTableConstant:
    def test_k_in_unit_interval(self):
        for p in (-3.0, -2.0, -1.5):
            law = StableLaw(p, b_p(p))
            K = (stable_quantile(law, 0.95) / stable_quantile(law, 0.05)) ** (1.0 / p)
            assert 0.0 < K < 1.0

    def test_k_minus_two(self):
        law = StableLaw(-2.0, b_p(-2.0))
        K = (stable_quantile(law, 0.95) / stable_quantile(law, 0.05)) ** -0.5
        assert abs(K - 0.0320) < 5e-4


class TestSampler:
    def test_deterministic(self):
        a = stable_sample(LEVY_LAW, 1000, RngStream(9, 2))
        b = stable_sample(LEVY_LAW, 1000, RngStream(9, 2))
        assert np.array_equal(a, b)

    def test_ks_against_levy_closed_form(self):
        s = stable_sample(LEVY_LAW, 100_000, RngStream(3, 0))
        xs = np.sort(s)
        F = levy_cdf(xs)
        i = np.arange(1, xs.size + 1)
        ks = max(np.max(np.abs(F - i / xs.size)), np.max(np.abs(F - (i - 1) / xs.size)))
        assert ks <= 0.01

    @pytest.mark.parametrize("p", [-0.7, -1.0, -1.5])
    def test_ks_against_cdf(self, p):
        # index-1 and alpha in (1,2): validation is sampler-vs-CDF only
        law = StableLaw(p, b_p(p))
        s = stable_sample(law, 60_000, RngStream(4, 1))
        sub = np.sort(np.random.default_rng(0).choice(s, size=2500, replace=False))
        F = stable_cdf(law, sub)
        i = np.arange(1, sub.size + 1)
        ks = max(np.max(np.abs(F - i / sub.size)), np.max(np.abs(F - (i - 1) / sub.size)))
        assert ks <= 0.04  # 1% KS critical value at n=2500 is 0.0326

    def test_support(self):
        s = stable_sample(LEVY_LAW, 20_000, RngStream(5, 0))
        lo = support_lower_bound(LEVY_LAW)
        assert np.all(s > lo - 1e-9)
        assert 0.0 <= lo <= 0.02

    def test_support_two_sided(self):
        assert support_lower_bound(StableLaw(-0.7, b_p(-0.7))) == -math.inf

    def test_bad_n(self):
        with pytest.raises(DomainError):
            stable_sample(LEVY_LAW, 0, RngStream(0, 0))

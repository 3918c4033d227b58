import math

import numpy as np
import pytest
from scipy import stats

from pmean.are import (DirectionSequence,
                       IndeterminateGrowthError, _prob_le, a_p, a_p_moment_route,
                       ap_curve, are_finite, attaining_sequence, block_sequence,
                       classify_are, equalized_sequence, gamma_ratio, orlicz_norm,
                       r1, r2, r3, _r_tilde, spike_sequence, verify_ap_bound)
from pmean.hypotest import TestPlan, pmean, sample_size
from pmean.numcore import DomainError


class TestAp:
    def test_special_values(self):
        assert a_p(2.0) == 1.0
        assert a_p(0.0) == 2.0 / math.pi
        assert abs(a_p(3.0) - 0.9592465300772289) < 1e-12
        assert abs(a_p(1.0) - 1.0 / math.sqrt(math.pi - 2.0)) < 1e-12

    def test_extended_values(self):
        for p in (-0.5, -2.0, -math.inf, math.inf):
            assert a_p(p) == 0.0

    def test_in_unit_interval(self):
        for p in (-0.49, -0.25, 0.3, 1.0, 1.9, 2.1, 5.0, 30.0):
            assert 0.0 < a_p(p) < 1.0

    def test_continuity_at_zero(self):
        # a_p is analytic at 0 with slope 14 zeta(3) (2/pi)/pi^3 ~ 0.5428, so
        # the gap at +-eps scales linearly and symmetrically
        a0 = 2.0 / math.pi
        assert abs(a_p(1e-6) - a0) <= 1e-6
        assert abs(a_p(-1e-6) - a0) <= 1e-6
        assert abs(a_p(1e-8) - a0) <= 1e-8
        assert (a_p(1e-6) - a0) * (a_p(-1e-6) - a0) < 0.0

    def test_two_routes_agree(self):
        for p in (1.0, 3.0, -0.25, 0.7):
            assert abs(a_p(p) - a_p_moment_route(p)) < 1e-10


class TestApBound:
    def test_equalities_at_0_and_2(self):
        assert abs(gamma_ratio(2.0) - 3.0) < 1e-12
        assert abs(gamma_ratio(1e-18) - 1.0) < 1e-15

    def test_factorization_identities(self):
        for p in (-0.3, 0.7, 1.5, 2.5, 10.0):
            r = gamma_ratio(p)
            for i, ri in ((1, r1), (2, r2), (3, r3)):
                assert abs(r - float(ri(p)) * float(_r_tilde(i, p))) < 1e-10 * r

    def test_r_tilde_above_one(self):
        grid = np.array([-0.4, -0.1, 0.5, 1.0, 3.0, 2.5, 7.0])
        assert np.all(_r_tilde(1, grid[grid != 0]) > 1.0)
        assert np.all(_r_tilde(3, grid) > 1.0)

    def test_grid_verification(self):
        grid = np.arange(-0.45, 10.0, 0.01)
        grid = grid[(np.abs(grid) > 1e-9) & (np.abs(grid - 2.0) > 1e-9)]
        rep = verify_ap_bound(grid)
        assert rep.ok

    def test_equality_points_rejected(self):
        with pytest.raises(DomainError):
            verify_ap_bound(np.array([0.5, 2.0]))


class TestApCurve:
    def test_rows(self):
        table = ap_curve([0.0, 1.0, 2.0, 3.0], with_transform=True)
        lookup = {row[0]: row for row in table}
        assert lookup[2.0][1] == 1.0
        assert abs(lookup[0.0][1] - 2.0 / math.pi) < 1e-15
        assert lookup[1.0][1] < 1.0 and lookup[3.0][1] < 1.0
        assert lookup[0.0][2] == 0.0  # psi(0) = 0


class TestOrlicz:
    def test_equalized_scale(self):
        # ||1_d||_{p,2} / d^{1/4}: bounded; the p = 0 value is exactly
        # 1/(e sqrt(K_0)) = 0.1925 at (0.05, 0.95)
        for p in (-0.25, 0.0, 1.0):
            for d in (100, 10_000, 1_000_000):
                r = orlicz_norm(p, 0.05, 0.95, np.ones(d)) / d ** 0.25
                assert 0.15 <= r <= 5.0

    def test_p0_closed_form(self):
        from scipy.special import ndtri
        K0 = (ndtri(0.95) - ndtri(0.05)) * math.sqrt(math.pi ** 2 / 8.0)
        d = 10_000
        expected = d ** 0.25 / (math.e * math.sqrt(K0))
        assert abs(orlicz_norm(0.0, 0.05, 0.95, np.ones(d)) - expected) < 1e-6 * expected

    def test_spike_vanishes_for_negative_p(self):
        d = 1000
        v = np.zeros(d)
        v[0] = math.sqrt(d)
        assert orlicz_norm(-0.25, 0.05, 0.95, v) == 0.0

    def test_positive_homogeneous(self):
        rng = np.random.default_rng(5)
        for p in (-0.25, 0.0, 1.0, 1.7):
            v = rng.normal(size=40)
            n1 = orlicz_norm(p, 0.05, 0.95, v)
            n2 = orlicz_norm(p, 0.05, 0.95, 2.0 * v)
            assert abs(n2 - 2.0 * n1) < 1e-10 * max(1.0, n1)

    def test_schur2_monotone(self):
        # w^2 majorized by v^2 (same sum of squares) => ||w|| >= ||v||
        rng = np.random.default_rng(6)
        for p in (-0.25, 0.0, 1.0):
            for _ in range(50 if p != -0.25 else 10):
                w2 = rng.uniform(0.5, 2.0, size=4)
                v2 = w2.copy()
                i, j = rng.choice(4, size=2, replace=False)
                lo, hi = (i, j) if v2[i] < v2[j] else (j, i)
                t = rng.uniform(0.0, v2[lo])  # reverse Robin Hood transfer
                v2[hi] += t
                v2[lo] -= t
                nv = orlicz_norm(p, 0.05, 0.95, np.sqrt(v2))
                nw = orlicz_norm(p, 0.05, 0.95, np.sqrt(w2))
                assert nw >= nv - 1e-9

    def test_domain(self):
        with pytest.raises(DomainError):
            orlicz_norm(2.0, 0.05, 0.95, np.ones(4))
        with pytest.raises(DomainError):
            orlicz_norm(-0.6, 0.05, 0.95, np.ones(4))


class TestClassify:
    def test_known_verdicts(self):
        v = classify_are(3.0, equalized_sequence(), 0.05, 0.95)
        assert v.tag == "finite" and abs(v.value - a_p(3.0)) < 1e-12
        v = classify_are(3.0, spike_sequence(), 0.05, 0.95)
        assert v.tag == "infinite"
        v = classify_are(2.0, spike_sequence(), 0.05, 0.95)
        assert v.tag == "finite" and v.value == 1.0

    def test_extremal_bracketing(self):
        # the equalized and spike verdicts bracket every other direction
        for p in (1.0, 3.0, math.inf):
            lo = classify_are(p, equalized_sequence(), 0.05, 0.95)
            hi = classify_are(p, spike_sequence(), 0.05, 0.95)
            mid = classify_are(p, block_sequence(0.9), 0.05, 0.95)
            order = {"zero": 0, "interval": 1, "finite": 1, "infinite": 2}
            if p >= 2.0:
                assert order[lo.tag] <= order[mid.tag] <= order[hi.tag]
            else:
                assert order[hi.tag] <= order[mid.tag] <= order[lo.tag]

    def test_negative_p_rows(self):
        assert classify_are(-0.25, spike_sequence(), 0.05, 0.95).tag == "zero"
        assert classify_are(-2.0, equalized_sequence(), 0.05, 0.95).tag == "zero"
        v = classify_are(0.5, block_sequence(1.0), 0.05, 0.95)
        assert v.tag == "finite"  # gamma = 1 block is the ones vector

    def test_interval_verdict(self):
        # a nearly-full block keeps ||u||_{p,2} of order d^{1/4} without being
        # perfectly equalized
        def gen(d):
            k = max(1, int(0.5 * d))
            u = np.zeros(d)
            u[:k] = math.sqrt(d / k)
            return u
        v = classify_are(1.0, DirectionSequence(gen), 0.05, 0.95)
        assert v.tag == "interval"
        assert v.interval == (0.0, a_p(1.0))

    def test_dead_band_indeterminate(self):
        with pytest.raises(IndeterminateGrowthError):
            classify_are(3.0, block_sequence(0.5), 0.05, 0.95)

    def test_probe_span_required(self):
        seq = DirectionSequence(lambda d: np.ones(d), probe_dims=(100, 200, 400))
        with pytest.raises(DomainError):
            classify_are(3.0, seq, 0.05, 0.95)

    def test_inf_row(self):
        assert classify_are(math.inf, spike_sequence(), 0.05, 0.95).tag == "infinite"
        assert classify_are(math.inf, equalized_sequence(), 0.05, 0.95).tag == "zero"


class TestProbLe:
    def test_ncx2_oracle(self):
        # at p = 2 the region is a ball: noncentral chi-square closed form
        for d in (2, 3):
            rng = np.random.default_rng(d)
            for _ in range(5):
                v = rng.normal(size=d)
                c = rng.uniform(0.8, 2.0)
                exact = stats.ncx2.cdf(d * c * c, d, float(np.sum(v * v)))
                assert abs(_prob_le(2.0, v, c) - exact) < 1e-7

    def test_pinf_product(self):
        from scipy.special import ndtr
        v = np.array([0.3, -1.0, 0.7])
        c = 1.4
        exact = np.prod([ndtr(c - x) - ndtr(-c - x) for x in v])
        assert abs(_prob_le(math.inf, v, c) - exact) < 1e-12


class TestAreFinite:
    def test_reference_values_d2(self):
        assert abs(are_finite(1.0, 2, (1, 1), 0.05, 0.95) - 1.0317) < 2e-3
        assert abs(are_finite(2.1, 2, (math.sqrt(2), 0), 0.05, 0.95) - 1.00429) < 2e-3
        assert abs(are_finite(1.9, 2, (1, 1), 0.05, 0.95) - 1.00459) < 2e-3

    def test_rotation_symmetry(self):
        v1 = are_finite(math.inf, 2, (math.sqrt(2), 0), 0.05, 0.95)
        v2 = are_finite(1.0, 2, (1, 1), 0.05, 0.95)
        assert abs(v1 - v2) < 2e-3

    def test_p2_identity(self):
        assert abs(are_finite(2.0, 2, (0.6, 1.1), 0.05, 0.95) - 1.0) < 1e-9
        assert abs(are_finite(5.0, 1, (1.0,), 0.05, 0.95) - 1.0) < 1e-9

    def test_schur2_ordering_d2(self):
        eq, sp = (1.0, 1.0), (math.sqrt(2), 0.0)
        assert are_finite(1.0, 2, eq, 0.05, 0.95) >= are_finite(1.0, 2, sp, 0.05, 0.95)
        assert are_finite(3.0, 2, eq, 0.05, 0.95) <= are_finite(3.0, 2, sp, 0.05, 0.95)

    def test_d3(self):
        assert abs(are_finite(math.inf, 3, (1, 1, 1), 0.05, 0.95)
                   - are_finite(math.inf, 3, (0, math.sqrt(3), 0), 0.05, 0.95)) > 1e-3
        assert abs(are_finite(2.0, 3, (1, 1, 1), 0.05, 0.95) - 1.0) < 1e-7

    def test_domain(self):
        with pytest.raises(DomainError):
            are_finite(1.0, 4, (1, 1, 1, 1), 0.05, 0.95)
        with pytest.raises(DomainError):
            are_finite(1.0, 2, (0, 0), 0.05, 0.95)


class TestAttaining:
    def test_targets_via_sample_size_ratio(self):
        # finite-d rendering of the attainability construction; no rate is
        # given by the theory, so the tolerance is loose
        d = 10**6
        for p, target in ((3.0, 2.0), (1.0, 0.5), (-0.25, 0.3)):
            seq = attaining_sequence(p, target, 0.05, 0.95)
            u = seq.probe(d)
            theta = u / math.sqrt(d)
            ratio = (sample_size(TestPlan(2.0, d, 0.05, 0.95, theta))
                     / sample_size(TestPlan(p, d, 0.05, 0.95, theta)))
            assert abs(ratio - target) <= 0.15 * target

    def test_target_range_validated(self):
        with pytest.raises(DomainError):
            attaining_sequence(3.0, 0.5, 0.05, 0.95)   # below a_3
        with pytest.raises(DomainError):
            attaining_sequence(1.0, 1.5, 0.05, 0.95)   # above a_1


def test_spike_divergence_crosses_ten_past_2e6():
    # companion to acceptance criterion 9: the n_2/n_3 spike
    # ratio grows like d^{1/6} and exceeds 10 by d = 4e6, not yet at 1e6
    d = 4 * 10**6
    theta = np.zeros(d)
    theta[0] = 1.0
    n2 = sample_size(TestPlan(2.0, d, 0.05, 0.95, theta))
    n3 = sample_size(TestPlan(3.0, d, 0.05, 0.95, theta))
    assert n2 / n3 > 10.0
